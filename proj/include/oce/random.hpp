#pragma once

#include <cstdint>

namespace oce {

/// One step of the splitmix64 generator: advances `state` and returns the
/// next output.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for the `index`-th independent stream under a root seed. Streams do
/// not depend on how work is split between threads.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t state = root ^ (0xd1b54a32d192ed03ULL * (index + 1));
  splitmix64(state);
  return splitmix64(state);
}

}  // namespace oce
