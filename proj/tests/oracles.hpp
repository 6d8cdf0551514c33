#pragma once

// Brute-force reference computations used only by the tests. Nothing here
// calls into the solvers it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "oce/disutility.hpp"

namespace oce::testing {

/// Exhaustive search of lambda + (1/n) sum phi(f_i - lambda) over a uniform
/// grid on [lo, hi] together with the sample values inside it (the kinks of a
/// piecewise-linear objective). Grid points where phi would leave its
/// validity domain are skipped.
inline double grid_min_oce(const std::vector<double>& f, const Disutility& phi, double lo,
                           double hi, std::size_t points = 100001) {
  const double floor = phi.validity_domain().lower;
  const double fmin = *std::min_element(f.begin(), f.end());
  auto eval = [&](double lambda) {
    if (fmin - lambda < floor) return std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double v : f) s += phi.value(v - lambda);
    return lambda + s / static_cast<double>(f.size());
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    best = std::min(best, eval(lo + (hi - lo) * static_cast<double>(k) / (points - 1)));
  }
  for (double v : f) {
    if (v >= lo && v <= hi) best = std::min(best, eval(v));
  }
  return best;
}

/// Same search for lambda - (1/n) sum phi(lambda - f_i), maximized.
inline double grid_max_roce(const std::vector<double>& f, const Disutility& phi, double lo,
                            double hi, std::size_t points = 100001) {
  const double floor = phi.validity_domain().lower;
  const double fmax = *std::max_element(f.begin(), f.end());
  auto eval = [&](double lambda) {
    if (lambda - fmax < floor) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (double v : f) s += phi.value(lambda - v);
    return lambda - s / static_cast<double>(f.size());
  };
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < points; ++k) {
    best = std::max(best, eval(lo + (hi - lo) * static_cast<double>(k) / (points - 1)));
  }
  for (double v : f) {
    if (v >= lo && v <= hi) best = std::max(best, eval(v));
  }
  return best;
}

/// Exact Rademacher average of a finite class by enumerating all 2^n sign
/// vectors.
inline double rademacher_enumerate(const std::vector<std::vector<double>>& rows) {
  const std::size_t n = rows.front().size();
  const std::uint64_t total = std::uint64_t{1} << n;
  double acc = 0.0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += ((mask >> i) & 1u ? 1.0 : -1.0) * row[i];
      best = std::max(best, s / static_cast<double>(n));
    }
    acc += best;
  }
  return acc / static_cast<double>(total);
}

/// Central finite differences of a scalar function of a parameter vector.
inline std::vector<double> central_differences(
    const std::function<double(const std::vector<double>&)>& fn, std::vector<double> x,
    double h) {
  std::vector<double> g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double keep = x[j];
    x[j] = keep + h;
    const double up = fn(x);
    x[j] = keep - h;
    const double down = fn(x);
    x[j] = keep;
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    diff += (a[j] - b[j]) * (a[j] - b[j]);
    scale += b[j] * b[j];
  }
  return std::sqrt(diff) / std::max(std::sqrt(scale), 1e-8);
}

/// Random instance generator shared by the property suites.
class InstanceGen {
 public:
  explicit InstanceGen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  std::size_t integer(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  /// n losses in [0, M] (not necessarily attaining M).
  std::vector<double> losses(std::size_t n, double bound) {
    std::vector<double> v(n);
    for (double& x : v) x = uniform(0.0, bound);
    return v;
  }

  /// One of the five built-in kinds with random parameters, valid on [-M, M].
  Disutility spec(std::size_t kind, double bound) {
    switch (kind % 5) {
      case 0:
        return Disutility::identity();
      case 1:
        return Disutility::entropic(uniform(0.05, 3.0));
      case 2:
        return Disutility::mean_variance(uniform(0.01, 1.0) / (2.0 * bound));
      case 3:
        return Disutility::cvar(uniform(0.05, 1.0));
      default: {
        const double g1 = uniform(1.05, 6.0);
        return Disutility::soft_cvar(g1, uniform(0.0, 0.95));
      }
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace oce::testing
