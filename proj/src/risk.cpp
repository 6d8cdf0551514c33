#include "oce/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anchor_search.hpp"
#include "oce/errors.hpp"

namespace oce {

LossVector::LossVector(std::vector<double> values, double bound)
    : values_(std::move(values)), bound_(bound) {
  if (values_.empty()) throw DomainError("loss vector is empty");
  if (!(bound_ > 0.0) || !std::isfinite(bound_)) {
    throw DomainError("loss bound M must be a positive finite number");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v >= 0.0 && v <= bound_)) {
      throw DomainError("loss #" + std::to_string(i + 1) + " = " + std::to_string(v) +
                        " is outside [0, M]");
    }
  }
}

LossVector LossVector::with_max_bound(std::vector<double> values) {
  double mx = 0.0;
  for (double v : values) mx = std::max(mx, v);
  // An all-zero sample has no tight bound; M = 1 keeps the anchor range valid.
  const double bound = mx > 0.0 ? mx : 1.0;
  return LossVector(std::move(values), bound);
}

Moments loss_moments(const LossVector& losses) {
  const auto v = losses.values();
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / n)};
}

double oce_objective(const LossVector& losses, const Disutility& phi, double lambda) {
  return detail::anchor_objective({losses.values(), {}, losses.bound()}, phi,
                                  detail::Direction::averse, lambda);
}

double inverted_oce_objective(const LossVector& losses, const Disutility& phi,
                              double lambda) {
  return detail::anchor_objective({losses.values(), {}, losses.bound()}, phi,
                                  detail::Direction::seeking, lambda);
}

OceResult oce_empirical(const LossVector& losses, const Disutility& phi,
                        SolverPolicy policy) {
  return detail::solve_anchor({losses.values(), {}, losses.bound()}, phi,
                              detail::Direction::averse, policy);
}

OceResult inverted_oce_empirical(const LossVector& losses, const Disutility& phi,
                                 SolverPolicy policy) {
  return detail::solve_anchor({losses.values(), {}, losses.bound()}, phi,
                              detail::Direction::seeking, policy);
}

double k_slice_average(const LossVector& losses, std::size_t k, Slice which) {
  const std::size_t n = losses.size();
  if (k < 1 || k > n) {
    throw DomainError("k = " + std::to_string(k) + " must lie in [1, " +
                      std::to_string(n) + "]");
  }
  std::vector<double> sorted(losses.values().begin(), losses.values().end());
  if (which == Slice::top) {
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
  } else {
    std::sort(sorted.begin(), sorted.end());
  }
  return std::accumulate(sorted.begin(), sorted.begin() + k, 0.0) / static_cast<double>(k);
}

}  // namespace oce
