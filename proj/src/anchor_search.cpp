#include "anchor_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "oce/errors.hpp"

namespace oce::detail {

namespace {

double weight(const WeightedLosses& d, std::size_t i) {
  return d.weights.empty() ? 1.0 / static_cast<double>(d.values.size()) : d.weights[i];
}

double weighted_mean(const WeightedLosses& d) {
  if (d.weights.empty()) {
    return std::accumulate(d.values.begin(), d.values.end(), 0.0) /
           static_cast<double>(d.values.size());
  }
  double s = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) s += d.weights[i] * d.values[i];
  return s;
}

double weighted_variance(const WeightedLosses& d, double mean) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const double dev = d.values[i] - mean;
    s += (d.weights.empty() ? 1.0 : d.weights[i]) * dev * dev;
  }
  return d.weights.empty() ? s / static_cast<double>(d.values.size()) : s;
}

// (1/gamma) log E exp(sign * gamma * f), shifted by the extreme value.
double log_mean_exp(const WeightedLosses& d, double gamma, double sign) {
  double shift = sign * gamma * d.values[0];
  for (double v : d.values) shift = std::max(shift, sign * gamma * v);
  double s = 0.0;
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    s += weight(d, i) * std::exp(sign * gamma * d.values[i] - shift);
  }
  return (shift + std::log(s)) / gamma;
}

struct AnchorRange {
  double lo;
  double hi;
};

// Anchors for which every phi argument stays on the validity domain.
AnchorRange feasible_range(const WeightedLosses& d, const Disutility& phi, Direction dir) {
  AnchorRange r{0.0, d.bound};
  const double floor = phi.validity_domain().lower;
  if (std::isfinite(floor)) {
    const auto [mn, mx] = std::minmax_element(d.values.begin(), d.values.end());
    if (dir == Direction::averse) {
      r.hi = std::min(r.hi, *mn - floor);
    } else {
      r.lo = std::max(r.lo, *mx + floor);
    }
  }
  if (r.lo > r.hi) {
    throw DomainError("no anchor in [0, M] keeps " + phi.to_string() +
                      " on its validity domain for these losses");
  }
  return r;
}

// k = n * alpha when that is a positive integer, else 0.
std::size_t integral_count(std::size_t n, double alpha) {
  const double na = static_cast<double>(n) * alpha;
  const double k = std::round(na);
  if (k >= 1.0 && std::abs(na - k) <= 1e-9 * std::max(1.0, na)) {
    return static_cast<std::size_t>(k);
  }
  return 0;
}

bool closed_form(const WeightedLosses& d, const Disutility& phi, Direction dir,
                 const AnchorRange& range, OceResult& out) {
  const bool averse = dir == Direction::averse;
  if (phi.is<Identity>()) {
    out = {weighted_mean(d), 0.0, Solver::closed_form};
    return true;
  }
  if (const auto* p = std::get_if<Entropic>(&phi.params())) {
    const double v = averse ? log_mean_exp(d, p->gamma, 1.0)
                            : -log_mean_exp(d, p->gamma, -1.0);
    out = {v, std::clamp(v, 0.0, d.bound), Solver::closed_form};
    return true;
  }
  if (const auto* p = std::get_if<MeanVariance>(&phi.params())) {
    const double mean = weighted_mean(d);
    if (mean < range.lo || mean > range.hi) return false;
    const double var = weighted_variance(d, mean);
    out = {averse ? mean + p->c * var : mean - p->c * var, mean, Solver::closed_form};
    return true;
  }
  if (const auto* p = std::get_if<CVaR>(&phi.params())) {
    if (!d.weights.empty()) return false;
    const std::size_t n = d.values.size();
    const std::size_t k = integral_count(n, p->alpha);
    if (k == 0) return false;
    std::vector<double> sorted(d.values.begin(), d.values.end());
    if (averse) {
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
    } else {
      std::sort(sorted.begin(), sorted.end());
    }
    const double sum = std::accumulate(sorted.begin(), sorted.begin() + k, 0.0);
    out = {sum / static_cast<double>(k), sorted[k - 1], Solver::closed_form};
    return true;
  }
  return false;
}

}  // namespace

double anchor_objective(const WeightedLosses& d, const Disutility& phi, Direction dir,
                        double lambda) {
  double s = 0.0;
  if (dir == Direction::averse) {
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      s += (d.weights.empty() ? 1.0 : d.weights[i]) * phi.value(d.values[i] - lambda);
    }
  } else {
    for (std::size_t i = 0; i < d.values.size(); ++i) {
      s += (d.weights.empty() ? 1.0 : d.weights[i]) * phi.value(lambda - d.values[i]);
    }
  }
  if (d.weights.empty()) s /= static_cast<double>(d.values.size());
  return dir == Direction::averse ? lambda + s : lambda - s;
}

OceResult solve_anchor(const WeightedLosses& d, const Disutility& phi, Direction dir,
                       SolverPolicy policy) {
  if (d.values.empty()) throw DomainError("empty loss sample");
  const AnchorRange range = feasible_range(d, phi, dir);

  OceResult out{};
  if (policy == SolverPolicy::automatic && closed_form(d, phi, dir, range, out)) {
    return out;
  }

  // Minimize the (sign-adjusted) convex objective.
  const double sign = dir == Direction::averse ? 1.0 : -1.0;
  auto cost = [&](double lambda) { return sign * anchor_objective(d, phi, dir, lambda); };

  double lo = range.lo;
  double hi = range.hi;
  const double width_tol = 1e-12 * (1.0 + d.bound);
  for (int it = 0; it < 200 && hi - lo > width_tol; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (cost(m1) <= cost(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }

  // Candidates in ascending order; the first strict improvement wins, so ties
  // resolve to the smallest anchor.
  std::vector<double> candidates{lo, 0.5 * (lo + hi), hi};
  if (phi.is_piecewise_linear()) {
    // Piecewise-linear objectives attain their optimum at a kink, i.e. at a
    // sample value or at an end of the range.
    double below = range.lo;
    double above = range.hi;
    for (double v : d.values) {
      if (v <= lo && v > below) below = v;
      if (v >= hi && v < above) above = v;
      if (v > lo && v < hi) candidates.push_back(v);
    }
    candidates.push_back(below);
    candidates.push_back(above);
  }
  std::sort(candidates.begin(), candidates.end());
  double best_lambda = candidates.front();
  double best_cost = cost(best_lambda);
  for (double c : candidates) {
    const double v = cost(c);
    if (v < best_cost) {
      best_cost = v;
      best_lambda = c;
    }
  }
  return {sign * best_cost, best_lambda, Solver::ternary_search};
}

}  // namespace oce::detail
