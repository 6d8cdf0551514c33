#include "oce/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "oce/errors.hpp"
#include "oce/random.hpp"

namespace oce {

FiniteClassLosses::FiniteClassLosses(std::vector<std::vector<double>> rows, double bound)
    : rows_(std::move(rows)), bound_(bound) {
  if (rows_.empty() || rows_.front().empty()) {
    throw DomainError("loss matrix needs at least one hypothesis and one sample");
  }
  if (!(bound_ > 0.0) || !std::isfinite(bound_)) {
    throw DomainError("loss bound M must be a positive finite number");
  }
  const std::size_t n = rows_.front().size();
  for (std::size_t h = 0; h < rows_.size(); ++h) {
    if (rows_[h].size() != n) {
      throw DomainError("loss matrix row " + std::to_string(h + 1) + " has " +
                        std::to_string(rows_[h].size()) + " entries, expected " +
                        std::to_string(n));
    }
    for (double v : rows_[h]) {
      if (!(v >= 0.0 && v <= bound_)) {
        throw DomainError("loss matrix row " + std::to_string(h + 1) +
                          " has an entry outside [0, M]");
      }
    }
  }
}

namespace {

double sup_for_draw(const FiniteClassLosses& losses, std::uint64_t seed) {
  const std::size_t n = losses.samples();
  std::vector<double> signs(n);
  std::uint64_t state = seed;
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) bits = splitmix64(state);
    signs[i] = (bits & 1u) ? 1.0 : -1.0;
    bits >>= 1;
  }
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < losses.hypotheses(); ++h) {
    const auto row = losses.row(h);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += signs[i] * row[i];
    best = std::max(best, s / static_cast<double>(n));
  }
  return best;
}

}  // namespace

RademacherEstimate rademacher_mc(const FiniteClassLosses& losses, std::size_t num_draws,
                                 std::uint64_t seed, unsigned workers) {
  if (num_draws == 0) throw DomainError("rademacher_mc needs at least one draw");
  std::vector<double> sups(num_draws);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t d = begin; d < end; ++d) sups[d] = sup_for_draw(losses, derive_seed(seed, d));
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(num_draws)));
  if (workers == 1) {
    run(0, num_draws);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (num_draws + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(num_draws, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }

  // Summation order is fixed by the draw index.
  double sum = 0.0;
  for (double s : sups) sum += s;
  const double mean = sum / static_cast<double>(num_draws);
  if (num_draws == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double s : sups) ss += (s - mean) * (s - mean);
  const double sample_std = std::sqrt(ss / static_cast<double>(num_draws - 1));
  return {mean, sample_std / std::sqrt(static_cast<double>(num_draws))};
}

void validate(const BoundInputs& b) {
  if (!(b.lip >= 1.0)) throw DomainError("Lip(phi) must be >= 1");
  if (!(b.rad >= 0.0)) throw DomainError("Rademacher average must be >= 0");
  if (!(b.M > 0.0)) throw DomainError("M must be > 0");
  if (!(b.n > 0.0)) throw DomainError("n must be > 0");
  if (!(b.delta > 0.0 && b.delta <= 1.0)) throw DomainError("delta must lie in (0, 1]");
  if (b.sigma_avg && !(*b.sigma_avg >= 0.0)) throw DomainError("sigma_avg must be >= 0");
  if (b.sigma_n_eim && !(*b.sigma_n_eim >= 0.0)) throw DomainError("sigma_n_eim must be >= 0");
  if (b.r_avg && !(*b.r_avg >= 0.0)) throw DomainError("r_avg must be >= 0");
}

namespace {

double require(const std::optional<double>& v, const char* name) {
  if (!v) throw DomainError(std::string("bound needs ") + name);
  return *v;
}

// M (2 + sqrt(log(2/delta))) / sqrt(n)
double concentration_term(const BoundInputs& b) {
  return b.M * (2.0 + std::sqrt(std::log(2.0 / b.delta))) / std::sqrt(b.n);
}

}  // namespace

double uniform_convergence_bound(const BoundInputs& b) {
  validate(b);
  return b.lip * (2.0 * b.rad + concentration_term(b));
}

double excess_oce_bound(const BoundInputs& b) { return 2.0 * uniform_convergence_bound(b); }

double naive_expected_loss_bound(const BoundInputs& b) {
  validate(b);
  return b.lip * (require(b.r_avg, "r_avg") + 4.0 * b.rad + 2.0 * concentration_term(b));
}

double eom_expected_loss_bound(const BoundInputs& b) {
  validate(b);
  return (require(b.r_avg, "r_avg") + 0.5 * b.lip * require(b.sigma_avg, "sigma_avg")) +
         4.0 * b.rad + 4.0 * b.M * std::sqrt(std::log(3.0 / b.delta)) / std::sqrt(b.n);
}

double eim_expected_loss_bound(const BoundInputs& b) {
  validate(b);
  return require(b.r_avg, "r_avg") + 4.0 * b.rad +
         4.0 * b.M * std::sqrt(std::log(2.0 / b.delta)) / std::sqrt(b.n) +
         0.5 * b.lip * require(b.sigma_n_eim, "sigma_n_eim");
}

ExpectedLossBounds expected_loss_bounds(const BoundInputs& b) {
  return {naive_expected_loss_bound(b), eom_expected_loss_bound(b), eim_expected_loss_bound(b)};
}

BoundReport bound_report(const BoundInputs& b) {
  BoundReport r{uniform_convergence_bound(b), excess_oce_bound(b), {}, {}, {}};
  if (b.r_avg) r.naive_expected_loss = naive_expected_loss_bound(b);
  if (b.r_avg && b.sigma_avg) r.eom_expected_loss = eom_expected_loss_bound(b);
  if (b.r_avg && b.sigma_n_eim) r.eim_expected_loss = eim_expected_loss_bound(b);
  return r;
}

double bkl(double p, double q) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
    throw DomainError("bkl needs p and q in the open interval (0, 1)");
  }
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

double binomial_tail_exact(std::uint64_t n, double p, double k) {
  if (n == 0) throw DomainError("binomial tail needs n >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("binomial tail needs p in (0, 1)");
  if (k < 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  if (k >= nd) return 1.0;

  const auto top = static_cast<std::uint64_t>(std::floor(k));
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double lg_n1 = std::lgamma(nd + 1.0);
  auto log_term = [&](std::uint64_t i) {
    const double id = static_cast<double>(i);
    return lg_n1 - std::lgamma(id + 1.0) - std::lgamma(nd - id + 1.0) + id * log_p +
           (nd - id) * log_q;
  };

  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint64_t i = 0; i <= top; ++i) peak = std::max(peak, log_term(i));
  double s = 0.0;
  for (std::uint64_t i = 0; i <= top; ++i) s += std::exp(log_term(i) - peak);
  return std::min(1.0, std::exp(peak + std::log(s)));
}

Bracket excess_risk_bracket(std::uint64_t n, double epsilon, double alpha) {
  if (n == 0) throw DomainError("bracket needs n >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("bracket needs epsilon in (0, 0.5)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("bracket needs alpha in (0, 1]");

  const double nd = static_cast<double>(n);
  const double gap = epsilon + (1.0 - alpha);
  const double c1 = std::sqrt(2.0) / 3.0;
  const double upper = std::exp(-nd * gap * gap / 2.0);
  const double lower =
      c1 * std::exp(-4.0 * nd * gap * gap - std::log(std::sqrt(nd * alpha)) - 16.0 / nd);
  // n alpha / 2 up to rounding in the product.
  const double threshold = std::floor(nd * alpha / 2.0 + 1e-9);
  const double exact = binomial_tail_exact(n, (1.0 + epsilon) / 2.0, threshold);
  return {lower, exact, upper};
}

}  // namespace oce
