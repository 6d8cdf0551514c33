#include "oce/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "anchor_search.hpp"
#include "oce/errors.hpp"

namespace oce {

namespace {

double need(const std::optional<double>& field, const char* name, const Disutility& phi) {
  if (!field) {
    throw DomainError(std::string("distribution summary lacks ") + name +
                      ", required by " + phi.to_string());
  }
  return *field;
}

}  // namespace

DistributionSummary summarize(const LossVector& losses, const Disutility& phi) {
  const auto v = losses.values();
  const double n = static_cast<double>(v.size());
  const Moments m = loss_moments(losses);

  DistributionSummary s;
  s.mean = m.mean;
  s.variance = m.std * m.std;
  s.continuous = false;
  if (const auto* p = std::get_if<Entropic>(&phi.params())) {
    double acc = 0.0;
    for (double x : v) acc += std::exp(-p->gamma * x);
    s.neg_exp_moment = acc / n;
  }
  if (const auto alpha = phi.quantile_fraction()) {
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    // Smallest index j with (j + 1) / n >= alpha.
    const double na = n * *alpha;
    double idx = std::ceil(na - 1e-9 * std::max(1.0, na)) - 1.0;
    idx = std::clamp(idx, 0.0, n - 1.0);
    const double q = sorted[static_cast<std::size_t>(idx)];
    double shortfall = 0.0;
    for (double x : v) shortfall += std::max(q - x, 0.0);
    s.quantile = q;
    s.lower_shortfall = shortfall / n;
  }
  return s;
}

double empirical_influence(const LossVector& losses, const Disutility& phi,
                           const ContaminationQuery& query) {
  if (!(query.epsilon > 0.0 && query.epsilon < 0.5)) {
    throw DomainError("contamination epsilon must lie in (0, 0.5)");
  }
  if (!(query.z_loss >= 0.0) || !std::isfinite(query.z_loss)) {
    throw DomainError("contaminating loss must be a nonnegative finite number");
  }
  const auto v = losses.values();
  const std::size_t n = v.size();

  const std::vector<double> base_w(n, 1.0 / static_cast<double>(n));
  const auto base = detail::solve_anchor({v, base_w, losses.bound()}, phi,
                                         detail::Direction::seeking,
                                         SolverPolicy::automatic);

  std::vector<double> mix_v(v.begin(), v.end());
  mix_v.push_back(query.z_loss);
  std::vector<double> mix_w(n, (1.0 - query.epsilon) / static_cast<double>(n));
  mix_w.push_back(query.epsilon);
  const double mix_bound = std::max(losses.bound(), query.z_loss);
  const auto mixed = detail::solve_anchor({mix_v, mix_w, mix_bound}, phi,
                                          detail::Direction::seeking,
                                          SolverPolicy::automatic);

  return (mixed.value - base.value) / query.epsilon;
}

bool has_closed_form_influence(const Disutility& phi) {
  return phi.is<Identity>() || phi.is<Entropic>() || phi.is<MeanVariance>() ||
         phi.is<CVaR>();
}

double closed_form_influence(const Disutility& phi, const DistributionSummary& dist,
                             double z_loss) {
  if (phi.is<Identity>()) return z_loss - need(dist.mean, "mean", phi);
  if (const auto* p = std::get_if<Entropic>(&phi.params())) {
    const double moment = need(dist.neg_exp_moment, "E[exp(-gamma f)]", phi);
    return (1.0 - std::exp(-p->gamma * z_loss) / moment) / p->gamma;
  }
  if (const auto* p = std::get_if<MeanVariance>(&phi.params())) {
    const double dev = z_loss - need(dist.mean, "mean", phi);
    return dev + p->c * (need(dist.variance, "variance", phi) - dev * dev);
  }
  if (const auto* p = std::get_if<CVaR>(&phi.params())) {
    if (!dist.continuous) {
      throw DomainError(
          "continuity assumption violated: the CVaR influence function needs a "
          "loss distribution with a continuous density");
    }
    const double q = need(dist.quantile, "quantile", phi);
    const double shortfall = need(dist.lower_shortfall, "E[q - f]_+", phi);
    return (shortfall - std::max(q - z_loss, 0.0)) / p->alpha;
  }
  throw DomainError("no closed-form influence function for " + phi.to_string());
}

bool has_influence_bound(const Disutility& phi) { return has_closed_form_influence(phi); }

double influence_bound(const Disutility& phi, const DistributionSummary& dist) {
  if (phi.is<Identity>()) return std::numeric_limits<double>::infinity();
  if (const auto* p = std::get_if<Entropic>(&phi.params())) return 1.0 / p->gamma;
  if (const auto* p = std::get_if<MeanVariance>(&phi.params())) {
    return 3.0 / (4.0 * p->c) + p->c * need(dist.variance, "variance", phi);
  }
  if (const auto* p = std::get_if<CVaR>(&phi.params())) {
    return need(dist.lower_shortfall, "E[q - f]_+", phi) / p->alpha;
  }
  throw DomainError("no influence bound for " + phi.to_string());
}

}  // namespace oce
