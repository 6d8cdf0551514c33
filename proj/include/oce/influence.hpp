#pragma once

#include <optional>

#include "oce/disutility.hpp"
#include "oce/risk.hpp"

namespace oce {

/// Point mass added to a loss distribution: the loss value f(z*) it carries
/// and the contamination weight used by the finite-difference estimator.
struct ContaminationQuery {
  double z_loss;
  double epsilon = 1e-6;
};

/// The population quantities the closed-form influence functions and their
/// upper bounds consume. Each formula reads only the fields it needs and
/// throws DomainError if one of them is missing.
struct DistributionSummary {
  std::optional<double> mean;            // R(f)
  std::optional<double> variance;        // sigma^2(f)
  std::optional<double> neg_exp_moment;  // E[exp(-gamma f)], gamma of the queried phi
  std::optional<double> quantile;        // q(alpha; f#P)
  std::optional<double> lower_shortfall; // E[q(alpha; f#P) - f]_+
  /// Whether f#P has a continuous density. The CVaR formula requires it.
  bool continuous = false;
};

/// Summary of the empirical distribution P_n (never continuous). The quantile
/// is inf{t : alpha <= F_n(t)} with alpha the quantile fraction of `phi`, when
/// it has one.
DistributionSummary summarize(const LossVector& losses, const Disutility& phi);

/// [ROCE((1-eps) P_n + eps Delta_z) - ROCE(P_n)] / eps, both risks solved on
/// weighted samples. The mixture's bound is max(M, z_loss).
double empirical_influence(const LossVector& losses, const Disutility& phi,
                           const ContaminationQuery& query);

/// True for the kinds with a known inverted-OCE influence function:
/// identity, entropic, mean-variance and CVaR.
bool has_closed_form_influence(const Disutility& phi);

/// Influence function of the inverted OCE at a contaminating loss `z_loss`.
///   identity:      z - R
///   entropic:      1/gamma - (1/gamma) exp(-gamma z) / E[exp(-gamma f)]
///   mean-variance: (z - R) + c [sigma^2 - (z - R)^2]
///   CVaR:          (1/alpha) E[q - f]_+ - (1/alpha) [q - z]_+   (continuous only)
double closed_form_influence(const Disutility& phi, const DistributionSummary& dist,
                             double z_loss);

/// True for the kinds whose influence function has a finite upper bound
/// formula (plus identity, whose bound is +infinity).
bool has_influence_bound(const Disutility& phi);

/// sup over z of the influence function: 1/gamma, 3/(4c) + c sigma^2, or
/// (1/alpha) E[q - f]_+. Identity is unbounded and returns +infinity.
double influence_bound(const Disutility& phi, const DistributionSummary& dist);

}  // namespace oce
