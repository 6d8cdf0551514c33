#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace oce {

/// Losses of a finite hypothesis class on a fixed sample: one row per
/// hypothesis, one column per sample, every entry in [0, M].
class FiniteClassLosses {
 public:
  /// Throws DomainError on an empty or ragged matrix or an entry outside
  /// [0, M].
  FiniteClassLosses(std::vector<std::vector<double>> rows, double bound);

  std::size_t hypotheses() const { return rows_.size(); }
  std::size_t samples() const { return rows_.front().size(); }
  std::span<const double> row(std::size_t h) const { return rows_[h]; }
  double bound() const { return bound_; }

 private:
  std::vector<std::vector<double>> rows_;
  double bound_;
};

struct RademacherEstimate {
  double estimate;
  double mc_std_error;
};

/// Monte-Carlo estimate of E_eps sup_f (1/n) sum eps_i f(Z_i) with the
/// supremum taken exactly over the rows. Draw d uses a sign vector seeded by
/// splitmix64(seed, d), so the result does not depend on `workers`.
RademacherEstimate rademacher_mc(const FiniteClassLosses& losses, std::size_t num_draws,
                                 std::uint64_t seed, unsigned workers = 1);

/// Inputs shared by the generalization bounds.
struct BoundInputs {
  double lip = 1.0;    // Lip(phi) >= 1
  double rad = 0.0;    // E[Rad_n], >= 0
  double M = 1.0;      // loss bound
  double n = 1.0;      // sample size; real-valued so n -> infinity limits work
  double delta = 0.05; // confidence parameter in (0, 1]
  std::optional<double> r_avg;       // R(f_avg)
  std::optional<double> sigma_avg;   // sigma(f_avg)
  std::optional<double> sigma_n_eim; // sigma_n(f_EIM)
};

/// Throws DomainError if some field is out of range.
void validate(const BoundInputs& b);

/// sup_f |OCE - OCE_n| <= Lip (2 Rad + M (2 + sqrt(log(2/delta))) / sqrt(n)).
double uniform_convergence_bound(const BoundInputs& b);

/// Excess OCE of the empirical minimizer; exactly twice the uniform bound.
double excess_oce_bound(const BoundInputs& b);

/// Lip (R_avg + 4 Rad + 2M (2 + sqrt(log(2/delta))) / sqrt(n)).
double naive_expected_loss_bound(const BoundInputs& b);

/// (R_avg + (Lip/2) sigma_avg) + 4 Rad + 4M sqrt(log(3/delta)) / sqrt(n).
double eom_expected_loss_bound(const BoundInputs& b);

/// R_avg + 4 Rad + 4M sqrt(log(2/delta)) / sqrt(n) + (Lip/2) sigma_n(f_EIM).
double eim_expected_loss_bound(const BoundInputs& b);

struct ExpectedLossBounds {
  double naive;
  double eom;
  double eim;
};

/// All three expected-loss bounds; throws if an optional input is missing.
ExpectedLossBounds expected_loss_bounds(const BoundInputs& b);

/// Every bound that the inputs allow; expected-loss entries whose optional
/// inputs are missing stay empty.
struct BoundReport {
  double uniform_conv;
  double excess_oce;
  std::optional<double> naive_expected_loss;
  std::optional<double> eom_expected_loss;
  std::optional<double> eim_expected_loss;
};

BoundReport bound_report(const BoundInputs& b);

/// Binary KL divergence p log(p/q) + (1-p) log((1-p)/(1-q)), p, q in (0, 1).
double bkl(double p, double q);

/// Pr[Bin(n, p) <= k], summed in log space over indices <= floor(k).
double binomial_tail_exact(std::uint64_t n, double p, double k);

struct Bracket {
  double lower;
  double exact;
  double upper;
};

/// Lower and upper bounds on the probability that empirical CVaR minimization
/// picks the worse of the two stylized hypotheses, and the exact value
/// Pr[Bin(n, (1+eps)/2) <= n alpha / 2]. The lower bound uses the constant
/// sqrt(2)/3.
Bracket excess_risk_bracket(std::uint64_t n, double epsilon, double alpha);

}  // namespace oce
