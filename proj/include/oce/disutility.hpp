#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace oce {

/// phi(t) = t. The OCE reduces to the expected loss.
struct Identity {};

/// phi(t) = (exp(gamma t) - 1) / gamma.
struct Entropic {
  double gamma;
};

/// phi(t) = t + c t^2, a valid disutility only for t >= -1/(2c).
struct MeanVariance {
  double c;
};

/// phi(t) = [t]_+ / alpha.
struct CVaR {
  double alpha;
};

/// phi(t) = gamma1 [t]_+ - gamma2 [t]_-, with gamma1 > 1 > gamma2 >= 0.
struct SoftCVaR {
  double gamma1;
  double gamma2;
};

/// Value of phi at a point together with its right derivative there.
struct PhiValue {
  double value;
  double right_subgradient;
};

/// Closed interval (possibly unbounded) on which a disutility is valid.
struct Interval {
  double lower;
  double upper;

  bool contains(double t) const { return t >= lower && t <= upper; }
};

/// A disutility function phi: nondecreasing, convex, phi(0) = 0 and
/// 1 in the subdifferential at 0.
///
/// Instances are immutable and always carry validated parameters; build them
/// through the named factories or `parse`.
class Disutility {
 public:
  using Params = std::variant<Identity, Entropic, MeanVariance, CVaR, SoftCVaR>;

  static Disutility identity();
  static Disutility entropic(double gamma);
  static Disutility mean_variance(double c);
  static Disutility cvar(double alpha);
  static Disutility soft_cvar(double gamma1, double gamma2);

  /// Parses `identity`, `entropic:GAMMA`, `meanvar:C`, `cvar:ALPHA` or
  /// `softcvar:G1,G2`. Throws DomainError on anything else.
  static Disutility parse(std::string_view text);

  const Params& params() const { return params_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(params_);
  }

  /// Inverse of `parse` (round-trips up to floating point formatting).
  std::string to_string() const;

  Interval validity_domain() const;

  /// phi(t) and its right derivative. Throws DomainError off the validity
  /// domain.
  PhiValue eval(double t) const;
  double value(double t) const { return eval(t).value; }
  double right_derivative(double t) const { return eval(t).right_subgradient; }
  double left_derivative(double t) const;

  /// True for the piecewise-linear kinds (CVaR, SoftCVaR, Identity).
  bool is_piecewise_linear() const;

  /// For CVaR: alpha. For SoftCVaR: the induced fraction
  /// (1 - gamma2) / (gamma1 - gamma2). Empty for the smooth kinds.
  std::optional<double> quantile_fraction() const;

 private:
  explicit Disutility(Params p) : params_(p) {}

  Params params_;
};

/// Lipschitz constant of phi on [-bound, bound], i.e. the supremum of the
/// right derivative there. Always >= 1.
double lipschitz_on(const Disutility& phi, double bound);

/// C_phi = inf over 0 < |t| <= bound of (phi(t) - t) / t^2. Closed form where
/// one is known, otherwise `curvature_constant_numeric`.
double curvature_constant(const Disutility& phi, double bound);

/// Numeric C_phi: 10,001-point log-spaced grid on (0, bound] mirrored to the
/// negatives, then golden-section refinement around the grid minimizer.
double curvature_constant_numeric(const Disutility& phi, double bound);

/// Disutility axioms checked by `validate_tabulated`, in checking order.
enum class Axiom {
  zero_at_origin,       // phi(0) = 0
  unit_subgradient,     // 1 in dphi(0), tested as phi(t) >= t
  nondecreasing,
  convex,
};

std::string_view axiom_name(Axiom axiom);

struct AxiomVerdict {
  std::vector<Axiom> failures;

  bool valid() const { return failures.empty(); }
};

/// Checks the disutility axioms on a function tabulated over a grid that is
/// sorted, symmetric about zero and contains zero. Throws DomainError when the
/// grid itself is malformed.
AxiomVerdict validate_tabulated(std::span<const double> grid,
                                std::span<const double> values,
                                double tolerance = 1e-12);

}  // namespace oce
