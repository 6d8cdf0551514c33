#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "oce/disutility.hpp"

namespace oce {

/// Samplewise losses f(Z_1..Z_n) together with a declared bound M such that
/// every loss lies in [0, M]. Nonempty.
class LossVector {
 public:
  /// Throws DomainError if empty, if M <= 0, or if some value is outside
  /// [0, M].
  LossVector(std::vector<double> values, double bound);

  /// Uses the largest observed value as M (1 when every loss is zero).
  static LossVector with_max_bound(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  double bound() const { return bound_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  double bound_;
};

struct Moments {
  double mean;
  double std;  // divisor n
};

Moments loss_moments(const LossVector& losses);

enum class Solver { closed_form, ternary_search };

/// `generic` forces the ternary search even where a closed form exists.
enum class SolverPolicy { automatic, generic };

/// An (inverted) OCE value and the anchor lambda* attaining it.
struct OceResult {
  double value;
  double lambda_star;
  Solver solver;
};

/// zeta(lambda) = lambda + (1/n) sum phi(f_i - lambda).
double oce_objective(const LossVector& losses, const Disutility& phi, double lambda);

/// eta(lambda) = lambda - (1/n) sum phi(lambda - f_i).
double inverted_oce_objective(const LossVector& losses, const Disutility& phi,
                              double lambda);

/// Empirical OCE: min of `oce_objective` over lambda in [0, M].
///
/// Closed forms are used for the identity, entropic, mean-variance (anchor
/// interior) and CVaR with n*alpha integral (top-k average); everything else
/// goes through a ternary search on the convex objective. For mean-variance
/// with M > 1/(2c) the anchor range is shrunk to keep every argument of phi
/// inside its validity domain.
OceResult oce_empirical(const LossVector& losses, const Disutility& phi,
                        SolverPolicy policy = SolverPolicy::automatic);

/// Empirical inverted OCE: max of `inverted_oce_objective` over [0, M].
OceResult inverted_oce_empirical(const LossVector& losses, const Disutility& phi,
                                 SolverPolicy policy = SolverPolicy::automatic);

enum class Slice { bottom, top };

/// Mean of the k smallest (bottom) or k largest (top) losses, 1 <= k <= n.
double k_slice_average(const LossVector& losses, std::size_t k, Slice which);

}  // namespace oce
