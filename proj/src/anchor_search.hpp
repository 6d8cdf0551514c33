#pragma once

// One-dimensional search over the OCE anchor lambda, shared by the empirical
// risks and the contaminated (weighted) distributions used for influence
// functions.

#include <span>

#include "oce/disutility.hpp"
#include "oce/risk.hpp"

namespace oce::detail {

enum class Direction { averse, seeking };

/// A discrete distribution over losses in [0, bound]. Empty `weights` means
/// uniform 1/n.
struct WeightedLosses {
  std::span<const double> values;
  std::span<const double> weights;
  double bound;
};

/// averse:  lambda + E phi(f - lambda)
/// seeking: lambda - E phi(lambda - f)
double anchor_objective(const WeightedLosses& dist, const Disutility& phi,
                        Direction dir, double lambda);

/// Minimizes (averse) or maximizes (seeking) the anchor objective over the
/// part of [0, bound] where phi stays on its validity domain.
OceResult solve_anchor(const WeightedLosses& dist, const Disutility& phi,
                       Direction dir, SolverPolicy policy);

}  // namespace oce::detail
