#pragma once

// Finite-difference check of batch_objective shared by the unit and
// acceptance suites.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "oce/risk.hpp"
#include "oce/trainer.hpp"
#include "oracles.hpp"

namespace oce::testing {

struct GradientDraw {
  bool skipped = false;
  double rel_error = 0.0;
};

inline const Disutility* objective_spec(const Objective& objective) {
  if (const auto* e = std::get_if<Eom>(&objective)) return &e->spec;
  if (const auto* e = std::get_if<Eim>(&objective)) return &e->spec;
  return nullptr;
}

/// Compares the returned gradient with central differences (h = 1e-5).
/// Draws where a raw loss sits within `margin` of the clip, or where a second
/// sample sits within `margin` of a piecewise-linear anchor, are skipped: the
/// objective is not differentiable there.
inline GradientDraw check_gradient(const Params& params, const Dataset& data,
                                   const std::vector<std::size_t>& batch,
                                   const TrainConfig& cfg, double margin = 1e-4) {
  GradientDraw out;
  const auto raw = clipped_losses(params, data, batch, std::numeric_limits<double>::infinity());
  for (double l : raw) {
    if (std::abs(l - cfg.loss_clip_M) < margin) {
      out.skipped = true;
      return out;
    }
  }
  if (const Disutility* phi = objective_spec(cfg.objective); phi && phi->is_piecewise_linear() &&
                                                             !phi->is<Identity>()) {
    std::vector<double> clipped(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) clipped[i] = std::min(raw[i], cfg.loss_clip_M);
    const LossVector lv(clipped, cfg.loss_clip_M);
    const double lambda = std::holds_alternative<Eom>(cfg.objective)
                              ? oce_empirical(lv, *phi).lambda_star
                              : inverted_oce_empirical(lv, *phi).lambda_star;
    std::size_t near = 0;
    for (double l : clipped) near += std::abs(l - lambda) < margin;
    const double na = *phi->quantile_fraction() * static_cast<double>(clipped.size());
    if (near > 1 || std::abs(na - std::round(na)) < margin) {
      out.skipped = true;
      return out;
    }
  }

  const ObjectiveValue ov = batch_objective(params, data, batch, cfg);
  const auto fd = central_differences(
      [&](const std::vector<double>& p) { return batch_objective(p, data, batch, cfg).value; },
      params, 1e-5);
  out.rel_error = relative_error(ov.gradient, fd);
  return out;
}

/// Random gradient-check instances for one objective family.
class GradientDrawGen {
 public:
  GradientDrawGen(std::uint64_t seed, const Dataset& data) : gen_(seed), data_(data) {}

  Params params(double scale) {
    Params p(data_.dimension + 1);
    std::normal_distribution<double> normal(0.0, scale);
    for (double& v : p) v = normal(gen_.engine());
    return p;
  }

  std::vector<std::size_t> batch() {
    std::vector<std::size_t> rows(data_.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::shuffle(rows.begin(), rows.end(), gen_.engine());
    rows.resize(gen_.integer(5, 60));
    return rows;
  }

  InstanceGen& gen() { return gen_; }

 private:
  InstanceGen gen_;
  const Dataset& data_;
};

/// Builds an objective of family `family` (0 ERM, 1 SVP, 2..6 EOM with the
/// five spec kinds, 7..11 EIM likewise) sized for the clip bound.
inline Objective make_objective(int family, InstanceGen& gen, double clip) {
  if (family == 0) return Erm{};
  if (family == 1) return Svp{gen.uniform(0.0, 2.0)};
  const Disutility spec = gen.spec(static_cast<std::size_t>((family - 2) % 5), clip);
  if (family < 7) return Eom{spec};
  return Eim{spec};
}

inline std::string family_name(int family) {
  static const char* kinds[] = {"identity", "entropic", "meanvar", "cvar", "softcvar"};
  if (family == 0) return "erm";
  if (family == 1) return "svp";
  return std::string(family < 7 ? "eom-" : "eim-") + kinds[(family - 2) % 5];
}

}  // namespace oce::testing
