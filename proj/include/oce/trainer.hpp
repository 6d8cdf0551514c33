#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oce/disutility.hpp"
#include "oce/errors.hpp"

namespace oce {

/// Two Gaussian clusters at +-(class_separation / 2) along a random unit
/// direction, unit isotropic noise, labels flipped with `label_noise_rate`.
struct SyntheticTask {
  std::size_t n_train = 2000;
  std::size_t n_test = 1000;
  std::size_t dimension = 20;
  double class_separation = 2.0;
  double label_noise_rate = 0.1;
  std::uint64_t seed = 0;
};

/// Row-major features with binary labels in {0, 1}.
struct Dataset {
  std::size_t dimension = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * dimension, dimension};
  }
};

struct SyntheticData {
  Dataset train;
  Dataset test;
};

/// Deterministic in `task.seed`.
SyntheticData make_synthetic(const SyntheticTask& task);

struct Erm {};
struct Eom {
  Disutility spec;
};
struct Eim {
  Disutility spec;
};
struct Svp {
  double penalty_lambda;
};

using Objective = std::variant<Erm, Eom, Eim, Svp>;

struct TrainConfig {
  Objective objective = Erm{};
  std::size_t batch_size = 100;
  std::size_t epochs = 50;
  double learning_rate = 0.1;
  double loss_clip_M = 20.0;
  /// Standard deviation of the Gaussian weight initialization (bias starts
  /// at zero).
  double init_scale = 0.5;
  std::uint64_t seed = 0;
};

/// Throws DomainError for an inconsistent task/config pair.
void validate(const SyntheticTask& task, const TrainConfig& cfg);

/// CVaR level used for the trajectory's cvar columns: the objective's
/// quantile fraction when it has one, else 0.2.
double evaluation_alpha(const Objective& objective);

/// Logistic model parameters: `dimension` weights followed by the bias.
using Params = std::vector<double>;

/// min(cross-entropy, clip) of the logistic model on each listed row.
std::vector<double> clipped_losses(std::span<const double> params, const Dataset& data,
                                   std::span<const std::size_t> rows, double clip);

struct ObjectiveValue {
  double value;
  std::vector<double> gradient;
};

/// Configured risk of the batch's clipped losses and its gradient. The
/// gradient holds the inner anchor fixed at its optimum and gives zero weight
/// to clipped samples. At a kink of phi the sample weights are chosen so the
/// anchor's optimality condition holds.
ObjectiveValue batch_objective(std::span<const double> params, const Dataset& data,
                               std::span<const std::size_t> batch, const TrainConfig& cfg);

struct TrajectoryRow {
  std::size_t epoch;
  double train_mean;
  double test_mean;
  double train_cvar;
  double test_cvar;
  double train_std;
  double objective_value;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;

  /// Header plus one line per row, 9 significant digits.
  std::string to_csv() const;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

/// Mini-batch subgradient descent with a fresh seeded shuffle every epoch.
/// Row 0 describes the initialization. Throws TrainingDiverged when the
/// objective turns non-finite.
Trajectory train(const SyntheticTask& task, const TrainConfig& cfg);

/// One draw of the two-hypothesis example: f1 = 1/2 everywhere, f2 Bernoulli
/// with Pr[f2 = 1] = (1 + epsilon) / 2.
struct StylizedTrial {
  std::size_t ones;  // X, the number of unit losses of f2
  double oce_f1;
  double oce_f2;
};

StylizedTrial stylized_trial(std::size_t n, double epsilon, double alpha,
                             std::uint64_t trial_seed);

/// Fraction of trials in which empirical CVaR picks f2, i.e.
/// OCE_n(f2) <= OCE_n(f1). Trial t is seeded by derive_seed(seed, t), so the
/// result does not depend on `workers`.
double stylized_experiment(std::size_t n, double epsilon, double alpha, std::size_t trials,
                           std::uint64_t seed, unsigned workers = 1);

}  // namespace oce
