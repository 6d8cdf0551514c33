#include "oce/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <thread>

#include "oce/random.hpp"
#include "oce/risk.hpp"

namespace oce {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void fill_split(Dataset& out, std::size_t rows, std::span<const double> direction,
                const SyntheticTask& task, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = task.dimension;
  out.dimension = d;
  out.features.resize(rows * d);
  out.labels.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const int cls = unit(rng) < 0.5 ? 1 : 0;
    const double offset = (cls == 1 ? 0.5 : -0.5) * task.class_separation;
    for (std::size_t j = 0; j < d; ++j) {
      out.features[i * d + j] = offset * direction[j] + noise(rng);
    }
    out.labels[i] = unit(rng) < task.label_noise_rate ? 1 - cls : cls;
  }
}

double sigmoid(double s) {
  if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
  const double e = std::exp(s);
  return e / (1.0 + e);
}

// log(1 + exp(s)) - y s
double cross_entropy(double score, int label) {
  const double softplus = std::max(score, 0.0) + std::log1p(std::exp(-std::abs(score)));
  return softplus - (label == 1 ? score : 0.0);
}

double score_of(std::span<const double> params, std::span<const double> x) {
  double s = params[x.size()];
  for (std::size_t j = 0; j < x.size(); ++j) s += params[j] * x[j];
  return s;
}

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct RiskAndWeights {
  double value;
  std::vector<double> weights;  // d value / d loss_i
};

// Sample weights phi'(arg_i)/n, where arg_i = sign * (loss_i - lambda). At the
// kink of a piecewise-linear phi the weights are set so that they sum to one
// (the anchor's first-order condition), which gives the exact derivative of
// the optimal value whenever lambda* is interior.
std::vector<double> anchor_weights(std::span<const double> losses, const Disutility& phi,
                                   double lambda, double sign, double bound) {
  const std::size_t n = losses.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> w(n);
  const double left0 = phi.left_derivative(0.0);
  const double right0 = phi.right_derivative(0.0);
  const bool has_kink = left0 != right0;
  const double tol = 1e-9 * (1.0 + bound);

  std::vector<std::size_t> kinks;
  double assigned = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = sign * (losses[i] - lambda);
    if (has_kink && std::abs(arg) <= tol) {
      kinks.push_back(i);
      continue;
    }
    w[i] = phi.right_derivative(arg) * inv_n;
    assigned += w[i];
  }
  if (kinks.empty()) return w;

  const bool interior = lambda > 0.0 && lambda < bound;
  double share = right0 * inv_n;
  if (interior) {
    share = std::clamp((1.0 - assigned) / static_cast<double>(kinks.size()), left0 * inv_n,
                       right0 * inv_n);
  }
  for (std::size_t i : kinks) w[i] = share;
  return w;
}

RiskAndWeights risk_of(std::span<const double> losses, const TrainConfig& cfg,
                       bool want_weights) {
  const std::size_t n = losses.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  return std::visit(
      Overloaded{
          [&](const Erm&) {
            RiskAndWeights r{mean_of(losses), {}};
            if (want_weights) r.weights.assign(n, inv_n);
            return r;
          },
          [&](const Svp& svp) {
            const Moments m = loss_moments(LossVector({losses.begin(), losses.end()}, cfg.loss_clip_M));
            RiskAndWeights r{m.mean + svp.penalty_lambda * m.std, {}};
            if (want_weights) {
              const double denom = std::max(m.std, 1e-8);
              r.weights.resize(n);
              for (std::size_t i = 0; i < n; ++i) {
                r.weights[i] = inv_n * (1.0 + svp.penalty_lambda * (losses[i] - m.mean) / denom);
              }
            }
            return r;
          },
          [&](const Eom& eom) {
            const LossVector lv({losses.begin(), losses.end()}, cfg.loss_clip_M);
            const OceResult res = oce_empirical(lv, eom.spec);
            RiskAndWeights r{res.value, {}};
            if (want_weights) {
              r.weights = anchor_weights(losses, eom.spec, res.lambda_star, 1.0, cfg.loss_clip_M);
            }
            return r;
          },
          [&](const Eim& eim) {
            const LossVector lv({losses.begin(), losses.end()}, cfg.loss_clip_M);
            const OceResult res = inverted_oce_empirical(lv, eim.spec);
            RiskAndWeights r{res.value, {}};
            if (want_weights) {
              r.weights = anchor_weights(losses, eim.spec, res.lambda_star, -1.0, cfg.loss_clip_M);
            }
            return r;
          },
      },
      cfg.objective);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return rows;
}

double cvar_of(std::span<const double> losses, double alpha, double clip) {
  return oce_empirical(LossVector({losses.begin(), losses.end()}, clip), Disutility::cvar(alpha))
      .value;
}

}  // namespace

SyntheticData make_synthetic(const SyntheticTask& task) {
  if (task.dimension == 0 || task.n_train == 0 || task.n_test == 0) {
    throw DomainError("synthetic task needs positive sizes");
  }
  if (!(task.class_separation > 0.0)) throw DomainError("class_separation must be > 0");
  if (!(task.label_noise_rate >= 0.0 && task.label_noise_rate < 0.5)) {
    throw DomainError("label_noise_rate must lie in [0, 0.5)");
  }
  std::mt19937_64 rng(task.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> direction(task.dimension);
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& u : direction) u = normal(rng);
    norm = std::sqrt(std::inner_product(direction.begin(), direction.end(), direction.begin(), 0.0));
  }
  for (double& u : direction) u /= norm;

  SyntheticData data;
  fill_split(data.train, task.n_train, direction, task, rng);
  fill_split(data.test, task.n_test, direction, task, rng);
  return data;
}

void validate(const SyntheticTask& task, const TrainConfig& cfg) {
  if (task.dimension == 0 || task.n_train == 0 || task.n_test == 0) {
    throw DomainError("synthetic task needs positive sizes");
  }
  if (cfg.batch_size == 0 || cfg.batch_size > task.n_train) {
    throw DomainError("batch_size must lie in [1, n_train]");
  }
  if (cfg.epochs == 0) throw DomainError("epochs must be positive");
  if (!(cfg.learning_rate > 0.0)) throw DomainError("learning_rate must be > 0");
  if (!(cfg.loss_clip_M > 0.0)) throw DomainError("loss_clip_M must be > 0");
  if (!(cfg.init_scale >= 0.0)) throw DomainError("init_scale must be >= 0");
  if (const auto* svp = std::get_if<Svp>(&cfg.objective)) {
    if (!(svp->penalty_lambda >= 0.0)) throw DomainError("penalty_lambda must be >= 0");
  }
}

double evaluation_alpha(const Objective& objective) {
  const Disutility* spec = nullptr;
  if (const auto* e = std::get_if<Eom>(&objective)) spec = &e->spec;
  if (const auto* e = std::get_if<Eim>(&objective)) spec = &e->spec;
  if (spec) {
    if (const auto alpha = spec->quantile_fraction()) return *alpha;
  }
  return 0.2;
}

std::vector<double> clipped_losses(std::span<const double> params, const Dataset& data,
                                   std::span<const std::size_t> rows, double clip) {
  std::vector<double> out(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t i = rows[k];
    const double ce = cross_entropy(score_of(params, data.row(i)), data.labels[i]);
    if (std::isnan(ce)) throw TrainingDiverged("loss became non-finite");
    out[k] = std::min(ce, clip);
  }
  return out;
}

ObjectiveValue batch_objective(std::span<const double> params, const Dataset& data,
                               std::span<const std::size_t> batch, const TrainConfig& cfg) {
  if (batch.empty()) throw DomainError("empty batch");
  const std::size_t d = data.dimension;
  if (params.size() != d + 1) throw DomainError("parameter vector has the wrong size");

  std::vector<double> losses(batch.size());
  std::vector<double> dloss_dscore(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const std::size_t i = batch[k];
    const double s = score_of(params, data.row(i));
    const double ce = cross_entropy(s, data.labels[i]);
    if (std::isnan(ce)) throw TrainingDiverged("loss became non-finite");
    if (ce >= cfg.loss_clip_M) {
      losses[k] = cfg.loss_clip_M;
      dloss_dscore[k] = 0.0;
    } else {
      losses[k] = ce;
      dloss_dscore[k] = sigmoid(s) - static_cast<double>(data.labels[i]);
    }
  }

  const RiskAndWeights risk = risk_of(losses, cfg, true);
  ObjectiveValue out{risk.value, std::vector<double>(d + 1, 0.0)};
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double coef = risk.weights[k] * dloss_dscore[k];
    if (coef == 0.0) continue;
    const auto x = data.row(batch[k]);
    for (std::size_t j = 0; j < d; ++j) out.gradient[j] += coef * x[j];
    out.gradient[d] += coef;
  }
  return out;
}

std::string Trajectory::to_csv() const {
  std::string out = "epoch,train_mean,test_mean,train_cvar,test_cvar,train_std,objective_value\n";
  char line[256];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.epoch, r.train_mean,
                  r.test_mean, r.train_cvar, r.test_cvar, r.train_std, r.objective_value);
    out += line;
  }
  return out;
}

Trajectory train(const SyntheticTask& task, const TrainConfig& cfg) {
  validate(task, cfg);
  const SyntheticData data = make_synthetic(task);
  const std::size_t d = task.dimension;
  const double alpha = evaluation_alpha(cfg.objective);

  Params params(d + 1, 0.0);
  {
    std::mt19937_64 init_rng(derive_seed(cfg.seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::size_t j = 0; j < d; ++j) params[j] = cfg.init_scale * normal(init_rng);
  }
  std::mt19937_64 shuffle_rng(derive_seed(cfg.seed, 1));

  const auto train_rows = all_rows(data.train.size());
  const auto test_rows = all_rows(data.test.size());

  Trajectory traj;
  auto record = [&](std::size_t epoch) {
    const auto tr = clipped_losses(params, data.train, train_rows, cfg.loss_clip_M);
    const auto te = clipped_losses(params, data.test, test_rows, cfg.loss_clip_M);
    const Moments m = loss_moments(LossVector(tr, cfg.loss_clip_M));
    const double objective = risk_of(tr, cfg, false).value;
    if (!std::isfinite(objective)) {
      throw TrainingDiverged("objective became non-finite at epoch " + std::to_string(epoch));
    }
    traj.rows.push_back({epoch, mean_of(tr), mean_of(te), cvar_of(tr, alpha, cfg.loss_clip_M),
                         cvar_of(te, alpha, cfg.loss_clip_M), m.std, objective});
  };

  record(0);
  std::vector<std::size_t> order = train_rows;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      const ObjectiveValue ov = batch_objective(params, data.train, batch, cfg);
      if (!std::isfinite(ov.value)) {
        throw TrainingDiverged("batch objective became non-finite in epoch " +
                               std::to_string(epoch));
      }
      for (std::size_t j = 0; j <= d; ++j) params[j] -= cfg.learning_rate * ov.gradient[j];
    }
    record(epoch);
  }
  return traj;
}

StylizedTrial stylized_trial(std::size_t n, double epsilon, double alpha,
                             std::uint64_t trial_seed) {
  const double p_one = (1.0 + epsilon) / 2.0;
  std::uint64_t state = trial_seed;
  std::vector<double> f2(n);
  std::size_t ones = 0;
  for (double& v : f2) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    v = u < p_one ? 1.0 : 0.0;
    ones += v == 1.0;
  }
  const Disutility cvar = Disutility::cvar(alpha);
  const double oce1 = oce_empirical(LossVector(std::vector<double>(n, 0.5), 1.0), cvar).value;
  const double oce2 = oce_empirical(LossVector(std::move(f2), 1.0), cvar).value;
  return {ones, oce1, oce2};
}

double stylized_experiment(std::size_t n, double epsilon, double alpha, std::size_t trials,
                           std::uint64_t seed, unsigned workers) {
  if (n == 0 || trials == 0) throw DomainError("stylized experiment needs n, trials >= 1");
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw DomainError("epsilon must lie in (0, 0.5)");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");

  std::vector<unsigned char> picked(trials);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const StylizedTrial r = stylized_trial(n, epsilon, alpha, derive_seed(seed, t));
      picked[t] = r.oce_f2 <= r.oce_f1;
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    run(0, trials);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (trials + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(trials, begin + chunk);
      if (begin < end) pool.emplace_back(run, begin, end);
    }
  }
  const auto count = std::count(picked.begin(), picked.end(), 1);
  return static_cast<double>(count) / static_cast<double>(trials);
}

}  // namespace oce
