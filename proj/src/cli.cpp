#include "oce/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "oce/bounds.hpp"
#include "oce/disutility.hpp"
#include "oce/errors.hpp"
#include "oce/influence.hpp"
#include "oce/io.hpp"
#include "oce/risk.hpp"
#include "oce/trainer.hpp"

namespace oce::cli {

namespace {

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string num(const std::optional<double>& x) { return x ? num(*x) : "NA"; }

Disutility parse_phi_flag(const std::string& text) {
  try {
    return Disutility::parse(text);
  } catch (const DomainError& e) {
    throw DomainError(std::string("--phi: ") + e.what());
  }
}

LossVector load_losses(const std::string& path, const std::optional<double>& bound) {
  std::vector<double> values = read_loss_csv(path);
  if (bound) return LossVector(std::move(values), *bound);
  return LossVector::with_max_bound(std::move(values));
}

void ensure_writable(const std::string& path) {
  std::ofstream probe(path, std::ios::app);
  if (!probe) throw IoError("cannot open '" + path + "' for writing");
}

void emit_csv(std::ostream& out, const std::optional<std::string>& path, const std::string& csv) {
  out << csv;
  if (path) write_text_file(*path, csv);
}

struct EvalArgs {
  std::string phi;
  std::string losses;
  std::optional<double> bound_m;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const Disutility phi = parse_phi_flag(a.phi);
  const LossVector losses = load_losses(a.losses, a.bound_m);
  const OceResult oce = oce_empirical(losses, phi);
  const OceResult roce = inverted_oce_empirical(losses, phi);
  const Moments m = loss_moments(losses);
  out << "oce=" << num(oce.value) << " lambda_star=" << num(oce.lambda_star)
      << " roce=" << num(roce.value) << "\n";
  out << "roce_lambda_star=" << num(roce.lambda_star) << " mean=" << num(m.mean)
      << " std=" << num(m.std) << " bound_m=" << num(losses.bound()) << "\n";
}

struct InfluenceArgs {
  std::string phi;
  std::string losses;
  double z_loss = 0.0;
  double epsilon = 1e-6;
  std::optional<double> bound_m;
  std::optional<std::string> out;
};

void run_influence(const InfluenceArgs& a, std::ostream& out) {
  const Disutility phi = parse_phi_flag(a.phi);
  const LossVector losses = load_losses(a.losses, a.bound_m);
  if (a.out) ensure_writable(*a.out);
  const double empirical = empirical_influence(losses, phi, {a.z_loss, a.epsilon});
  const DistributionSummary dist = summarize(losses, phi);

  std::optional<double> closed;
  if (has_closed_form_influence(phi) && (dist.continuous || !phi.is<CVaR>())) {
    closed = closed_form_influence(phi, dist, a.z_loss);
  }
  std::optional<double> bound;
  if (has_influence_bound(phi)) bound = influence_bound(phi, dist);

  emit_csv(out, a.out,
           "empirical,closed_form,upper_bound\n" + num(empirical) + "," + num(closed) + "," +
               num(bound) + "\n");
}

struct BoundsArgs {
  std::string matrix;
  double lip = 1.0;
  double delta = 0.05;
  std::size_t draws = 1000;
  std::uint64_t seed = 0;
  std::optional<double> bound_m;
  std::optional<double> n;
  std::optional<std::string> phi;
  unsigned workers = 1;
  std::optional<std::string> out;
};

void run_bounds(const BoundsArgs& a, std::ostream& out) {
  std::optional<Disutility> phi;
  if (a.phi) phi = parse_phi_flag(*a.phi);
  auto rows = read_loss_matrix(a.matrix);
  double bound = 0.0;
  for (const auto& r : rows) bound = std::max(bound, *std::max_element(r.begin(), r.end()));
  if (a.bound_m) bound = *a.bound_m;
  if (bound == 0.0) bound = 1.0;
  const FiniteClassLosses cls(rows, bound);
  if (a.out) ensure_writable(*a.out);

  const RademacherEstimate rad = rademacher_mc(cls, a.draws, a.seed, a.workers);

  // Plug-in moments: the empirical risk minimizer stands in for f_avg.
  std::size_t best = 0;
  double best_mean = INFINITY;
  std::vector<Moments> moments;
  for (std::size_t h = 0; h < cls.hypotheses(); ++h) {
    moments.push_back(loss_moments(LossVector(rows[h], bound)));
    if (moments.back().mean < best_mean) {
      best_mean = moments.back().mean;
      best = h;
    }
  }

  BoundInputs b;
  b.lip = a.lip;
  b.rad = std::max(rad.estimate, 0.0);
  b.M = bound;
  b.n = a.n ? *a.n : static_cast<double>(cls.samples());
  b.delta = a.delta;
  b.r_avg = moments[best].mean;
  b.sigma_avg = moments[best].std;
  if (phi) {
    std::size_t eim = 0;
    double best_roce = INFINITY;
    for (std::size_t h = 0; h < cls.hypotheses(); ++h) {
      const double v = inverted_oce_empirical(LossVector(rows[h], bound), *phi).value;
      if (v < best_roce) {
        best_roce = v;
        eim = h;
      }
    }
    b.sigma_n_eim = moments[eim].std;
  }
  const BoundReport r = bound_report(b);
  emit_csv(out, a.out,
           "uniform_conv,excess_oce,naive_expected_loss,eom_expected_loss,eim_expected_loss,rad,"
           "mc_std_error\n" +
               num(r.uniform_conv) + "," + num(r.excess_oce) + "," + num(r.naive_expected_loss) +
               "," + num(r.eom_expected_loss) + "," + num(r.eim_expected_loss) + "," +
               num(rad.estimate) + "," + num(rad.mc_std_error) + "\n");
}

struct BracketArgs {
  std::uint64_t n = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::optional<std::string> out;
};

void run_bracket(const BracketArgs& a, std::ostream& out) {
  if (a.out) ensure_writable(*a.out);
  const Bracket br = excess_risk_bracket(a.n, a.epsilon, a.alpha);
  emit_csv(out, a.out,
           "lower,exact,upper\n" + num(br.lower) + "," + num(br.exact) + "," + num(br.upper) + "\n");
}

struct TrainArgs {
  std::string config;
  std::string out;
};

void run_train(const TrainArgs& a, std::ostream& out) {
  const ExperimentConfig cfg = read_experiment_config(a.config);
  ensure_writable(a.out);
  const Trajectory traj = train(cfg.task, cfg.train);
  write_text_file(a.out, traj.to_csv());
  const TrajectoryRow& first = traj.rows.front();
  const TrajectoryRow& last = traj.rows.back();
  out << "epochs=" << last.epoch << " objective " << num(first.objective_value) << " -> "
      << num(last.objective_value) << " test_mean=" << num(last.test_mean)
      << " test_cvar=" << num(last.test_cvar) << "\n";
}

struct StylizedArgs {
  std::size_t n = 0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::size_t trials = 100000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

void run_stylized(const StylizedArgs& a, std::ostream& out) {
  const double delta = stylized_experiment(a.n, a.epsilon, a.alpha, a.trials, a.seed, a.workers);
  const double exact = binomial_tail_exact(a.n, (1.0 + a.epsilon) / 2.0,
                                           std::floor(static_cast<double>(a.n) * a.alpha / 2.0 + 1e-9));
  out << "empirical_delta=" << num(delta) << " exact=" << num(exact) << " trials=" << a.trials
      << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimized-certainty-equivalent risk toolkit", "oce"};
  app.require_subcommand(1);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Empirical OCE and inverted OCE of a loss sample");
  eval_cmd->add_option("--phi", eval.phi, "Disutility spec (identity, entropic:G, meanvar:C, cvar:A, softcvar:G1,G2)")->required();
  eval_cmd->add_option("--losses", eval.losses, "Loss CSV, one value per line")->required();
  eval_cmd->add_option("--bound-m", eval.bound_m, "Loss bound M (default: largest loss)");

  InfluenceArgs infl;
  auto* infl_cmd = app.add_subcommand("influence", "Influence function of the inverted OCE");
  infl_cmd->add_option("--phi", infl.phi, "Disutility spec")->required();
  infl_cmd->add_option("--losses", infl.losses, "Loss CSV, one value per line")->required();
  infl_cmd->add_option("--z-loss", infl.z_loss, "Loss value of the contaminating point")->required();
  infl_cmd->add_option("--epsilon", infl.epsilon, "Contamination weight")->capture_default_str();
  infl_cmd->add_option("--bound-m", infl.bound_m, "Loss bound M (default: largest loss)");
  infl_cmd->add_option("--out", infl.out, "Also write the CSV to this file");

  BoundsArgs bnd;
  auto* bnd_cmd = app.add_subcommand("bounds", "Generalization bounds for a finite hypothesis class");
  bnd_cmd->add_option("--loss-matrix", bnd.matrix, "CSV of losses, one hypothesis per row")->required();
  bnd_cmd->add_option("--lip", bnd.lip, "Lipschitz constant of the disutility")->required();
  bnd_cmd->add_option("--delta", bnd.delta, "Confidence parameter in (0, 1]")->required();
  bnd_cmd->add_option("--draws", bnd.draws, "Monte-Carlo sign draws")->capture_default_str();
  bnd_cmd->add_option("--seed", bnd.seed, "Root seed of the sign draws")->capture_default_str();
  bnd_cmd->add_option("--bound-m", bnd.bound_m, "Loss bound M (default: largest entry)");
  bnd_cmd->add_option("--n", bnd.n, "Sample size override (default: number of columns)");
  bnd_cmd->add_option("--phi", bnd.phi, "Disutility spec selecting the inverted-OCE minimizer");
  bnd_cmd->add_option("--workers", bnd.workers, "Worker threads for the sign draws")->capture_default_str();
  bnd_cmd->add_option("--out", bnd.out, "Also write the CSV to this file");

  BracketArgs br;
  auto* br_cmd = app.add_subcommand("bracket", "Bracket on the two-hypothesis excess-risk probability");
  br_cmd->add_option("--n", br.n, "Sample size")->required();
  br_cmd->add_option("--epsilon", br.epsilon, "Gap epsilon in (0, 0.5)")->required();
  br_cmd->add_option("--alpha", br.alpha, "CVaR level in (0, 1]")->required();
  br_cmd->add_option("--out", br.out, "Also write the CSV to this file");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train", "Risk-sensitive training on a synthetic task");
  tr_cmd->add_option("--config", tr.config, "Experiment JSON")->required();
  tr_cmd->add_option("--out", tr.out, "Trajectory CSV output")->required();

  StylizedArgs st;
  auto* st_cmd = app.add_subcommand("stylized", "Monte-Carlo two-hypothesis experiment");
  st_cmd->add_option("--n", st.n, "Sample size")->required();
  st_cmd->add_option("--epsilon", st.epsilon, "Gap epsilon in (0, 0.5)")->required();
  st_cmd->add_option("--alpha", st.alpha, "CVaR level in (0, 1]")->required();
  st_cmd->add_option("--trials", st.trials, "Number of trials")->capture_default_str();
  st_cmd->add_option("--seed", st.seed, "Root seed")->capture_default_str();
  st_cmd->add_option("--workers", st.workers, "Worker threads")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }

  try {
    if (*eval_cmd) run_eval(eval, out);
    if (*infl_cmd) run_influence(infl, out);
    if (*bnd_cmd) run_bounds(bnd, out);
    if (*br_cmd) run_bracket(br, out);
    if (*tr_cmd) run_train(tr, out);
    if (*st_cmd) run_stylized(st, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  }
  return kOk;
}

}  // namespace oce::cli
