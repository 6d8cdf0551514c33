#include <doctest.h>

#include <cmath>
#include <vector>

#include "oce/errors.hpp"
#include "oce/influence.hpp"
#include "oracles.hpp"

using namespace oce;
using oce::testing::InstanceGen;

namespace {

// Relative comparison with an absolute floor for values near zero.
bool close_rel(double got, double want, double rel, double floor = 1e-2) {
  return std::abs(got - want) <= rel * std::max(std::abs(want), floor);
}

}  // namespace

TEST_CASE("empirical influence examples") {
  const LossVector mean_two({1.0, 3.0}, 3.0);
  for (double eps : {1e-6, 1e-3, 0.1}) {
    CHECK(empirical_influence(mean_two, Disutility::identity(), {5.0, eps}) ==
          doctest::Approx(3.0).epsilon(1e-8));
  }
  CHECK(empirical_influence(mean_two, Disutility::mean_variance(0.25), {2.0, 1e-6}) ==
        doctest::Approx(0.25).epsilon(1e-3));

  const LossVector zero_two({0.0, 2.0}, 2.0);
  double last = -1.0;
  for (double z : {1.0, 5.0, 20.0, 50.0}) {
    const double v = empirical_influence(zero_two, Disutility::entropic(1.0), {z, 1e-6});
    CHECK(v > last);
    CHECK(v <= 1.0 + 1e-3);
    last = v;
  }
  CHECK(last == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("empirical influence validates its query") {
  const LossVector v({1.0, 2.0}, 2.0);
  CHECK_THROWS_AS(empirical_influence(v, Disutility::identity(), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(empirical_influence(v, Disutility::identity(), {1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(empirical_influence(v, Disutility::identity(), {-1.0, 1e-6}), DomainError);
}

TEST_CASE("closed-form influence examples") {
  DistributionSummary ent;
  ent.neg_exp_moment = std::exp(-2.0);
  CHECK(closed_form_influence(Disutility::entropic(1.0), ent, 2.0) ==
        doctest::Approx(0.0).scale(1.0));

  DistributionSummary mv;
  mv.mean = 2.0;
  mv.variance = 1.0;
  CHECK(closed_form_influence(Disutility::mean_variance(0.25), mv, 2.0) ==
        doctest::Approx(0.25));

  DistributionSummary unif;
  unif.quantile = 0.5;
  unif.lower_shortfall = 0.125;
  unif.continuous = true;
  CHECK(closed_form_influence(Disutility::cvar(0.5), unif, 0.0) == doctest::Approx(-0.75));

  DistributionSummary id;
  id.mean = 2.0;
  CHECK(closed_form_influence(Disutility::identity(), id, 5.0) == doctest::Approx(3.0));
}

TEST_CASE("closed forms refuse missing or inappropriate summaries") {
  DistributionSummary discrete;
  discrete.quantile = 0.5;
  discrete.lower_shortfall = 0.125;
  try {
    closed_form_influence(Disutility::cvar(0.5), discrete, 0.0);
    FAIL("expected a continuity error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("continuity assumption violated") != std::string::npos);
  }
  const DistributionSummary empty;
  CHECK_THROWS_AS(closed_form_influence(Disutility::entropic(1.0), empty, 1.0), DomainError);
  CHECK_THROWS_AS(closed_form_influence(Disutility::mean_variance(0.1), empty, 1.0), DomainError);
  CHECK_THROWS_AS(closed_form_influence(Disutility::soft_cvar(2.0, 0.5), empty, 1.0),
                  DomainError);
  CHECK_FALSE(has_closed_form_influence(Disutility::soft_cvar(2.0, 0.5)));
  CHECK(has_closed_form_influence(Disutility::cvar(0.5)));
}

TEST_CASE("influence upper bounds") {
  const DistributionSummary empty;
  CHECK(influence_bound(Disutility::entropic(4.0), empty) == doctest::Approx(0.25));
  DistributionSummary mv;
  mv.variance = 1.0;
  CHECK(influence_bound(Disutility::mean_variance(0.5), mv) == doctest::Approx(2.0));
  DistributionSummary cv;
  cv.lower_shortfall = 0.125;
  CHECK(influence_bound(Disutility::cvar(0.5), cv) == doctest::Approx(0.25));
  CHECK(std::isinf(influence_bound(Disutility::identity(), empty)));
  CHECK_THROWS_AS(influence_bound(Disutility::mean_variance(0.5), empty), DomainError);
  CHECK_THROWS_AS(influence_bound(Disutility::cvar(0.5), empty), DomainError);
  CHECK_THROWS_AS(influence_bound(Disutility::soft_cvar(2.0, 0.5), empty), DomainError);
}

TEST_CASE("empirical summaries") {
  const LossVector v({4.0, 1.0, 3.0, 2.0}, 4.0);
  const auto half = summarize(v, Disutility::cvar(0.5));
  CHECK(*half.mean == doctest::Approx(2.5));
  CHECK(*half.variance == doctest::Approx(1.25));
  CHECK(*half.quantile == 2.0);
  CHECK(*half.lower_shortfall == doctest::Approx(0.25));
  CHECK_FALSE(half.continuous);
  CHECK(*summarize(v, Disutility::cvar(0.6)).quantile == 3.0);
  CHECK(*summarize(v, Disutility::cvar(1.0)).quantile == 4.0);
  const auto ent = summarize(v, Disutility::entropic(1.0));
  CHECK(*ent.neg_exp_moment ==
        doctest::Approx((std::exp(-1.0) + std::exp(-2.0) + std::exp(-3.0) + std::exp(-4.0)) / 4));
}

TEST_CASE("empirical influence converges to the smooth closed forms") {
  InstanceGen gen(101);
  for (int trial = 0; trial < 200; ++trial) {
    const double M = gen.uniform(0.5, 5.0);
    const LossVector losses(gen.losses(gen.integer(2, 40), M), M);
    const double z = gen.uniform(0.0, M);
    const Disutility phi = trial % 2 == 0
                               ? Disutility::entropic(gen.uniform(0.1, 3.0))
                               : Disutility::mean_variance(gen.uniform(0.01, 1.0) / (2.0 * M));
    CAPTURE(phi.to_string());
    CAPTURE(z);
    const double emp = empirical_influence(losses, phi, {z, 1e-6});
    const double exact = closed_form_influence(phi, summarize(losses, phi), z);
    CHECK(close_rel(emp, exact, 1e-3));
  }
}

TEST_CASE("identity influence is the centered loss") {
  InstanceGen gen(102);
  for (int trial = 0; trial < 50; ++trial) {
    const double M = gen.uniform(0.5, 5.0);
    const LossVector losses(gen.losses(gen.integer(1, 40), M), M);
    const double z = gen.uniform(0.0, 2.0 * M);
    const auto phi = Disutility::identity();
    CHECK(empirical_influence(losses, phi, {z, 1e-6}) ==
          doctest::Approx(closed_form_influence(phi, summarize(losses, phi), z)).epsilon(1e-6));
  }
}

TEST_CASE("empirical influence respects the upper bounds") {
  InstanceGen gen(103);
  for (int trial = 0; trial < 300; ++trial) {
    const double M = gen.uniform(0.5, 5.0);
    const std::size_t n = gen.integer(2, 40);
    const LossVector losses(gen.losses(n, M), M);
    Disutility phi = Disutility::identity();
    double z = 0.0;
    switch (trial % 3) {
      case 0:
        phi = Disutility::entropic(gen.uniform(0.1, 3.0));
        z = gen.uniform(0.0, 1e7);
        break;
      case 1:
        phi = Disutility::mean_variance(gen.uniform(0.01, 1.0) / (2.0 * M));
        z = gen.uniform(0.0, M);
        break;
      default: {
        // Keep n alpha away from an integer so the anchor is a unique atom.
        double alpha = gen.uniform(0.05, 1.0);
        while (std::abs(n * alpha - std::round(n * alpha)) < 1e-3) alpha = gen.uniform(0.05, 1.0);
        phi = Disutility::cvar(alpha);
        z = gen.uniform(0.0, M);
        break;
      }
    }
    CAPTURE(phi.to_string());
    CAPTURE(z);
    const double emp = empirical_influence(losses, phi, {z, 1e-6});
    CHECK(emp <= influence_bound(phi, summarize(losses, phi)) + 1e-3);
  }
}

TEST_CASE("CVaR closed form matches a discretized uniform distribution") {
  const std::size_t n = 100000;
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = (static_cast<double>(i) + 0.5) / n;
  const LossVector uniform(std::move(grid), 1.0);
  DistributionSummary exact;
  exact.continuous = true;
  for (double alpha : {0.25, 0.5}) {
    exact.quantile = alpha;
    exact.lower_shortfall = alpha * alpha / 2.0;
    const auto phi = Disutility::cvar(alpha);
    for (double z : {0.0, 0.1, 0.3, 0.6, 1.0}) {
      CAPTURE(alpha);
      CAPTURE(z);
      const double emp = empirical_influence(uniform, phi, {z, 1e-6});
      CHECK(std::abs(emp - closed_form_influence(phi, exact, z)) <= 1e-2);
    }
  }
}
