#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "herit/curves.hpp"
#include "oracles.hpp"

using namespace herit;

TEST_CASE("single-component correlation curve is constant") {
  BivariateMixture model;
  model.components = {{1.0, 0.4, 1.7, 0.7}};
  const Eigen::VectorXd grid = default_grid(global_moments(model));
  const auto curve = correlation_curve(model, grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i)
    CHECK(std::abs(curve.value(i) - 0.7) <= 1e-12);
}

TEST_CASE("three-component fixture: far tails and interior peak") {
  const auto model = fixtures::threecomp_fixture();
  const auto g = global_moments(model);
  const double sd = g.sd();

  CHECK(correlation_at(model, -1000.0, sd) == doctest::Approx(0.5062).epsilon(2e-3));
  CHECK(correlation_at(model, 1000.0, sd) == doctest::Approx(0.5062).epsilon(2e-3));

  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(201, -5.0, 8.0);
  const auto curve = correlation_curve(model, grid);
  Eigen::Index argmax = 0;
  curve.value.maxCoeff(&argmax);
  CHECK(grid(argmax) > 1.5);
  CHECK(grid(argmax) < 2.5);
}

TEST_CASE("tail limits of the three-component fixture") {
  const auto model = fixtures::threecomp_fixture();
  const auto tails = tail_limits(model);
  CHECK(tails.tail_case == TailCase::one);
  CHECK(tails.left.dominant == 2);
  CHECK(tails.right.dominant == 2);
  CHECK(tails.left.rho_tilde == doctest::Approx(0.5062).epsilon(2e-3));
  CHECK(tails.left.rho_tilde == tails.right.rho_tilde);
  CHECK(tails.left.slope == doctest::Approx(0.6));
  CHECK(tails.left.variance == doctest::Approx(36.0 * (1.0 - 0.36)));

  const auto g = global_moments(model);
  for (double y : {g.mean - 50.0 * g.sd(), g.mean + 50.0 * g.sd()})
    CHECK(std::abs(correlation_at(model, y, g.sd()) - tails.left.rho_tilde) < 1e-3);
}

TEST_CASE("equal spreads split the tails by component means") {
  BivariateMixture model;
  model.components = {{0.5, -1.0, 1.5, 0.3}, {0.5, 2.0, 1.5, 0.8}};
  const auto tails = tail_limits(model);
  CHECK(tails.tail_case == TailCase::two);
  CHECK(tails.left.dominant == 0);
  CHECK(tails.right.dominant == 1);
  CHECK(tails.left.slope == doctest::Approx(0.3));
  CHECK(tails.right.slope == doctest::Approx(0.8));

  // spreads equal only up to 1e-9 relative still count as tied
  BivariateMixture near;
  near.components = {{0.5, -1.0, 1.5, 0.3}, {0.5, 2.0, 1.5 * (1.0 + 1e-10), 0.8}};
  const auto near_tails = tail_limits(near);
  CHECK(near_tails.tail_case == TailCase::two);
  CHECK(near_tails.left.dominant == 0);
}

TEST_CASE("equal-spread limits match the variance-ratio formula") {
  // gamma = 3 with means at +-sqrt(3)
  const double a = std::sqrt(3.0);
  BivariateMixture model;
  model.components = {{0.5, -a, 1.0, 0.5}, {0.5, a, 1.0, 0.8}};
  CHECK(equal_spread_variance_ratio(model) == doctest::Approx(3.0).epsilon(1e-12));

  const auto tails = tail_limits(model);
  CHECK(tails.left.rho_tilde == doctest::Approx(0.7559).epsilon(1e-4 / 0.7559));
  const double gamma = equal_spread_variance_ratio(model);
  CHECK(std::abs(tails.left.rho_tilde -
                 equal_spread_tail_correlation(0.5, gamma)) < 1e-10);
  CHECK(std::abs(tails.right.rho_tilde -
                 equal_spread_tail_correlation(0.8, gamma)) < 1e-10);
}

TEST_CASE("all components identical in location: limits reduce to the rhos") {
  BivariateMixture model;
  model.components = {{0.5, 1.0, 2.0, 0.3}, {0.5, 1.0, 2.0, 0.7}};
  CHECK(equal_spread_variance_ratio(model) == doctest::Approx(0.0));
  const auto tails = tail_limits(model);
  CHECK(std::abs(tails.left.rho_tilde - 0.3) <= 1e-12);
  CHECK(std::abs(tails.right.rho_tilde - 0.7) <= 1e-12);
}

TEST_CASE("correlation curve converges to its tail limits") {
  SubstreamRng rng(555, 3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto model = oracles::random_mixture(rng);
    const auto g = global_moments(model);
    const auto tails = tail_limits(model);
    CHECK(std::abs(correlation_at(model, g.mean - 50.0 * g.sd(), g.sd()) -
                   tails.left.rho_tilde) < 1e-3);
    CHECK(std::abs(correlation_at(model, g.mean + 50.0 * g.sd(), g.sd()) -
                   tails.right.rho_tilde) < 1e-3);
  }
}

TEST_CASE("limit routes agree whenever all spreads tie") {
  SubstreamRng rng(777, 9);
  for (int rep = 0; rep < 20; ++rep) {
    auto model = oracles::random_mixture(rng);
    const double sd0 = model.components.front().sd;
    for (auto& c : model.components) c.sd = sd0;  // force the tie
    canonicalize(model);
    const double gamma = equal_spread_variance_ratio(model);
    const auto tails = tail_limits(model);
    CHECK(std::abs(tails.left.rho_tilde -
                   equal_spread_tail_correlation(model.components.front().rho,
                                                 gamma)) < 1e-10);
    CHECK(std::abs(tails.right.rho_tilde -
                   equal_spread_tail_correlation(model.components.back().rho,
                                                 gamma)) < 1e-10);
  }
}

TEST_CASE("curve evaluation is safe from concurrent threads") {
  const auto model = fixtures::threecomp_fixture();
  const Eigen::VectorXd grid = default_grid(global_moments(model), 101);
  const auto serial = correlation_curve(model, grid);

  std::vector<CurveSeries> results(4);
  std::vector<std::thread> workers;
  for (auto& slot : results)
    workers.emplace_back(
        [&model, &grid, &slot]() { slot = correlation_curve(model, grid); });
  for (auto& w : workers) w.join();
  for (const auto& r : results) CHECK(r.value == serial.value);
}

TEST_CASE("trio pair margins") {
  const auto trio = fixtures::trio_fixture();

  const auto mc = trio_pair_margin(trio, Relationship::mc);
  REQUIRE(mc.size() == 4);
  CHECK(mc.components[0].rho == doctest::Approx(0.240));
  CHECK(mc.components[1].rho == doctest::Approx(0.143));
  CHECK(mc.components[2].rho == doctest::Approx(-0.189));
  CHECK(mc.components[3].rho == doctest::Approx(-0.826));

  const auto mf = trio_pair_margin(trio, Relationship::mf);
  CHECK(mf.components[0].rho == doctest::Approx(-0.011));
  CHECK(mf.components[1].rho == doctest::Approx(-0.084));
  CHECK(mf.components[2].rho == doctest::Approx(-0.289));
  CHECK(mf.components[3].rho == doctest::Approx(0.750));

  // weights, means and spreads carry over
  for (int k = 0; k < 4; ++k) {
    CHECK(mc.components[k].weight == trio.components[k].weight);
    CHECK(mc.components[k].mean == trio.components[k].mean);
    CHECK(mc.components[k].sd == trio.components[k].sd);
  }

  CHECK_THROWS_AS(trio_pair_margin(trio, Relationship::mz), model_error);

  TrioMixture single;
  single.components = {{1.0, 5.0, 2.0, 0.1, 0.3, 0.2}};
  const auto margin = trio_pair_margin(single, Relationship::fc);
  CHECK(margin.components[0].rho == doctest::Approx(0.2));
  validate(margin);  // exchangeable bivariate Gaussian by construction
}
