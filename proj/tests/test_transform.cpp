#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "herit/transform.hpp"

using namespace herit;

TEST_CASE("parameter counts") {
  const int twin_expected[] = {4, 9, 14, 19, 24};
  for (int m = 1; m <= 5; ++m)
    CHECK(parameter_count(FamilyDesign::twins, m) == twin_expected[m - 1]);
  const int trio_expected[] = {5, 11, 17, 23, 29, 35, 41};
  for (int m = 1; m <= 7; ++m)
    CHECK(parameter_count(FamilyDesign::trios, m) == trio_expected[m - 1]);
}

TEST_CASE("single-component twin layout") {
  TwinJointModel model;
  model.components = {{1.0, 21.0, 1.0, 0.0, 0.0}};
  const ParamVector theta = to_unconstrained(model);
  REQUIRE(theta.values.size() == 4);  // mu, log sigma, z(rho_MZ), z(rho_DZ)
  CHECK(theta.values(0) == doctest::Approx(21.0));
  CHECK(theta.values(1) == doctest::Approx(0.0));  // sigma = 1
  CHECK(theta.values(2) == doctest::Approx(0.0));  // rho = 0
  CHECK(theta.values(3) == doctest::Approx(0.0));
}

TEST_CASE("round trips are the identity on canonical models") {
  const auto twins = fixtures::twin_fixture();
  const auto twins_back = to_natural_twins(to_unconstrained(twins));
  REQUIRE(twins_back.size() == twins.size());
  for (int k = 0; k < twins.size(); ++k) {
    CHECK(std::abs(twins_back.components[k].weight - twins.components[k].weight) < 1e-10);
    CHECK(std::abs(twins_back.components[k].mean - twins.components[k].mean) < 1e-10);
    CHECK(std::abs(twins_back.components[k].sd - twins.components[k].sd) < 1e-10);
    CHECK(std::abs(twins_back.components[k].rho_mz - twins.components[k].rho_mz) < 1e-10);
    CHECK(std::abs(twins_back.components[k].rho_dz - twins.components[k].rho_dz) < 1e-10);
  }

  const auto trios = fixtures::trio_fixture();
  const auto trios_back = to_natural_trios(to_unconstrained(trios));
  for (int k = 0; k < trios.size(); ++k) {
    CHECK(std::abs(trios_back.components[k].weight - trios.components[k].weight) < 1e-10);
    CHECK(std::abs(trios_back.components[k].mean - trios.components[k].mean) < 1e-10);
    CHECK(std::abs(trios_back.components[k].sd - trios.components[k].sd) < 1e-10);
    CHECK(std::abs(trios_back.components[k].rho_mf - trios.components[k].rho_mf) < 1e-10);
    CHECK(std::abs(trios_back.components[k].rho_mc - trios.components[k].rho_mc) < 1e-10);
    CHECK(std::abs(trios_back.components[k].rho_fc - trios.components[k].rho_fc) < 1e-10);
  }
}

TEST_CASE("the inverse map restores canonical order") {
  // components stored wide-first in theta come back sorted by spread
  ParamVector theta;
  theta.m = 2;
  theta.design = FamilyDesign::twins;
  theta.values.resize(9);
  theta.values << 22.2, 21.2,                       // means
      std::log(1.26), std::log(0.63),               // spreads, descending
      std::atanh(0.70), std::atanh(0.75),           // rho MZ
      std::atanh(-0.04), std::atanh(0.28),          // rho DZ
      std::log(0.81 / 0.19);                        // weight logit
  const auto model = to_natural_twins(theta);
  CHECK(model.components[0].sd == doctest::Approx(0.63));
  CHECK(model.components[1].sd == doctest::Approx(1.26));
  CHECK(model.components[0].weight == doctest::Approx(0.81));
  CHECK(model.components[0].rho_mz == doctest::Approx(0.75));
}

TEST_CASE("non-finite parameters are rejected") {
  ParamVector theta;
  theta.m = 1;
  theta.design = FamilyDesign::twins;
  theta.values = Eigen::VectorXd::Zero(4);
  theta.values(2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(to_natural_twins(theta), model_error);

  ParamVector mismatch;
  mismatch.m = 2;
  mismatch.design = FamilyDesign::trios;
  mismatch.values = Eigen::VectorXd::Zero(4);
  CHECK_THROWS_AS(to_natural_trios(mismatch), model_error);
}

TEST_CASE("weight transform") {
  Eigen::VectorXd w(3);
  w << 0.2, 0.5, 0.3;
  const Eigen::VectorXd logits = logits_from_weights(w);
  const Eigen::VectorXd back = weights_from_logits(logits, 3);
  for (int k = 0; k < 3; ++k) CHECK(back(k) == doctest::Approx(w(k)).epsilon(1e-14));
  CHECK(back.sum() == doctest::Approx(1.0).epsilon(1e-15));
}
