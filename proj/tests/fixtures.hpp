#pragma once

// Shared parameter fixtures used across the test suites: a two-component
// twin model, a four-component trio model and a three-component bivariate
// mixture with a dominant wide component.

#include "herit/mixture.hpp"

namespace fixtures {

inline herit::TwinJointModel twin_fixture() {
  herit::TwinJointModel m;
  m.components = {
      {0.81, 21.20, 0.63, 0.75, 0.28},
      {0.19, 22.20, 1.26, 0.70, -0.04},
  };
  herit::validate(m);
  return m;
}

inline herit::TrioMixture trio_fixture() {
  herit::TrioMixture m;
  // components carry (weight, mean, sd, rho_MF, rho_MC, rho_FC)
  m.components = {
      {0.636, 3516.0, 440.5, -0.011, 0.240, 0.134},
      {0.231, 3687.0, 572.9, -0.084, 0.143, 0.053},
      {0.126, 3093.0, 690.5, -0.289, -0.189, -0.254},
      {0.007, 2243.0, 1116.0, 0.750, -0.826, -0.845},
  };
  herit::validate(m);
  return m;
}

inline herit::BivariateMixture threecomp_fixture() {
  herit::BivariateMixture m;
  m.relationship = herit::Relationship::pair;
  m.components = {
      {0.3, 1.0, 2.0, 0.7},
      {0.3, 2.0, 4.0, 0.8},
      {0.4, 4.0, 6.0, 0.6},
  };
  herit::validate(m);
  return m;
}

}  // namespace fixtures
