#pragma once

#include "hspace/spaces.hpp"

namespace hspace::testing {

inline HSpaceConfig config_321() {
  HSpaceConfig c;
  c.family = Family::k321;
  c.lambda = 0.7;
  c.c = 0.3;
  c.functions = {{"theta", "sin(x3)+x5"}, {"omega", "x5*x6"}};
  return c;
}

inline HSpaceConfig config_3_21() {
  HSpaceConfig c;
  c.family = Family::k3_21;
  c.epsilon = 1;
  c.lambda = 5.0;
  c.c = 0.0;
  c.functions = {{"theta", "sin(x3)"}, {"omega", "x5*x6"}};
  return c;
}

inline HSpaceConfig config_32_1() {
  HSpaceConfig c;
  c.family = Family::k32_1;
  c.lambda = -1.0;
  c.functions = {{"f6", "x6"}, {"omega", "x3*x5"}};
  return c;
}

inline HSpaceConfig config_flat() {
  HSpaceConfig c;
  c.family = Family::k321;
  c.functions = {{"theta", "0"}, {"omega", "0"}};
  return c;
}

inline std::vector<HSpaceConfig> generic_configs() { return {config_321(), config_3_21(), config_32_1()}; }

inline std::vector<Point6> sample(const HSpace& space, int n, std::uint64_t seed = 42) {
  Sampler s(seed);
  return sample_admissible(space, default_box(space), s, n);
}

}  // namespace hspace::testing
