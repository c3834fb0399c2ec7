#pragma once
// Umbrella header for the CLAW library: finite-sample FDR control with side
// information via pairwise-exchangeable conformity scores and a mirror
// threshold, plus baselines and a seeded simulation harness.

#include "claw/aggregate.hpp"
#include "claw/baselines.hpp"
#include "claw/distributions.hpp"
#include "claw/error.hpp"
#include "claw/estimators.hpp"
#include "claw/io.hpp"
#include "claw/mirror.hpp"
#include "claw/pipeline.hpp"
#include "claw/rng.hpp"
#include "claw/semisup.hpp"
#include "claw/sim.hpp"
#include "claw/types.hpp"
#include "claw/weights.hpp"

namespace claw {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace claw
