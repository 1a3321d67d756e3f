#pragma once

#include "windlab/report.hpp"

namespace windlab {

// Invariant suite for one scenario as configured; used by `windlab verify`.
std::vector<Check> verify_scenario(const Scenario& scen);

// Acceptance criteria with pinned tolerances. k in 1..8.
std::vector<Check> acceptance_criterion(int k, int threads);
std::string acceptance_criterion_name(int k);
inline constexpr int kAcceptanceCriteria = 8;

bool all_pass(const std::vector<Check>& checks);

}  // namespace windlab
