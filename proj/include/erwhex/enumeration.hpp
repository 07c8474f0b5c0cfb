#pragma once

// Exhaustive enumeration of the walk's literal step rule: every past index T,
// the copy/reverse/innovate branch and every innovation value. Shares no code
// with the closed-form kernel or the count-chain DP, so it can certify both.

#include <vector>

#include "erwhex/lattice.hpp"
#include "erwhex/oracle.hpp"
#include "erwhex/walk.hpp"

namespace erwhex::enumeration {

/// Next-step law from an explicit history.
Probabilities6 next_step_law(const std::vector<Direction>& history, double p);

/// Next-step law from a history that realizes the counts c (canonical order).
Probabilities6 kernel_by_enumeration(const CountVector6& c, double p);

/// Law of the final counts after n steps, by walking the full outcome tree.
/// Cost grows like n! * 8^n; intended for n <= 6.
CountDistribution count_distribution_by_enumeration(int n, double p);

/// All count vectors with the given total.
std::vector<CountVector6> compositions(int total);

}  // namespace erwhex::enumeration
