#pragma once

// Acceptance harness: ten numbered checks with pinned tolerances.

#include "hardy/fowler.hpp"
#include "hardy/heteroclinic.hpp"

#include <string>
#include <vector>

namespace hardy {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Runs the selected criteria (all when `only` is empty) in id order.
std::vector<CriterionResult> run_acceptance(int workers = 1, const std::vector<int>& only = {});

/// "PASS  3 name: detail (0.12 s)"
std::string format_result(const CriterionResult& r);

struct OracleComparison {
    double max_diff = 0.0;      // sup |w_oracle - w_orbit| over the compared samples
    double self_estimate = 0.0; // sup |w_h - w_{h/2}| of the oracle itself
    std::size_t samples = 0;
};

/// Classical RK4 with fixed steps h and h/2 on (w, w') started on the unstable
/// manifold from its two-term expansion, compared with the trajectory samples.
OracleComparison rk4_oracle_compare(const PhaseTrajectory& traj, const Params& params);

} // namespace hardy
