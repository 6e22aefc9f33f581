#pragma once

// Parameter sweeps over (N, nu, p) producing the regime atlas as CSV.

#include "hardy/serialize.hpp"

#include <string>
#include <vector>

namespace hardy {

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    /// count points from min to max inclusive; a single point sits at min.
    std::vector<double> values() const;
};

enum class SweepTask { exponents, shoot, certify, exterior };
const char* to_string(SweepTask t);

struct SweepSpec {
    std::vector<int> N_list;
    GridSpec nu_grid;
    /// Explicit p grid; ignored when p_auto is set.
    GridSpec p_grid;
    /// Per point, p_auto_count values strictly inside (p_S, p^*). For p^* = inf the
    /// upper end is max(3 p_S, 1.5 p_+).
    bool p_auto = false;
    int p_auto_count = 5;
    std::vector<SweepTask> tasks;
    double R_K = 1.0; // exterior task: psi = 0, lambda = 1 on r > R_K
};

/// {"N_list": [...], "nu_grid": {min, max, count}, "p_grid": {...} | "auto",
///  "p_auto_count": k, "tasks": [...], "R_K": r}. Throws Error(validation).
SweepSpec sweep_spec_from_json(const json& j);
json to_json_value(const SweepSpec& spec);

/// The auto p grid for one (N, nu).
std::vector<double> auto_p_grid(int N, double nu, int count);

/// CSV header for the given task list.
std::vector<std::string> sweep_columns(const std::vector<SweepTask>& tasks);

/// Atlas CSV with one row per (N, nu, p) in ascending lexicographic order. Rows
/// run on up to `workers` threads; the output does not depend on the worker count.
/// A failing row keeps its completed cells and records the failure in `error`.
std::string run_sweep(const SweepSpec& spec, const RunConfig& cfg = {}, int workers = 1);

} // namespace hardy
