#include "hardy/sweep.hpp"

#include "hardy/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

namespace hardy {

std::vector<double> GridSpec::values() const {
    std::vector<double> v;
    v.reserve(std::size_t(count));
    for (int k = 0; k < count; ++k)
        v.push_back(count == 1 ? min : min + (max - min) * double(k) / double(count - 1));
    return v;
}

const char* to_string(SweepTask t) {
    switch (t) {
    case SweepTask::exponents: return "exponents";
    case SweepTask::shoot: return "shoot";
    case SweepTask::certify: return "certify";
    case SweepTask::exterior: return "exterior";
    }
    return "unknown";
}

namespace {

GridSpec grid_from_json(const json& j, const std::string& name) {
    if (!j.is_object()) throw Error(ErrorCode::validation, name + " must be {min, max, count}");
    for (const auto& item : j.items())
        if (item.key() != "min" && item.key() != "max" && item.key() != "count")
            throw Error(ErrorCode::validation, "unknown key \"" + item.key() + "\" in " + name);
    GridSpec g;
    g.min = j.at("min").get<double>();
    g.max = j.contains("max") ? j.at("max").get<double>() : g.min;
    g.count = j.contains("count") ? j.at("count").get<int>() : 1;
    if (g.count < 1) throw Error(ErrorCode::validation, name + ".count must be >= 1");
    if (!std::isfinite(g.min) || !std::isfinite(g.max) || g.max < g.min)
        throw Error(ErrorCode::validation, name + " needs finite min <= max");
    return g;
}

json grid_to_json(const GridSpec& g) { return json{{"min", g.min}, {"max", g.max}, {"count", g.count}}; }

SweepTask task_from_string(const std::string& s) {
    for (SweepTask t : {SweepTask::exponents, SweepTask::shoot, SweepTask::certify, SweepTask::exterior})
        if (s == to_string(t)) return t;
    throw Error(ErrorCode::validation, "unknown sweep task \"" + s + "\"");
}

bool has(const std::vector<SweepTask>& tasks, SweepTask t) {
    return std::find(tasks.begin(), tasks.end(), t) != tasks.end();
}

struct RowKey {
    int N;
    double nu;
    double p;
};

struct Row {
    std::vector<std::string> cells;
    std::string error;
};

std::string opt_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

std::string ext_cell(const ExtReal& v) { return v.is_infinite() ? "inf" : format_double(v.value()); }

void compute_row(const RowKey& key, const SweepSpec& spec, const RunConfig& cfg, Row& row) {
    auto& c = row.cells;
    const auto& tasks = spec.tasks;
    if (has(tasks, SweepTask::exponents)) {
        const ExponentReport r = exponent_report(key.N, key.nu);
        c.push_back(format_double(r.p_lower));
        c.push_back(format_double(r.p_sobolev));
        c.push_back(ext_cell(r.p_upper));
        c.push_back(format_double(r.p_sharp));
        c.push_back(opt_cell(r.p_minus));
        c.push_back(opt_cell(r.p_plus));
        c.push_back(format_double(r.nu_bar));
        c.push_back(to_string(r.lemma2_case));
        c.push_back(to_string(r.root_case));
        c.push_back(r.double_root ? "true" : "false");
        c.push_back(to_string(classify_singular_stability(make_params(key.N, key.nu, key.p)).verdict));
    }
    const bool need_orbit = has(tasks, SweepTask::shoot) || has(tasks, SweepTask::certify) ||
                            has(tasks, SweepTask::exterior);
    if (!need_orbit) return;
    const Params params = make_params(key.N, key.nu, key.p);
    const PhaseTrajectory traj = shoot_heteroclinic(params, cfg.solver);
    const double C = singular_coefficient(params);
    if (has(tasks, SweepTask::shoot)) {
        const EigenData eig = eigen_analysis(params);
        c.push_back(to_string(eig.attractor_type));
        c.push_back(to_string(traj.approach));
        c.push_back(format_double(traj.normalization_shift));
        c.push_back(format_double(traj.states.back().x / C));
        c.push_back(format_double(std::exp(traj.orbit->at(traj.t.front()).log_x - eig.alpha_plus * traj.t.front())));
    }
    if (has(tasks, SweepTask::certify)) {
        const RadialProfile u1 = build_profile(traj, ExtReal(1.0), params);
        const RadialProfile uinf = build_profile(traj, ExtReal::infinity(), params);
        const StabilityCertificate a = stability_certificate(u1, params);
        const StabilityCertificate b = stability_certificate(uinf, params);
        c.push_back(to_string(a.verdict));
        c.push_back(format_double(a.sup_potential));
        c.push_back(to_string(b.verdict));
        c.push_back(b.witness ? format_double(b.witness->quadratic_form) : std::string());
    }
    if (has(tasks, SweepTask::exterior) && params.p * params.gamma > params.nu * params.nu) {
        c.insert(c.end(), 4, std::string());
    } else if (has(tasks, SweepTask::exterior)) {
        const ExteriorProblem ext = make_exterior_problem(params, spec.R_K, 0.0, ExtReal(1.0), &traj, cfg.exterior);
        const ExteriorReport rep = solve_exterior(ext);
        c.push_back(std::to_string(rep.result.iterations));
        c.push_back(format_double(rep.residual.max_abs));
        c.push_back(rep.ordered && rep.positive ? "true" : "false");
        c.push_back(format_double(rep.tail_deviation));
    }
}

std::size_t task_width(SweepTask t) {
    switch (t) {
    case SweepTask::exponents: return 11;
    case SweepTask::shoot: return 5;
    case SweepTask::certify: return 4;
    case SweepTask::exterior: return 4;
    }
    return 0;
}

} // namespace

SweepSpec sweep_spec_from_json(const json& j) {
    if (!j.is_object()) throw Error(ErrorCode::validation, "sweep spec must be a JSON object");
    for (const auto& item : j.items()) {
        const auto& k = item.key();
        if (k != "N_list" && k != "nu_grid" && k != "p_grid" && k != "p_auto_count" && k != "tasks" && k != "R_K")
            throw Error(ErrorCode::validation, "unknown key \"" + k + "\" in sweep spec");
    }
    SweepSpec s;
    try {
        s.N_list = j.at("N_list").get<std::vector<int>>();
        s.nu_grid = grid_from_json(j.at("nu_grid"), "nu_grid");
        const json& pg = j.at("p_grid");
        if (pg.is_string()) {
            if (pg.get<std::string>() != "auto") throw Error(ErrorCode::validation, "p_grid must be \"auto\" or a grid");
            s.p_auto = true;
        } else {
            s.p_grid = grid_from_json(pg, "p_grid");
        }
        if (j.contains("p_auto_count")) s.p_auto_count = j.at("p_auto_count").get<int>();
        if (j.contains("tasks"))
            for (const auto& t : j.at("tasks")) s.tasks.push_back(task_from_string(t.get<std::string>()));
        if (j.contains("R_K")) s.R_K = j.at("R_K").get<double>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, std::string("sweep spec: ") + e.what());
    }
    if (s.N_list.empty()) throw Error(ErrorCode::validation, "N_list must be nonempty");
    if (s.p_auto_count < 1) throw Error(ErrorCode::validation, "p_auto_count must be >= 1");
    if (!(s.R_K > 0)) throw Error(ErrorCode::validation, "R_K must be positive");
    std::sort(s.N_list.begin(), s.N_list.end());
    s.N_list.erase(std::unique(s.N_list.begin(), s.N_list.end()), s.N_list.end());
    std::vector<SweepTask> ordered;
    for (SweepTask t : {SweepTask::exponents, SweepTask::shoot, SweepTask::certify, SweepTask::exterior})
        if (has(s.tasks, t)) ordered.push_back(t);
    s.tasks = ordered;
    return s;
}

json to_json_value(const SweepSpec& spec) {
    json tasks = json::array();
    for (SweepTask t : spec.tasks) tasks.push_back(to_string(t));
    return json{{"N_list", spec.N_list},
                {"nu_grid", grid_to_json(spec.nu_grid)},
                {"p_grid", spec.p_auto ? json("auto") : grid_to_json(spec.p_grid)},
                {"p_auto_count", spec.p_auto_count},
                {"tasks", tasks},
                {"R_K", spec.R_K}};
}

std::vector<double> auto_p_grid(int N, double nu, int count) {
    const ExponentReport r = exponent_report(N, nu);
    const double lo = r.p_sobolev;
    double hi = 0.0;
    if (r.p_upper.is_finite()) {
        hi = r.p_upper.value();
    } else {
        hi = 3.0 * lo;
        if (r.p_plus) hi = std::max(hi, 1.5 * *r.p_plus);
    }
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(lo + (hi - lo) * double(k + 1) / double(count + 1));
    return v;
}

std::vector<std::string> sweep_columns(const std::vector<SweepTask>& tasks) {
    std::vector<std::string> cols = {"N", "nu", "p"};
    if (has(tasks, SweepTask::exponents))
        cols.insert(cols.end(), {"p_lower", "p_sobolev", "p_upper", "p_sharp", "p_minus", "p_plus", "nu_bar",
                                 "lemma2_case", "root_case", "double_root", "singular_verdict"});
    if (has(tasks, SweepTask::shoot))
        cols.insert(cols.end(), {"attractor_type", "approach", "normalization_shift", "tail_ratio", "head_ratio"});
    if (has(tasks, SweepTask::certify))
        cols.insert(cols.end(), {"u1_certificate", "u1_sup_potential", "uinf_certificate", "uinf_quadratic_form"});
    if (has(tasks, SweepTask::exterior))
        cols.insert(cols.end(), {"exterior_iterations", "exterior_residual", "exterior_ordered", "exterior_tail"});
    cols.push_back("error");
    return cols;
}

std::string run_sweep(const SweepSpec& spec, const RunConfig& cfg, int workers) {
    std::ostringstream os;
    CsvWriter csv(os);
    csv.header(sweep_columns(spec.tasks));
    if (spec.tasks.empty()) return os.str();

    std::vector<RowKey> keys;
    std::vector<std::string> key_errors;
    for (int N : spec.N_list) {
        for (double nu : spec.nu_grid.values()) {
            std::vector<double> ps;
            std::string err;
            if (spec.p_auto) {
                try {
                    ps = auto_p_grid(N, nu, spec.p_auto_count);
                } catch (const Error& e) {
                    err = std::string(to_string(e.code())) + ": " + e.what();
                    ps = {std::numeric_limits<double>::quiet_NaN()};
                }
            } else {
                ps = spec.p_grid.values();
            }
            for (double p : ps) {
                keys.push_back({N, nu, p});
                key_errors.push_back(err);
            }
        }
    }

    std::vector<Row> rows(keys.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < keys.size(); i = next++) {
            if (!key_errors[i].empty()) {
                rows[i].error = key_errors[i];
                continue;
            }
            try {
                compute_row(keys[i], spec, cfg, rows[i]);
            } catch (const Error& e) {
                rows[i].error = std::string(to_string(e.code())) + ": " + e.what();
            } catch (const std::exception& e) {
                rows[i].error = std::string("ERROR: ") + e.what();
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(workers, int(keys.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n_threads; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::size_t width = 0;
    for (SweepTask t : spec.tasks) width += task_width(t);
    for (std::size_t i = 0; i < keys.size(); ++i) {
        csv.cell(keys[i].N).cell(keys[i].nu);
        if (std::isnan(keys[i].p)) csv.cell(std::string());
        else csv.cell(keys[i].p);
        auto& cells = rows[i].cells;
        cells.resize(width);
        for (const auto& s : cells) csv.cell(s);
        csv.cell(rows[i].error);
        csv.end_row();
    }
    return os.str();
}

} // namespace hardy
