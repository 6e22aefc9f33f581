#include "hardy/error.hpp"
#include "hardy/exterior.hpp"
#include "hardy/heteroclinic.hpp"
#include "hardy/profile_analysis.hpp"
#include "hardy/serialize.hpp"
#include "hardy/sweep.hpp"
#include "hardy/verify.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace hardy;

namespace {

int worker_count() {
    const char* env = std::getenv("HARDY_WORKERS");
    if (!env || !*env) return int(std::max(1u, std::thread::hardware_concurrency()));
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 4096)
        throw Error(ErrorCode::validation, std::string("HARDY_WORKERS must be a positive integer, got \"") + env + "\"");
    return int(n);
}

std::string out_path(const std::string& dir, const std::string& name) {
    fs::create_directories(dir);
    return (fs::path(dir) / name).string();
}

ExtReal parse_lambda(const std::string& s) {
    if (s == "inf") return ExtReal::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || !(v > 0) || !std::isfinite(v))
        throw Error(ErrorCode::validation, "lambda must be positive or \"inf\", got \"" + s + "\"");
    return ExtReal(v);
}

std::string lambda_label(const ExtReal& l) { return l.is_infinite() ? "inf" : format_double(l.value()); }

json phragmen_pair(const RadialProfile& prof, const Params& params) {
    json out = json::array();
    for (ProfileEnd end : {ProfileEnd::origin, ProfileEnd::infinity}) {
        try {
            out.push_back(phragmen_check(prof, params, end));
        } catch (const Error& e) {
            out.push_back(json{{"location", to_string(end)}, {"error", to_string(e.code())}, {"message", e.what()}});
        }
    }
    return out;
}

int cmd_exponents(int N, double nu, const std::string& format, const std::string& out) {
    const ExponentReport rep = exponent_report(N, nu);
    std::string text;
    if (format == "csv") {
        std::ostringstream os;
        CsvWriter csv(os);
        csv.header({"N", "nu", "p_lower", "p_sobolev", "p_upper", "sigma_sharp", "sigma_minus", "sigma_plus",
                    "p_sharp", "p_minus", "p_plus", "nu_bar", "lemma2_case", "root_case", "double_root"});
        auto opt = [&](const std::optional<double>& v) -> CsvWriter& {
            return v ? csv.cell(*v) : csv.cell(std::string());
        };
        csv.cell(rep.N).cell(rep.nu).cell(rep.p_lower).cell(rep.p_sobolev);
        csv.cell(rep.p_upper.as_double()).cell(rep.sigma_sharp);
        opt(rep.sigma_minus);
        opt(rep.sigma_plus);
        csv.cell(rep.p_sharp);
        opt(rep.p_minus);
        opt(rep.p_plus);
        csv.cell(rep.nu_bar).cell(std::string(to_string(rep.lemma2_case)));
        csv.cell(std::string(to_string(rep.root_case))).cell(std::string(rep.double_root ? "true" : "false"));
        csv.end_row();
        text = os.str();
    } else {
        text = json(rep).dump(2) + "\n";
    }
    std::cout << text;
    if (!out.empty()) write_text_file(out_path(out, format == "csv" ? "exponents.csv" : "exponents.json"), text);
    return 0;
}

int cmd_profile(int N, double nu, double p, const std::string& lambda_s, const std::string& out,
                const RunConfig& cfg) {
    const Params params = make_params(N, nu, p);
    const ExtReal lambda = parse_lambda(lambda_s);
    const PhaseTrajectory traj = shoot_heteroclinic(params, cfg.solver);
    const RadialProfile prof = build_profile(traj, lambda, params);

    json diag;
    diag["params"] = params;
    diag["lambda"] = lambda;
    diag["solver"] = cfg.solver;
    diag["eigen"] = eigen_analysis(params);
    diag["singular_stability"] = classify_singular_stability(params);
    diag["approach"] = to_string(traj.approach);
    diag["normalization_shift"] = traj.normalization_shift;
    diag["decay"] = classify_decay(prof, params);
    diag["phragmen"] = phragmen_pair(prof, params);
    diag["certificate"] = stability_certificate(prof, params);
    diag["residual"] = lambda.is_infinite() ? singular_residual(params, prof.log_r) : radial_residual(prof, params);

    std::ostringstream pcsv, tcsv;
    write_profile_csv(pcsv, prof, params);
    write_trajectory_csv(tcsv, traj, params, "w", "w_prime");
    write_text_file(out_path(out, "profile.csv"), pcsv.str());
    write_text_file(out_path(out, "trajectory.csv"), tcsv.str());
    write_text_file(out_path(out, "diagnostics.json"), diag.dump(2) + "\n");
    std::cout << diag.dump(2) << "\n";
    return 0;
}

int cmd_phase(int N, double nu, double p, const std::string& out, const RunConfig& cfg) {
    const Params params = make_params(N, nu, p);
    const PhaseTrajectory traj = shoot_heteroclinic(params, cfg.solver);

    json meta;
    meta["params"] = params;
    meta["solver"] = cfg.solver;
    meta["eigen"] = eigen_analysis(params);
    json eq = json::array();
    for (const auto& s : equilibria(params).points) eq.push_back(json::array({s.x, s.y}));
    meta["equilibria"] = eq;
    meta["normalization_shift"] = traj.normalization_shift;
    try {
        meta["approach"] = detect_approach(traj, params);
    } catch (const Error& e) {
        meta["approach"] = json{{"approach", "unknown"}, {"error", e.what()}};
    }
    if (traj.approach == Approach::monotone) meta["attractor_rate"] = attractor_rate(traj, params);
    meta["samples"] = traj.size();

    std::ostringstream csv;
    write_trajectory_csv(csv, traj, params, "x", "y");
    write_text_file(out_path(out, "phase.csv"), csv.str());
    write_text_file(out_path(out, "phase.json"), meta.dump(2) + "\n");
    std::cout << meta.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out, const RunConfig& cfg) {
    json j;
    try {
        j = json::parse(read_text_file(spec_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, "sweep spec " + spec_path + ": " + e.what());
    }
    const SweepSpec spec = sweep_spec_from_json(j);
    const std::string csv = run_sweep(spec, cfg, worker_count());
    const std::string path = out_path(out, "atlas.csv");
    write_text_file(path, csv);
    std::cout << path << "\n";
    return 0;
}

int cmd_exterior(const std::string& problem_path, const std::string& out, std::size_t stride, RunConfig cfg) {
    json j;
    try {
        j = json::parse(read_text_file(problem_path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, "problem " + problem_path + ": " + e.what());
    }
    int N = 0;
    double nu = 0, p = 0, R_K = 1.0, psi = 0.0;
    std::vector<ExtReal> lambdas;
    try {
        for (const auto& item : j.items()) {
            const auto& k = item.key();
            if (k != "N" && k != "nu" && k != "p" && k != "R_K" && k != "psi" && k != "lambda" && k != "solver" &&
                k != "exterior")
                throw Error(ErrorCode::validation, "unknown key \"" + k + "\" in exterior problem");
        }
        N = j.at("N").get<int>();
        nu = j.at("nu").get<double>();
        p = j.at("p").get<double>();
        if (j.contains("R_K")) R_K = j.at("R_K").get<double>();
        if (j.contains("psi")) psi = j.at("psi").get<double>();
        const json& lj = j.at("lambda");
        if (lj.is_array())
            for (const auto& l : lj) lambdas.push_back(l.get<ExtReal>());
        else
            lambdas.push_back(lj.get<ExtReal>());
        json overrides = json::object();
        if (j.contains("solver")) overrides["solver"] = j.at("solver");
        if (j.contains("exterior")) overrides["exterior"] = j.at("exterior");
        if (!overrides.empty()) {
            json merged{{"solver", cfg.solver}, {"exterior", cfg.exterior}};
            merged.merge_patch(overrides);
            cfg = parse_config(merged);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, std::string("exterior problem: ") + e.what());
    }
    if (lambdas.empty()) throw Error(ErrorCode::validation, "lambda list is empty");
    if (!(R_K > 0)) throw Error(ErrorCode::validation, "R_K must be positive");

    const Params params = make_params(N, nu, p);
    const PhaseTrajectory traj = shoot_heteroclinic(params, cfg.solver);
    const FamilyReport fam = continuum_family(params, R_K, psi, lambdas, traj, cfg.exterior, worker_count());

    json summary;
    summary["params"] = params;
    summary["R_K"] = R_K;
    summary["psi"] = psi;
    summary["lambda_psi"] = lambda_psi(traj, params, R_K, psi);
    summary["exterior_options"] = cfg.exterior;
    json members = json::array();
    for (std::size_t k = 0; k < fam.members.size(); ++k) {
        const auto& rep = fam.members[k];
        const RadialProfile prof = rep.result.solution.profile(stride);
        json m = exterior_summary(rep);
        const std::string file = "exterior_" + std::to_string(k) + ".csv";
        m["file"] = file;
        try {
            m["decay"] = classify_decay(prof, params);
        } catch (const Error& e) {
            m["decay"] = json{{"error", to_string(e.code())}, {"message", e.what()}};
        }
        std::ostringstream os;
        write_profile_csv(os, prof, params);
        write_text_file(out_path(out, file), os.str());
        members.push_back(m);
    }
    summary["members"] = members;
    json sep = json::array();
    for (const auto& row : fam.separation) {
        json r = json::array();
        for (double v : row) r.push_back(real_to_json(v));
        sep.push_back(r);
    }
    summary["separation"] = sep;
    summary["distinct"] = fam.distinct;
    write_text_file(out_path(out, "exterior.json"), summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::vector<int>& only) {
    const auto results = run_acceptance(worker_count(), only);
    bool all = true;
    for (const auto& r : results) {
        std::cout << format_result(r) << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slow-decay radial solutions of -Δu + (ν²-ν*²)|x|⁻²u = uᵖ"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file overriding solver options")->check(CLI::ExistingFile);

    int N = 0;
    double nu = 0.0, p = 0.0;
    std::string out, format = "json", lambda = "1", path;
    std::size_t stride = 256;
    std::vector<int> only;

    auto* exps = app.add_subcommand("exponents", "critical exponents and stability intervals for (N, nu)");
    exps->add_option("--N", N, "dimension")->required();
    exps->add_option("--nu", nu, "square root of the Hardy coupling")->required();
    exps->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    exps->add_option("--out", out, "also write the report into this directory");

    auto* prof = app.add_subcommand("profile", "heteroclinic profile U_lambda with diagnostics");
    prof->add_option("--N", N)->required();
    prof->add_option("--nu", nu)->required();
    prof->add_option("--p", p)->required();
    prof->add_option("--lambda", lambda, "scaling parameter, positive or inf");
    prof->add_option("--out", out, "output directory")->required();

    auto* phase = app.add_subcommand("phase", "heteroclinic trajectory in Fowler variables");
    phase->add_option("--N", N)->required();
    phase->add_option("--nu", nu)->required();
    phase->add_option("--p", p)->required();
    phase->add_option("--out", out, "output directory")->required();

    auto* sweep = app.add_subcommand("sweep", "regime atlas over an (N, nu, p) grid");
    sweep->add_option("--spec", path, "sweep spec JSON")->required()->check(CLI::ExistingFile);
    sweep->add_option("--out", out, "output directory")->required();

    auto* ext = app.add_subcommand("exterior", "exterior Dirichlet problem on r > R_K");
    ext->add_option("--problem", path, "problem JSON")->required()->check(CLI::ExistingFile);
    ext->add_option("--out", out, "output directory")->required();
    ext->add_option("--stride", stride, "write every stride-th grid node")->check(CLI::PositiveNumber);

    auto* ver = app.add_subcommand("verify", "run the acceptance checks");
    ver->add_option("--only", only, "criterion ids to run")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        worker_count();
        const RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (*exps) return cmd_exponents(N, nu, format, out);
        if (*prof) return cmd_profile(N, nu, p, lambda, out, cfg);
        if (*phase) return cmd_phase(N, nu, p, out, cfg);
        if (*sweep) return cmd_sweep(path, out, cfg);
        if (*ext) return cmd_exterior(path, out, stride, cfg);
        if (*ver) return cmd_verify(only);
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
