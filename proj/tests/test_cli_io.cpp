#include "hardy/error.hpp"
#include "hardy/serialize.hpp"
#include "hardy/sweep.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <unistd.h>

using namespace hardy;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) out.push_back(l);
    return out;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("hardy_test_" + std::to_string(getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& log, const std::string& env = "") {
    const std::string cmd = env + " " + std::string(HARDY_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p.string())); }

} // namespace

TEST_SUITE("cli_io") {

TEST_CASE("shortest round-trip float formatting") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(3.0) == "3");
    CHECK(format_double(1e-300) == "1e-300");
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-30, 30);
    for (int k = 0; k < 2000; ++k) {
        const double v = std::exp(d(rng)) * (k % 2 ? 1 : -1);
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
        std::string mant = s.substr(0, s.find('e'));
        std::erase_if(mant, [](char c) { return !std::isdigit(static_cast<unsigned char>(c)); });
        mant.erase(0, mant.find_first_not_of('0'));
        if (s.find('.') != std::string::npos || s.find('e') != std::string::npos) CHECK(mant.size() <= 17);
    }
    CHECK(real_from_json(json("inf")) == INFINITY);
    CHECK(real_to_json(INFINITY) == json("inf"));
    CHECK_THROWS_AS(real_from_json(json("infinity")), Error);
}

TEST_CASE("exponent report JSON round trip") {
    for (auto [N, nu] : {std::pair{11, 4.5}, {10, 4.0}, {12, 5.02}, {3, 0.25}, {25, 11.5}, {12, 6.0}}) {
        const ExponentReport rep = exponent_report(N, nu);
        const std::string text = json(rep).dump();
        const ExponentReport back = json::parse(text).get<ExponentReport>();
        CHECK(back == rep);
        CHECK(json(back).dump() == text);
    }
    const json ten = json(exponent_report(10, 4.0));
    CHECK(ten.at("p_upper") == "inf");
    CHECK(ten.at("nu_bar").get<double>() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("analysis report round trips") {
    StabilityCertificate c;
    c.verdict = StabilityVerdict::witness_unstable;
    c.sup_potential = 6.25;
    c.tail_liminf = 6.2499999999999;
    c.witness = StabilityWitness{std::exp(10.0), std::exp(15.0), 5.0, 1.0, -12.666666666666666, 3.6666666666666665};
    const std::string ct = json(c).dump();
    CHECK(json(json::parse(ct).get<StabilityCertificate>()).dump() == ct);

    DecayFit f;
    f.fitted_exponent = -1.0000000000000002;
    f.window_lo = 1e3;
    f.window_hi = 1e4;
    f.classification = DecayClass::slow;
    f.limit_constant = std::sqrt(12.0);
    const std::string ft = json(f).dump();
    CHECK(json(json::parse(ft).get<DecayFit>()).dump() == ft);

    PhragmenReport r;
    r.pass = false;
    r.witness_index = 42;
    r.message = "degenerates, with a comma";
    const std::string rt = json(r).dump();
    CHECK(json(json::parse(rt).get<PhragmenReport>()).dump() == rt);

    ApproachReport a;
    a.approach = Approach::spiral;
    a.crossing_times = {0.1, 1.6707963267948966, 3.2415926535897931};
    a.crossing_spacing = 1.5707963267948966;
    a.predicted = Approach::spiral;
    a.agrees_with_prediction = true;
    const std::string at = json(a).dump();
    CHECK(json(json::parse(at).get<ApproachReport>()).dump() == at);
}

TEST_CASE("config overrides") {
    const RunConfig cfg = parse_config(json::parse(R"({"solver": {"eps_start": 1e-7, "grid_dt": 0.015625},
                                                       "exterior": {"spacing": 0.000244140625, "max_iters": 50}})"));
    CHECK(cfg.solver.eps_start == 1e-7);
    CHECK(cfg.solver.grid_dt == 0.015625);
    CHECK(cfg.solver.rtol == SolverOptions{}.rtol);
    CHECK(cfg.exterior.max_iters == 50);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"solver": {"eps": 1}})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"solvers": {}})")), Error);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"exterior": {"spacing": -1}})")), Error);
    const SolverOptions s = cfg.solver;
    CHECK(json(json(s).get<SolverOptions>()).dump() == json(s).dump());
}

TEST_CASE("sweep output contract") {
    SweepSpec empty = sweep_spec_from_json(json::parse(R"({"N_list": [5], "nu_grid": {"min": 1, "max": 2, "count": 2},
                                                          "p_grid": "auto", "tasks": []})"));
    CHECK(run_sweep(empty) == "N,nu,p,error\n");

    const SweepSpec spec = sweep_spec_from_json(json::parse(R"({"N_list": [15, 5], "nu_grid": {"min": 1.5, "max": 6.5, "count": 2},
        "p_grid": {"min": 1.2, "max": 5, "count": 3}, "tasks": ["shoot", "exponents"]})"));
    const std::string one = run_sweep(spec, {}, 1);
    const std::string four = run_sweep(spec, {}, 4);
    CHECK(one == four);
    CHECK(run_sweep(spec, {}, 4) == one);
    const auto rows = lines(one);
    REQUIRE(rows.size() == 1 + 2 * 2 * 3);
    CHECK(rows[0].rfind("N,nu,p,p_lower", 0) == 0);
    std::vector<std::tuple<int, double, double>> keys;
    int errors = 0, shot = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i]);
        keys.emplace_back(std::stoi(cells[0]), std::stod(cells[1]), std::stod(cells[2]));
        if (!cells.back().empty()) ++errors;
        if (cells.size() > 15 && (cells[15] == "monotone" || cells[15] == "spiral")) ++shot;
    }
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(errors > 0);
    CHECK(shot > 0);
}

TEST_CASE("sweep reproduces the case partition over (N, nu)") {
    const SweepSpec spec = sweep_spec_from_json(json::parse(R"({"N_list": [3,4,5,6,7,8,9,10,11,12,13,14,15],
        "nu_grid": {"min": 0.25, "max": 10, "count": 391}, "p_grid": {"min": 3, "max": 3, "count": 1},
        "tasks": ["exponents"]})"));
    const auto rows = lines(run_sweep(spec, {}, 4));
    const auto header = split(rows[0]);
    const auto col = std::size_t(std::find(header.begin(), header.end(), "lemma2_case") - header.begin());
    REQUIRE(col < header.size());
    std::map<std::string, int> counts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split(rows[i]);
        const int N = std::stoi(cells[0]);
        const double nu = std::stod(cells[1]);
        const double ns = 0.5 * (N - 2);
        const double nb = std::sqrt(ns * ns + (N - 10.0) * (N - 10.0) * (N - 1.0) / 108.0);
        std::string expected = "c";
        if (N >= 11 && nu > ns && nu <= nb) expected = "a";
        else if (nu < ns || (nu == ns && N >= 11)) expected = "b";
        CAPTURE(N);
        CAPTURE(nu);
        CHECK(cells[col] == expected);
        ++counts[expected];
    }
    CHECK(counts["a"] > 0);
    CHECK(counts["b"] > 0);
    CHECK(counts["c"] > 0);
}

TEST_CASE("sweep spec validation") {
    CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"N_list": [], "nu_grid": {"min": 1}, "p_grid": "auto"})")), Error);
    CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"N_list": [5], "nu_grid": {"min": 1, "count": 0}, "p_grid": "auto"})")), Error);
    CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"N_list": [5], "nu_grid": {"min": 1}, "p_grid": "fixed"})")), Error);
    CHECK_THROWS_AS(sweep_spec_from_json(json::parse(R"({"N_list": [5], "nu_grid": {"min": 1}, "p_grid": "auto", "tasks": ["plot"]})")), Error);
    for (double p : auto_p_grid(12, 5.02, 4)) {
        CHECK(p > exponent_report(12, 5.02).p_sobolev);
    }
}

TEST_CASE("command line exponents") {
    const fs::path dir = scratch("exponents");
    CHECK(run_cli("exponents --N 11 --nu 4.5", dir / "a.json") == 0);
    const json a = read_json(dir / "a.json");
    CHECK(a.at("p_minus").get<double>() == doctest::Approx(6.9221).epsilon(1e-4));
    CHECK(run_cli("exponents --N 10 --nu 4", dir / "b.json") == 0);
    const json b = read_json(dir / "b.json");
    CHECK(b.at("p_upper") == "inf");
    CHECK(b.at("nu_bar").get<double>() == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(run_cli("exponents --N 2 --nu 1", dir / "c.log") == 2);
    CHECK(run_cli("exponents --N 11", dir / "d.log") == 2);
    CHECK(run_cli("exponents --N 11 --nu 4.5 --format csv --out " + (dir / "out").string(), dir / "e.log") == 0);
    CHECK(fs::exists(dir / "out" / "exponents.csv"));
    CHECK(run_cli("exponents --N 11 --nu 4.5", dir / "f.log", "HARDY_WORKERS=zero") == 2);
}

TEST_CASE("command line profile and phase") {
    const fs::path dir = scratch("profile");
    CHECK(run_cli("profile --N 15 --nu 6.5 --p 3 --out " + (dir / "s").string(), dir / "s.log") == 0);
    const json s = read_json(dir / "s" / "diagnostics.json");
    CHECK(s.at("certificate").at("verdict") == "certified_stable");
    CHECK(s.at("decay").at("classification") == "slow");
    const auto prof = lines(read_text_file((dir / "s" / "profile.csv").string()));
    CHECK(prof[0] == "r,U,U_r_slow");
    CHECK(lines(read_text_file((dir / "s" / "trajectory.csv").string()))[0] == "t,w,w_prime,energy");

    CHECK(run_cli("profile --N 5 --nu 1.5 --p 5 --lambda inf --out " + (dir / "u").string(), dir / "u.log") == 0);
    const json u = read_json(dir / "u" / "diagnostics.json");
    CHECK(u.at("certificate").at("verdict") == "witness_unstable");
    CHECK(u.at("certificate").at("witness").at("r_outer").get<double>() > u.at("certificate").at("witness").at("r_inner").get<double>());

    CHECK(run_cli("profile --N 5 --nu 1.5 --p 2.3333333333333335 --out " + (dir / "x").string(), dir / "x.log") == 2);

    CHECK(run_cli("phase --N 5 --nu 1.5 --p 5 --out " + (dir / "ph").string(), dir / "ph.log") == 0);
    CHECK(lines(read_text_file((dir / "ph" / "phase.csv").string()))[0] == "t,x,y,energy");
    CHECK(read_json(dir / "ph" / "phase.json").at("approach").at("approach") == "spiral");

    const fs::path cfg = dir / "cfg.json";
    write_text_file(cfg.string(), R"({"solver": {"unknown": 1}})");
    CHECK(run_cli("--config " + cfg.string() + " phase --N 15 --nu 6.5 --p 3 --out " + (dir / "c").string(), dir / "c.log") == 2);
}

TEST_CASE("command line sweep and exterior") {
    const fs::path dir = scratch("sweep");
    write_text_file((dir / "spec.json").string(),
                    R"({"N_list": [5, 15], "nu_grid": {"min": 1.5, "max": 6.5, "count": 2}, "p_grid": "auto", "tasks": ["exponents", "shoot"]})");
    CHECK(run_cli("sweep --spec " + (dir / "spec.json").string() + " --out " + (dir / "a").string(), dir / "a.log") == 0);
    CHECK(run_cli("sweep --spec " + (dir / "spec.json").string() + " --out " + (dir / "b").string(), dir / "b.log",
                  "HARDY_WORKERS=1") == 0);
    const std::string a = read_text_file((dir / "a" / "atlas.csv").string());
    CHECK(a == read_text_file((dir / "b" / "atlas.csv").string()));
    CHECK(lines(a).size() == 1 + 4 * 5);

    const std::string coarse = R"("exterior": {"span": 20, "spacing": 0.000244140625, "residual_stride": 8})";
    write_text_file((dir / "ext.json").string(),
                    R"({"N": 15, "nu": 6.5, "p": 3, "R_K": 1, "psi": 0, "lambda": [1, 2, 4], )" + coarse + "}");
    CHECK(run_cli("exterior --problem " + (dir / "ext.json").string() + " --out " + (dir / "e").string(), dir / "e.log") == 0);
    const json e = read_json(dir / "e" / "exterior.json");
    CHECK(e.at("distinct") == true);
    CHECK(e.at("members").size() == 3);
    for (int k = 0; k < 3; ++k) CHECK(fs::exists(dir / "e" / ("exterior_" + std::to_string(k) + ".csv")));
    CHECK(e.at("members")[0].at("decay").at("classification") == "slow");

    write_text_file((dir / "bad.json").string(),
                    R"({"N": 15, "nu": 6.5, "p": 3, "R_K": 1, "psi": 100, "lambda": 1, )" + coarse + "}");
    CHECK(run_cli("exterior --problem " + (dir / "bad.json").string() + " --out " + (dir / "f").string(), dir / "f.log") == 2);
}

TEST_CASE("command line verify subset") {
    const fs::path dir = scratch("verify");
    CHECK(run_cli("verify --only 1,4", dir / "v.log") == 0);
    const auto out = lines(read_text_file((dir / "v.log").string()));
    REQUIRE(out.size() == 2);
    CHECK(out[0].rfind("PASS  1", 0) == 0);
    CHECK(out[1].rfind("PASS  4", 0) == 0);
}

}
