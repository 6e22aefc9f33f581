#include "hardy/serialize.hpp"

#include "hardy/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace hardy {

json real_to_json(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return v;
}

double real_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    }
    throw Error(ErrorCode::validation, "expected a number or \"inf\", got " + j.dump());
}

namespace {

template <class E, std::size_t K>
E enum_from(const json& j, const E (&values)[K]) {
    const std::string s = j.get<std::string>();
    for (E v : values)
        if (s == to_string(v)) return v;
    throw Error(ErrorCode::validation, "unknown label \"" + s + "\"");
}

constexpr Lemma2Case lemma2_values[] = {Lemma2Case::a, Lemma2Case::b, Lemma2Case::c};
constexpr RootCase root_values[] = {RootCase::low_dim_no_root, RootCase::low_dim_one_root,
                                    RootCase::high_dim_no_root, RootCase::high_dim_two_roots,
                                    RootCase::high_dim_one_root};
constexpr Approach approach_values[] = {Approach::monotone, Approach::spiral, Approach::unknown};
constexpr DecayClass decay_values[] = {DecayClass::slow, DecayClass::fast, DecayClass::unclassified};
constexpr ProfileEnd end_values[] = {ProfileEnd::origin, ProfileEnd::infinity};
constexpr StabilityVerdict verdict_values[] = {StabilityVerdict::certified_stable,
                                               StabilityVerdict::witness_unstable,
                                               StabilityVerdict::inconclusive};

json opt_to_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return real_from_json(j);
}

json complex_to_json(std::complex<double> z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

template <class T>
void set_if(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

void set_real_if(const json& j, const char* key, double& field) {
    if (j.contains(key)) field = real_from_json(j.at(key));
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw Error(ErrorCode::validation, where + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys) known = known || item.key() == k;
        if (!known) throw Error(ErrorCode::validation, "unknown key \"" + item.key() + "\" in " + where);
    }
}

} // namespace

void to_json(json& j, const ExtReal& v) {
    j = v.is_infinite() ? json("inf") : json(v.value());
}

void from_json(const json& j, ExtReal& v) {
    const double d = real_from_json(j);
    if (std::isinf(d) && d > 0) v = ExtReal::infinity();
    else if (std::isfinite(d)) v = ExtReal(d);
    else throw Error(ErrorCode::validation, "extended real must be finite or \"inf\"");
}

void to_json(json& j, const Params& p) {
    j = json{{"N", p.N}, {"nu", p.nu}, {"p", p.p}, {"nu_star", p.nu_star}, {"mu", p.mu},
             {"beta", p.beta}, {"gamma", p.gamma}, {"slow_rate", p.slow_rate()}};
}

void to_json(json& j, const PInterval& v) {
    j = json{{"lower", v.lower}, {"upper", v.upper}, {"lower_closed", v.lower_closed},
             {"upper_closed", v.upper_closed}};
}

void from_json(const json& j, PInterval& v) {
    v.lower = j.at("lower").get<ExtReal>();
    v.upper = j.at("upper").get<ExtReal>();
    v.lower_closed = j.at("lower_closed").get<bool>();
    v.upper_closed = j.at("upper_closed").get<bool>();
}

void to_json(json& j, const ExponentReport& r) {
    j = json{{"N", r.N},
             {"nu", r.nu},
             {"p_lower", r.p_lower},
             {"p_sobolev", r.p_sobolev},
             {"p_upper", r.p_upper},
             {"sigma_sharp", r.sigma_sharp},
             {"sigma_minus", opt_to_json(r.sigma_minus)},
             {"sigma_plus", opt_to_json(r.sigma_plus)},
             {"p_sharp", r.p_sharp},
             {"p_minus", opt_to_json(r.p_minus)},
             {"p_plus", opt_to_json(r.p_plus)},
             {"nu_bar", r.nu_bar},
             {"stability_intervals", r.stability_intervals},
             {"lemma2_case", to_string(r.lemma2_case)},
             {"root_case", to_string(r.root_case)},
             {"double_root", r.double_root}};
}

void from_json(const json& j, ExponentReport& r) {
    r.N = j.at("N").get<int>();
    r.nu = j.at("nu").get<double>();
    r.p_lower = j.at("p_lower").get<double>();
    r.p_sobolev = j.at("p_sobolev").get<double>();
    r.p_upper = j.at("p_upper").get<ExtReal>();
    r.sigma_sharp = j.at("sigma_sharp").get<double>();
    r.sigma_minus = opt_from_json(j.at("sigma_minus"));
    r.sigma_plus = opt_from_json(j.at("sigma_plus"));
    r.p_sharp = j.at("p_sharp").get<double>();
    r.p_minus = opt_from_json(j.at("p_minus"));
    r.p_plus = opt_from_json(j.at("p_plus"));
    r.nu_bar = j.at("nu_bar").get<double>();
    r.stability_intervals = j.at("stability_intervals").get<std::vector<PInterval>>();
    r.lemma2_case = enum_from(j.at("lemma2_case"), lemma2_values);
    r.root_case = enum_from(j.at("root_case"), root_values);
    r.double_root = j.at("double_root").get<bool>();
}

void to_json(json& j, const SingularStability& s) {
    j = json{{"verdict", to_string(s.verdict)}, {"lemma2_case", to_string(s.lemma2_case)},
             {"interval_verdict", to_string(s.interval_verdict)}, {"consistent", s.consistent}};
}

void to_json(json& j, const EigenData& e) {
    j = json{{"alpha_plus", e.alpha_plus},
             {"alpha_minus", e.alpha_minus},
             {"alpha_star_plus", complex_to_json(e.alpha_star_plus)},
             {"alpha_star_minus", complex_to_json(e.alpha_star_minus)},
             {"eigvec_plus", e.eigvec_plus},
             {"eigvec_minus", e.eigvec_minus},
             {"attractor_type", to_string(e.attractor_type)},
             {"discriminant", e.discriminant},
             {"omega_spiral", e.omega_spiral}};
}

void to_json(json& j, const SolverOptions& o) {
    j = json{{"eps_start", o.eps_start}, {"atol", o.atol}, {"rtol", o.rtol},
             {"tol_attr", o.tol_attr}, {"t_max", o.t_max}, {"manifold_correction", o.manifold_correction},
             {"richardson", o.richardson}, {"grid_dt", o.grid_dt}, {"head_span", o.head_span}};
}

void from_json(const json& j, SolverOptions& o) {
    reject_unknown(j, {"eps_start", "atol", "rtol", "tol_attr", "t_max", "manifold_correction", "richardson",
                       "grid_dt", "head_span"},
                   "solver options");
    set_real_if(j, "eps_start", o.eps_start);
    set_real_if(j, "atol", o.atol);
    set_real_if(j, "rtol", o.rtol);
    set_real_if(j, "tol_attr", o.tol_attr);
    set_real_if(j, "t_max", o.t_max);
    set_if(j, "manifold_correction", o.manifold_correction);
    set_if(j, "richardson", o.richardson);
    set_real_if(j, "grid_dt", o.grid_dt);
    set_real_if(j, "head_span", o.head_span);
    if (!(o.eps_start > 0) || !(o.atol > 0) || !(o.rtol > 0) || !(o.tol_attr > 0) || !(o.t_max >= 0) ||
        !(o.grid_dt > 0) || !(o.head_span >= 0))
        throw Error(ErrorCode::validation, "solver options must be positive (t_max, head_span nonnegative)");
}

void to_json(json& j, const ExteriorOptions& o) {
    j = json{{"span", o.span}, {"spacing", o.spacing}, {"max_iters", o.max_iters}, {"tol", o.tol},
             {"residual_stride", o.residual_stride}};
}

void from_json(const json& j, ExteriorOptions& o) {
    reject_unknown(j, {"span", "spacing", "max_iters", "tol", "residual_stride"}, "exterior options");
    set_real_if(j, "span", o.span);
    set_real_if(j, "spacing", o.spacing);
    set_if(j, "max_iters", o.max_iters);
    set_real_if(j, "tol", o.tol);
    set_if(j, "residual_stride", o.residual_stride);
    if (!(o.span > 0) || !(o.spacing > 0) || o.max_iters < 1 || !(o.tol > 0) || o.residual_stride < 1)
        throw Error(ErrorCode::validation, "exterior options must be positive");
}

void to_json(json& j, const ApproachReport& r) {
    j = json{{"approach", to_string(r.approach)}, {"crossing_times", r.crossing_times},
             {"crossing_spacing", r.crossing_spacing}, {"predicted", to_string(r.predicted)},
             {"agrees_with_prediction", r.agrees_with_prediction}};
}

void from_json(const json& j, ApproachReport& r) {
    r.approach = enum_from(j.at("approach"), approach_values);
    r.crossing_times = j.at("crossing_times").get<std::vector<double>>();
    r.crossing_spacing = j.at("crossing_spacing").get<double>();
    r.predicted = enum_from(j.at("predicted"), approach_values);
    r.agrees_with_prediction = j.at("agrees_with_prediction").get<bool>();
}

void to_json(json& j, const AttractorRate& r) {
    j = json{{"rate", r.rate}, {"expected", r.expected}, {"double_root", r.double_root},
             {"tolerance", r.tolerance}};
}

void to_json(json& j, const DecayFit& d) {
    j = json{{"fitted_exponent", d.fitted_exponent}, {"window_lo", d.window_lo}, {"window_hi", d.window_hi},
             {"classification", to_string(d.classification)}, {"fit_residual", d.fit_residual},
             {"candidate_slow", d.candidate_slow}, {"candidate_fast", d.candidate_fast},
             {"limit_constant", d.limit_constant}};
}

void from_json(const json& j, DecayFit& d) {
    d.fitted_exponent = j.at("fitted_exponent").get<double>();
    d.window_lo = j.at("window_lo").get<double>();
    d.window_hi = j.at("window_hi").get<double>();
    d.classification = enum_from(j.at("classification"), decay_values);
    d.fit_residual = j.at("fit_residual").get<double>();
    d.candidate_slow = j.at("candidate_slow").get<double>();
    d.candidate_fast = j.at("candidate_fast").get<double>();
    d.limit_constant = j.at("limit_constant").get<double>();
}

void to_json(json& j, const PhragmenReport& r) {
    j = json{{"location", to_string(r.location)},
             {"pass", r.pass},
             {"fitted_exponent", r.fitted_exponent},
             {"lower", r.lower},
             {"upper", r.upper},
             {"witness_index", r.witness_index ? json(*r.witness_index) : json(nullptr)},
             {"witness_log_r", r.witness_log_r},
             {"witness_value", r.witness_value},
             {"message", r.message}};
}

void from_json(const json& j, PhragmenReport& r) {
    r.location = enum_from(j.at("location"), end_values);
    r.pass = j.at("pass").get<bool>();
    r.fitted_exponent = j.at("fitted_exponent").get<double>();
    r.lower = j.at("lower").get<double>();
    r.upper = j.at("upper").get<double>();
    const auto& w = j.at("witness_index");
    r.witness_index = w.is_null() ? std::nullopt : std::optional<std::size_t>(w.get<std::size_t>());
    r.witness_log_r = j.at("witness_log_r").get<double>();
    r.witness_value = j.at("witness_value").get<double>();
    r.message = j.at("message").get<std::string>();
}

void to_json(json& j, const StabilityWitness& w) {
    j = json{{"r_inner", w.r_inner}, {"r_outer", w.r_outer}, {"length", w.length}, {"ramp", w.ramp},
             {"quadratic_form", w.quadratic_form}, {"weight", w.weight}};
}

void from_json(const json& j, StabilityWitness& w) {
    w.r_inner = j.at("r_inner").get<double>();
    w.r_outer = j.at("r_outer").get<double>();
    w.length = j.at("length").get<double>();
    w.ramp = j.at("ramp").get<double>();
    w.quadratic_form = j.at("quadratic_form").get<double>();
    w.weight = j.at("weight").get<double>();
}

void to_json(json& j, const StabilityCertificate& c) {
    j = json{{"verdict", to_string(c.verdict)}, {"sup_potential", c.sup_potential},
             {"tail_liminf", c.tail_liminf}, {"witness", c.witness ? json(*c.witness) : json(nullptr)}};
}

void from_json(const json& j, StabilityCertificate& c) {
    c.verdict = enum_from(j.at("verdict"), verdict_values);
    c.sup_potential = j.at("sup_potential").get<double>();
    c.tail_liminf = j.at("tail_liminf").get<double>();
    const auto& w = j.at("witness");
    c.witness = w.is_null() ? std::nullopt : std::optional<StabilityWitness>(w.get<StabilityWitness>());
}

void to_json(json& j, const ResidualStats& s) {
    j = json{{"max_abs", s.max_abs}, {"min_signed", s.min_signed}, {"max_signed", s.max_signed},
             {"samples", s.samples}};
}

void to_json(json& j, const IterationResult& r) {
    j = json{{"iterations", r.iterations}, {"last_change", r.last_change}, {"coupling", r.coupling}};
}

json exterior_summary(const ExteriorReport& rep) {
    return json{{"lambda", rep.lambda},
                {"iteration", rep.result},
                {"sub_residual", rep.sub_residual},
                {"super_residual", rep.super_residual},
                {"residual", rep.residual},
                {"ordered", rep.ordered},
                {"positive", rep.positive},
                {"tail_deviation", rep.tail_deviation},
                {"boundary_deviation", rep.boundary_deviation}};
}

RunConfig parse_config(const json& j) {
    reject_unknown(j, {"solver", "exterior"}, "config");
    RunConfig cfg;
    if (j.contains("solver")) {
        SolverOptions o;
        from_json(j.at("solver"), o);
        cfg.solver = o;
    }
    if (j.contains("exterior")) {
        ExteriorOptions o;
        from_json(j.at("exterior"), o);
        cfg.exterior = o;
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error(ErrorCode::validation, "config " + path + ": " + e.what());
    }
    return parse_config(j);
}

void CsvWriter::sep() {
    if (!first_) os_ << ',';
    first_ = false;
}

void CsvWriter::header(const std::vector<std::string>& cols) {
    for (const auto& c : cols) cell(c);
    end_row();
}

CsvWriter& CsvWriter::cell(double v) {
    sep();
    os_ << format_double(v);
    return *this;
}

CsvWriter& CsvWriter::cell(long v) {
    sep();
    os_ << v;
    return *this;
}

CsvWriter& CsvWriter::cell(const std::string& s) {
    sep();
    if (s.find_first_of(",\"\n") == std::string::npos) {
        os_ << s;
        return *this;
    }
    os_ << '"';
    for (char ch : s) {
        if (ch == '"') os_ << '"';
        os_ << ch;
    }
    os_ << '"';
    return *this;
}

void CsvWriter::end_row() {
    os_ << '\n';
    first_ = true;
}

void write_profile_csv(std::ostream& os, const RadialProfile& profile, const Params& params) {
    CsvWriter csv(os);
    csv.header({"r", "U", "U_r_slow"});
    const double a = params.slow_rate();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double t = profile.log_r[i];
        const double scaled = profile.values[i] * std::exp(a * t);
        csv.cell(std::exp(t)).cell(profile.values[i]).cell(scaled);
        csv.end_row();
    }
}

void write_trajectory_csv(std::ostream& os, const PhaseTrajectory& traj, const Params& params,
                          const std::string& x_name, const std::string& y_name) {
    CsvWriter csv(os);
    csv.header({"t", x_name, y_name, "energy"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto& s = traj.states[i];
        csv.cell(traj.t[i]).cell(s.x).cell(s.y).cell(lyapunov_energy(s, params));
        csv.end_row();
    }
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::validation, "cannot write " + path);
    f << text;
    if (!f) throw Error(ErrorCode::validation, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorCode::validation, "cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace hardy
