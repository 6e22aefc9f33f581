#pragma once

// JSON and CSV encodings of the reports. Doubles use shortest round-trip
// formatting; infinities are written as the string "inf".

#include "hardy/error.hpp"
#include "hardy/exponent_atlas.hpp"
#include "hardy/exterior.hpp"
#include "hardy/fowler.hpp"
#include "hardy/heteroclinic.hpp"
#include "hardy/profile_analysis.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace hardy {

using json = nlohmann::json;


json real_to_json(double v);
/// Accepts numbers and the strings "inf" / "-inf".
double real_from_json(const json& j);

void to_json(json& j, const ExtReal& v);
void from_json(const json& j, ExtReal& v);

void to_json(json& j, const Params& p);
void to_json(json& j, const PInterval& v);
void from_json(const json& j, PInterval& v);
void to_json(json& j, const ExponentReport& r);
void from_json(const json& j, ExponentReport& r);
void to_json(json& j, const SingularStability& s);
void to_json(json& j, const EigenData& e);

void to_json(json& j, const SolverOptions& o);
void from_json(const json& j, SolverOptions& o);
void to_json(json& j, const ExteriorOptions& o);
void from_json(const json& j, ExteriorOptions& o);

void to_json(json& j, const ApproachReport& r);
void from_json(const json& j, ApproachReport& r);
void to_json(json& j, const AttractorRate& r);
void to_json(json& j, const DecayFit& d);
void from_json(const json& j, DecayFit& d);
void to_json(json& j, const PhragmenReport& r);
void from_json(const json& j, PhragmenReport& r);
void to_json(json& j, const StabilityWitness& w);
void from_json(const json& j, StabilityWitness& w);
void to_json(json& j, const StabilityCertificate& c);
void from_json(const json& j, StabilityCertificate& c);
void to_json(json& j, const ResidualStats& s);
void to_json(json& j, const IterationResult& r);

/// Summary of an exterior solve (no field data).
json exterior_summary(const ExteriorReport& rep);

/// Solver options overridden from a config document with optional
/// "solver" and "exterior" sections. Unknown keys throw Error(validation).
struct RunConfig {
    SolverOptions solver;
    ExteriorOptions exterior;
};
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& os) : os_(os) {}
    void header(const std::vector<std::string>& cols);
    CsvWriter& cell(double v);
    CsvWriter& cell(long v);
    CsvWriter& cell(int v) { return cell(long(v)); }
    CsvWriter& cell(const std::string& s);
    void end_row();

private:
    void sep();
    std::ostream& os_;
    bool first_ = true;
};

/// r, U, U r^{2/(p-1)}
void write_profile_csv(std::ostream& os, const RadialProfile& profile, const Params& params);
/// t, <x name>, <y name>, energy
void write_trajectory_csv(std::ostream& os, const PhaseTrajectory& traj, const Params& params,
                          const std::string& x_name = "x", const std::string& y_name = "y");

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace hardy
