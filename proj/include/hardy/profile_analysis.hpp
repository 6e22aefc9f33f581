#pragma once

#include "hardy/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hardy {

struct DecayFit {
    double fitted_exponent = 0.0; // least-squares slope of log U against log r
    double window_lo = 0.0;       // radii of the fitted window
    double window_hi = 0.0;
    DecayClass classification = DecayClass::unclassified;
    double fit_residual = 0.0;    // rms residual of the fit in log U
    double candidate_slow = 0.0;  // -2/(p-1)
    double candidate_fast = 0.0;  // -nu_* - nu
    /// U r^{-exponent} at the last sample for the assigned class (C_{p,nu} for slow decay)
    double limit_constant = 0.0;
};

/// Tail fit on the last decade of r. Throws Error(insufficient_grid) when the
/// profile spans less than two decades.
DecayFit classify_decay(const RadialProfile& profile, const Params& params);

enum class ProfileEnd { origin, infinity };
const char* to_string(ProfileEnd e);

struct PhragmenReport {
    ProfileEnd location = ProfileEnd::infinity;
    bool pass = false;
    double fitted_exponent = 0.0; // log-slope over the end decade
    double lower = 0.0;           // admissible exponents [-nu_* - nu, -nu_* + nu]
    double upper = 0.0;
    std::optional<std::size_t> witness_index; // violating sample, on failure
    double witness_log_r = 0.0;
    double witness_value = 0.0;   // U r^{nu_*+nu} (lower violation) or U r^{nu_*-nu} (upper)
    std::string message;
};

/// Power-law bounds for positive Hardy-superharmonic functions at one end of the grid.
PhragmenReport phragmen_check(const RadialProfile& profile, const Params& params, ProfileEnd location);

enum class StabilityVerdict { certified_stable, witness_unstable, inconclusive };
const char* to_string(StabilityVerdict v);

struct StabilityWitness {
    double r_inner = 0.0; // annulus [R, R e^L]
    double r_outer = 0.0;
    double length = 0.0;  // L in t = log r
    double ramp = 1.0;    // width of the linear cutoff ramps in t
    double quadratic_form = 0.0;
    double weight = 0.0;  // ∫ g^2 dt
};

struct StabilityCertificate {
    StabilityVerdict verdict = StabilityVerdict::inconclusive;
    double sup_potential = 0.0;  // sup of p U^{p-1} r^2 over the grid
    double tail_liminf = 0.0;    // min of p U^{p-1} r^2 over the last decade
    std::optional<StabilityWitness> witness;
};

StabilityCertificate stability_certificate(const RadialProfile& profile, const Params& params);

/// Second variation at the profile for phi = r^{-nu_*} g(log r), g the unit
/// trapezoid on [t0, t0 + L] with unit ramps:  ∫ g'^2 + (nu^2 - p U^{p-1} r^2) g^2 dt.
/// The annulus must lie inside the grid.
StabilityWitness witness_form(const RadialProfile& profile, const Params& params, double t0, double length);

struct SignChanges {
    std::size_t count = 0;
    std::vector<double> log_r; // interpolated sign-change abscissae
};

/// Sign changes of A - B on (R, ∞) ∩ grid of A, with a 1e-12 relative dead-band.
/// When `params` describes a focus, the overlap must cover one period π/ω.
SignChanges tail_sign_changes(const RadialProfile& a, const RadialProfile& b, double R,
                              const Params* params = nullptr);

/// Scaled residual of  -U'' - (N-1)/r U' + μ/r^2 U - U^p  on interior samples:
/// max_i |R_i| / (Σ|terms| + nu^2 U) in the log variable, U'' from fourth-order
/// differences of the stored slopes. The nu^2 U term keeps the scale of the
/// Hardy operator where all terms vanish (μ = 0 and U nearly constant).
/// Requires a uniform grid with slopes.
double radial_residual(const RadialProfile& profile, const Params& params);

/// Same quantity for U_∞ with exact derivatives on the given grid.
double singular_residual(const Params& params, const std::vector<double>& log_r);

} // namespace hardy
