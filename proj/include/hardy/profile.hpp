#pragma once

#include "hardy/exponent_atlas.hpp"
#include "hardy/ext_real.hpp"

#include <span>
#include <vector>

namespace hardy {

enum class DecayClass { slow, fast, unclassified };
const char* to_string(DecayClass d);

/// A positive radial function sampled on an increasing log-radius grid.
struct RadialProfile {
    std::vector<double> log_r;
    std::vector<double> values; // U(r) > 0
    std::vector<double> slopes; // dU/dt with t = log r; empty when unknown
    /// (U - U_∞) r^{2/(p-1)} = w - C_{p,nu}, kept separately so differences of
    /// nearby slow-decay profiles survive far into the tail. Empty when unknown.
    std::vector<double> singular_gap;
    ExtReal lambda = ExtReal::infinity();
    DecayClass decay_class = DecayClass::unclassified;

    std::size_t size() const { return log_r.size(); }
    double radius(std::size_t i) const;

    /// Value at an arbitrary log radius inside the grid: cubic Hermite when
    /// slopes are present, piecewise linear in log U otherwise.
    double value_at(double log_radius) const;
};

/// Builds a profile from radii; rejects r <= 0, non-increasing radii, U <= 0.
RadialProfile profile_from_radii(std::span<const double> r, std::span<const double> u);

/// Checks grid monotonicity and positivity; throws Error(validation).
/// Values must be positive from index `positive_from` on and nonnegative before it.
void validate_profile(const RadialProfile& profile, std::size_t positive_from = 0);

/// U = coefficient * r^{exponent} with exact slopes.
RadialProfile power_law_profile(double coefficient, double exponent, std::span<const double> log_r);

/// Exact U_∞ = C_{p,nu} r^{-2/(p-1)} (lambda = inf sentinel, zero singular gap).
RadialProfile singular_profile(const Params& params, std::span<const double> log_r);

/// n points uniformly spaced in log r over [lo, hi].
std::vector<double> uniform_log_grid(double lo, double hi, std::size_t n);

/// Uniform grid with a given spacing: lo, lo + h, ... up to and including hi (rounded).
std::vector<double> spaced_log_grid(double lo, double hi, double h);

} // namespace hardy
