#pragma once

// Fowler variables w(t) = r^{2/(p-1)} U(r), t = log r. Radial solutions of the
// Hardy equation become trajectories of the damped planar system
//     x' = y,   y' = -2 beta y + gamma x - x^p
// with a saddle at the origin and the singular solution U_∞ as second equilibrium.

#include "hardy/exponent_atlas.hpp"

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hardy {

struct RadialProfile;
class OrbitModel;

struct PhaseState {
    double x = 0.0; // w
    double y = 0.0; // w'

    friend bool operator==(const PhaseState&, const PhaseState&) = default;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

enum class AttractorType { node, focus, center, repeller };
const char* to_string(AttractorType t);

enum class Approach { monotone, spiral, unknown };
const char* to_string(Approach a);

struct EigenData {
    double alpha_plus = 0.0;  // unstable rate at the saddle
    double alpha_minus = 0.0; // stable rate at the saddle
    std::complex<double> alpha_star_plus;
    std::complex<double> alpha_star_minus;
    std::array<double, 2> eigvec_plus{1.0, 0.0};
    std::array<double, 2> eigvec_minus{1.0, 0.0};
    AttractorType attractor_type = AttractorType::node;
    double discriminant = 0.0; // beta^2 - (p-1) gamma = nu^2 - p gamma
    double omega_spiral = 0.0; // sqrt(-discriminant) for a focus, else 0
};

/// Sampled trajectory of the Fowler system on a strictly increasing time grid.
/// For heteroclinic orbits `t` is the normalized time (w e^{-alpha_+ t} -> 1 as
/// t -> -inf) and `orbit` evaluates the orbit at arbitrary times.
struct PhaseTrajectory {
    std::vector<double> t;
    std::vector<PhaseState> states;
    std::vector<double> gap; // w - C_{p,nu} without cancellation; empty when not tracked
    double normalization_shift = 0.0;
    Approach approach = Approach::unknown;
    std::shared_ptr<const OrbitModel> orbit;

    std::size_t size() const { return t.size(); }
};

/// x^p for x >= 0 as exp(p log x), 0 at x = 0. Throws Error(domain) for x < 0.
double fowler_pow(double x, double p);

PhaseState vector_field(const PhaseState& s, const Params& params);

Mat2 jacobian(const PhaseState& s, const Params& params);

struct Equilibria {
    std::vector<PhaseState> points;
    std::optional<std::string> warning;
};

Equilibria equilibria(const Params& params);

/// Requires gamma > 0 (p in (p_*, p^*)); throws Error(range) otherwise.
EigenData eigen_analysis(const Params& params);

double lyapunov_energy(const PhaseState& s, const Params& params);

/// Gradient of the energy, (x^p - gamma x, y).
std::array<double, 2> lyapunov_gradient(const PhaseState& s, const Params& params);

/// exp(A t) z for a 2x2 matrix, valid for real, complex and repeated eigenvalues.
std::array<double, 2> linear_flow(const Mat2& A, const std::array<double, 2>& z, double t);

/// U(r) -> (w, w') on t = log r. Slopes come from the profile when present,
/// otherwise from second-order differences on the log grid.
PhaseTrajectory fowler_forward(const Params& params, const RadialProfile& profile);

/// (w, w') on t -> U(r) on log r = t, with dU/dt carried along.
RadialProfile fowler_inverse(const Params& params, const PhaseTrajectory& traj);

} // namespace hardy
