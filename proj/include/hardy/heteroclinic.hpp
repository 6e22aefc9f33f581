#pragma once

#include "hardy/fowler.hpp"
#include "hardy/ode.hpp"
#include "hardy/profile.hpp"

#include <optional>
#include <span>
#include <vector>

namespace hardy {

struct SolverOptions {
    double eps_start = 1e-6;      // offset along the unit unstable eigenvector
    double atol = 1e-10;
    double rtol = 1e-10;
    double tol_attr = 1e-9;       // arrival radius around (C, 0)
    double t_max = 0.0;           // attractor approach horizon after leaving the saddle; 0: 200 / slowest rate
    bool manifold_correction = false;
    bool richardson = true;       // extrapolate the normalization over {eps, eps/4}
    double grid_dt = 1.0 / 128.0; // sample spacing in t = log r
    double head_span = 25.0;      // analytic head sampled below the integration start
};

/// A point of the heteroclinic orbit in Fowler variables.
struct OrbitSample {
    double x = 0.0;   // w
    double y = 0.0;   // w'
    double gap = 0.0; // w - C_{p,nu}
    double log_x = 0.0; // log w, finite where w underflows
    double ratio = 0.0; // w'/w
};

/// Continuous representation of the normalized heteroclinic orbit: analytic
/// unstable-manifold expansion before the integration start, dense output of
/// the two integration charts, and the linearized attractor flow after arrival.
class OrbitModel {
public:
    OrbitSample at(double tau) const;

    double tau_start() const { return tau_start_; }
    double tau_switch() const { return tau_switch_; }
    double tau_arrival() const { return tau_arrival_; }
    double attractor() const { return c_; }
    /// |tau_ref(eps) - tau_ref(eps/4)|, the normalization sensitivity to the start offset.
    double normalization_spread() const { return normalization_spread_; }
    long steps() const { return long(log_chart_.size() + gap_chart_.size()); }

private:
    friend class HeteroclinicBuilder;

    Params params_;
    double c_ = 0.0;          // C_{p,nu}
    double alpha_plus_ = 0.0;
    double head_coef_ = 0.0;  // a in w = E (1 + a E^{p-1}) + ..., E = e^{alpha_+ tau}
    double shift_ = 0.0;      // tau = t + shift
    double tau_start_ = 0.0;
    double tau_switch_ = 0.0;
    double tau_arrival_ = 0.0;
    double normalization_spread_ = 0.0;
    std::vector<ode::DenseStep> log_chart_; // (log w, w'/w) in integrator time
    std::vector<ode::DenseStep> gap_chart_; // (w - C, w') in normalized time
    Mat2 attractor_jacobian_{};
    std::array<double, 2> arrival_state_{}; // (gap, y) at tau_arrival
};

/// Normalized heteroclinic orbit from (0,0) to (C_{p,nu}, 0). Requires
/// p_S < p < p^*: throws Error(range) otherwise and Error(non_convergence)
/// when the attractor neighbourhood is not reached within t_max.
PhaseTrajectory shoot_heteroclinic(const Params& params, const SolverOptions& opts = {});

/// U_λ(r) = r^{-2/(p-1)} w(log(λ r)) sampled on the trajectory grid shifted by
/// -log λ. lambda = inf returns the exact U_∞ on the trajectory grid. Samples
/// at either end where the profile value is outside e^{±700} are omitted.
RadialProfile build_profile(const PhaseTrajectory& traj, ExtReal lambda, const Params& params);

/// U_λ sampled on a caller-supplied log-radius grid (any range; uses the orbit model).
RadialProfile build_profile_on(const PhaseTrajectory& traj, ExtReal lambda, const Params& params,
                               std::span<const double> log_r);

struct ApproachReport {
    Approach approach = Approach::unknown;
    std::vector<double> crossing_times; // sign changes of w - C (normalized time)
    double crossing_spacing = 0.0;      // mean spacing over the last (up to) 10 crossings
    Approach predicted = Approach::unknown; // from the attractor eigenvalues
    bool agrees_with_prediction = false;
};

/// Monotone when w is nondecreasing (1e-9 per step), spiral when w - C changes
/// sign at least twice. Throws Error(ambiguous) when neither holds.
ApproachReport detect_approach(const PhaseTrajectory& traj, const Params& params);

struct AttractorRate {
    double rate = 0.0;      // least-squares estimate of lim w'/(w - C)
    double expected = 0.0;  // alpha*_+ from the eigenvalues
    bool double_root = false; // discriminant zero: slow algebraic convergence, looser tolerance
    double tolerance = 0.01;
};

/// Requires a monotone trajectory; throws Error(range) for spirals.
AttractorRate attractor_rate(const PhaseTrajectory& traj, const Params& params);

/// Default integration horizon 200 / min(|Re alpha*|, beta).
double default_t_max(const Params& params);

} // namespace hardy
