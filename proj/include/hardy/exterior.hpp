#pragma once

// Radial exterior Dirichlet problem on r > R_K with constant boundary value psi,
// solved through the sub/supersolution pair built on a slow-decay base solution
// U_* and monotone iteration. Unknowns are deviations v = U_* - u carried in the
// Liouville form f = (r/R_K)^{nu_*} v, where the radial Hardy operator becomes
// -f'' + nu^2 f on a uniform grid in t = log r.

#include "hardy/fowler.hpp"
#include "hardy/profile.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace hardy {

struct ExteriorOptions {
    double span = 30.0;                // t-length of the truncated domain [log R_K, log R_K + span]
    double spacing = 1.0 / 32768.0;    // uniform t spacing
    int max_iters = 500;
    double tol = 1e-9;                 // relative sup-norm change stopping the iteration
    std::size_t residual_stride = 32;  // nodes between samples of the residual check
};

/// Uniform t-grid with nodes t_i = log R_K + i dt, i = 0..n.
struct TGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t n = 0; // number of intervals

    double t(std::size_t i) const { return t0 + dt * double(i); }
    std::size_t size() const { return n + 1; }
};

TGrid make_tgrid(double R_K, const ExteriorOptions& opts);

struct LinearHardyProblem {
    double R_K = 1.0;
    double boundary_value = 0.0;
    TGrid grid;
    std::vector<double> scaled_potential; // W_i = r^2 V(r) at the grid nodes
};

/// W sampled from a function of t on the grid defined by opts.
LinearHardyProblem make_linear_problem(double R_K, double boundary_value, const std::function<double(double)>& W,
                                       const ExteriorOptions& opts = {});

struct LinearHardySolution {
    TGrid grid;
    std::vector<double> liouville; // f = h (r/R_K)^{nu_*}
    double nu_star = 0.0;

    double value(std::size_t i) const; // h at node i
    /// h on every `stride`-th node (zero values are kept; no positivity validation).
    RadialProfile profile(std::size_t stride = 1) const;
};

/// Minimal positive solution of -h'' - (N-1)/r h' + (mu - V r^2)/r^2 h = 0, h(R_K) = b,
/// decaying at infinity. Centered differences in the Liouville variable; the far
/// end uses the exact discrete decaying mode for the terminal potential.
/// Throws Error(noncoercive) when r^2 V > nu^2 anywhere.
LinearHardySolution solve_linear_hardy(const LinearHardyProblem& prob, const Params& params);

/// Base solution sampled on the exterior grid.
struct ExteriorBase {
    Params params;
    TGrid grid;
    ExtReal lambda;
    double c = 0.0;          // C_{p,nu}
    std::vector<double> w;   // U_* r^{2/(p-1)}
    std::vector<double> wp;  // d w / dt
    std::vector<double> gap; // w - C
    std::vector<double> fstar; // U_* (r/R_K)^{nu_*}

    double ustar(std::size_t i) const;
    double ustar_t(std::size_t i) const; // dU_*/dt
};

struct ExteriorProblem {
    Params params;
    double R_K = 1.0;
    double psi = 0.0;
    ExteriorOptions opts;
    std::shared_ptr<const ExteriorBase> base;
};

/// Validates 0 <= psi <= U_*(R_K), p gamma <= nu^2 and U_* <= U_∞ on the grid.
/// `traj` supplies U_λ for finite λ and may be null for λ = inf.
ExteriorProblem make_exterior_problem(const Params& params, double R_K, double psi, ExtReal lambda,
                                      const PhaseTrajectory* traj, const ExteriorOptions& opts = {});

/// u = U_* - v with v = f (r/R_K)^{-nu_*} on the exterior grid.
struct ExteriorField {
    std::shared_ptr<const ExteriorBase> base;
    std::vector<double> liouville;

    double deviation(std::size_t i) const;
    double value(std::size_t i) const;
    /// Profile on every `stride`-th node with slopes and singular gap. The
    /// boundary node is included even when its value is zero.
    RadialProfile profile(std::size_t stride) const;
};

struct ResidualStats {
    double max_abs = 0.0;
    double min_signed = 0.0;
    double max_signed = 0.0;
    std::size_t samples = 0;
};

/// Scaled residual of -Δu + mu u/r^2 - u^p on the subsampled interior, fourth-order
/// stencils with spacing residual_stride * dt.
ResidualStats field_residual(const ExteriorField& field, const ExteriorProblem& ext);

/// U_* - h_psi: h_psi solves the linear problem with potential p U_*^{p-1} and data U_*(R_K) - psi.
ExteriorField build_subsolution(const ExteriorProblem& ext);

/// U_* - eta_psi with potential U_*^{p-1}.
ExteriorField build_supersolution(const ExteriorProblem& ext);

struct IterationResult {
    ExteriorField solution;
    int iterations = 0;
    double last_change = 0.0;
    double coupling = 0.0; // M in the log variable: max p super^{p-1} r^2
};

/// Monotone iteration from the subsolution. Throws Error(monotonicity_broken)
/// when an iterate leaves [sub, super] or decreases, Error(max_iters) after opts.max_iters.
IterationResult monotone_iterate(const ExteriorField& sub, const ExteriorField& super, const ExteriorProblem& ext);

struct ExteriorReport {
    ExtReal lambda;
    ExteriorField sub;
    ExteriorField super;
    IterationResult result;
    ResidualStats sub_residual;
    ResidualStats super_residual;
    ResidualStats residual;
    bool ordered = false;       // 0 <= eta <= h and sub <= U^psi <= super <= U_*
    bool positive = false;      // U^psi > 0 away from the boundary
    double tail_deviation = 0.0;       // (U_* - U^psi) r^{nu_*} at the last node
    double boundary_deviation = 0.0;   // same quantity at R_K
};

ExteriorReport solve_exterior(const ExteriorProblem& ext);

/// λ_psi = inf{λ : U_λ(R_K) > psi} by bisection on the scaling law; 0 for psi = 0.
/// Throws Error(validation) when psi >= U_∞(R_K).
double lambda_psi(const PhaseTrajectory& traj, const Params& params, double R_K, double psi);

struct FamilyReport {
    std::vector<ExteriorReport> members;
    /// separation[i][j]: min over the last decade of |U_λj - U_λi| r^{nu_*}
    std::vector<std::vector<double>> separation;
    bool distinct = false; // separations exceed the summed tail deviations for every pair
};

/// U_λ^psi for each λ (inf allowed). Rejects λ <= λ_psi. Members are computed on
/// up to `workers` threads; results do not depend on the worker count.
FamilyReport continuum_family(const Params& params, double R_K, double psi, const std::vector<ExtReal>& lambdas,
                              const PhaseTrajectory& traj, const ExteriorOptions& opts = {}, int workers = 1);

} // namespace hardy
