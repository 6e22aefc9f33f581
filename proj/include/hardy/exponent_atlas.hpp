#pragma once

#include "hardy/ext_real.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hardy {

/// Problem triple (N, nu, p) for  -Δu + (nu^2 - nu_*^2)|x|^-2 u = u^p  with the
/// derived constants used throughout. Construct through make_params().
struct Params {
    int N = 3;
    double nu = 1.0;
    double p = 2.0;

    double nu_star = 0.5; // (N-2)/2, square root of the Hardy constant
    double mu = 0.0;      // nu^2 - nu_*^2, coupling of the inverse-square potential
    double beta = 0.0;    // nu_* - 2/(p-1), damping of the Fowler system
    double gamma = 0.0;   // nu^2 - beta^2, equals C_{p,nu}^{p-1}

    /// 2/(p-1): the slow decay exponent, U_∞ ~ r^{-slow_rate()}.
    double slow_rate() const { return 2.0 / (p - 1.0); }
};

Params make_params(int N, double nu, double p);

/// Validates an (N, nu) pair; throws Error(validation) naming the violated bound.
void check_dimension_pair(int N, double nu);

/// C_{p,nu} = gamma^{1/(p-1)}; throws Error(range) when gamma <= 0.
double singular_coefficient(const Params& params);

struct ExponentBounds {
    double p_lower = 0.0;   // p_* = 1 + 2/(nu_* + nu)
    double p_sobolev = 0.0; // p_S = (N+2)/(N-2)
    ExtReal p_upper;        // p^* = 1 + 2/(nu_* - nu) if nu < nu_*, else +inf
};

ExponentBounds exponent_bounds(int N, double nu);

/// θ(s) = (s + nu_*)^2 (s - 2).
double theta(double s, double nu_star);

/// Sub-case of the root classification of θ(s) = -2 nu^2 on (-nu_*, min(-nu_*+nu, 0)).
enum class RootCase {
    low_dim_no_root,   // 3 <= N <= 10, nu >= nu_*
    low_dim_one_root,  // 3 <= N <= 10, nu < nu_*
    high_dim_no_root,  // N > 10, nu > nu_bar
    high_dim_two_roots,// N > 10, nu_* < nu <= nu_bar
    high_dim_one_root, // N > 10, nu <= nu_*
};

const char* to_string(RootCase c);

struct ThetaRoots {
    double sigma_sharp = 0.0;
    std::optional<double> sigma_minus;
    std::optional<double> sigma_plus;
    RootCase root_case = RootCase::low_dim_no_root;
    bool double_root = false; // sigma_minus == sigma_plus == s_min (tangency at nu = nu_bar)
};

/// Residual tolerance on θ(σ) + 2 nu^2, relative to max(1, 2 nu^2).
inline constexpr double tol_root = 1e-12;

ThetaRoots theta_roots(int N, double nu);

/// s_min = -(nu_* - 4)/3, the local minimum of θ.
double theta_min_location(double nu_star);

double nu_bar(int N);

struct StabilityExponents {
    double p_sharp = 0.0;
    std::optional<double> p_minus;
    std::optional<double> p_plus;
};

StabilityExponents stability_exponents(int N, double nu);

/// Joseph–Lundgren exponent of the pure Laplacian; +inf for N <= 10.
ExtReal joseph_lundgren_exponent(int N);

enum class Lemma2Case { a, b, c };

const char* to_string(Lemma2Case c);

/// Case label of the stability lemma for (N, nu). At nu = nu_bar (N > 10) the
/// coincident pair p_- = p_+ is reported as case (a) with a single-point interval.
Lemma2Case lemma2_case(int N, double nu);

struct PInterval {
    ExtReal lower;
    ExtReal upper;
    bool lower_closed = false;
    bool upper_closed = false;

    bool contains(double p) const;
};

struct ExponentReport {
    int N = 3;
    double nu = 1.0;
    double p_lower = 0.0;
    double p_sobolev = 0.0;
    ExtReal p_upper;
    double sigma_sharp = 0.0;
    std::optional<double> sigma_minus;
    std::optional<double> sigma_plus;
    double p_sharp = 0.0;
    std::optional<double> p_minus;
    std::optional<double> p_plus;
    double nu_bar = 0.0;
    std::vector<PInterval> stability_intervals;
    Lemma2Case lemma2_case = Lemma2Case::c;
    RootCase root_case = RootCase::low_dim_no_root;
    bool double_root = false;

    friend bool operator==(const ExponentReport&, const ExponentReport&);
};

ExponentReport exponent_report(int N, double nu);

/// True when 1 < p_* < p_# < p_S < p_- <= p_+ < p^* holds over the defined exponents.
bool ordering_chain_holds(const ExponentReport& report);

enum class RegimeVerdict { stable, unstable, outside_range };

const char* to_string(RegimeVerdict v);

struct SingularStability {
    RegimeVerdict verdict = RegimeVerdict::outside_range;
    Lemma2Case lemma2_case = Lemma2Case::c;
    RegimeVerdict interval_verdict = RegimeVerdict::outside_range; // from the root intervals
    bool consistent = true;                                       // verdict == interval_verdict
};

/// Stability of U_∞ from p·gamma <= nu^2, cross-checked against the root intervals.
SingularStability classify_singular_stability(const Params& params);

} // namespace hardy
