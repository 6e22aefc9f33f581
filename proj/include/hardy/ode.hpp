#pragma once

// Embedded Dormand–Prince 5(4) integrator for planar systems, with the
// standard fourth-order continuous extension stored per accepted step.

#include <array>
#include <cmath>
#include <functional>
#include <vector>

namespace hardy::ode {

using State = std::array<double, 2>;

struct DenseStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<State, 5> rc{}; // Hairer's rcont1..rcont5

    double t1() const { return t0 + h; }
    State eval(double t) const;
    /// Time derivative of the interpolant.
    State eval_derivative(double t) const;
};

struct Options {
    State atol{1e-10, 1e-10};
    double rtol = 1e-10;
    double h_init = 0.0; // 0: automatic
    double h_max = 1.0;
    long max_steps = 2'000'000;
};

enum class Status { stopped, reached_end, step_underflow, too_many_steps, non_finite };

struct Result {
    Status status = Status::reached_end;
    std::vector<DenseStep> steps;
    double t = 0.0;
    State y{};
    long accepted = 0;
    long rejected = 0;
};

using Rhs = std::function<State(double, const State&)>;
/// Called after every accepted step with (t, y, step); returning true stops.
using StopFn = std::function<bool(double, const State&, const DenseStep&)>;

Result integrate(const Rhs& f, double t0, const State& y0, double t_end, const Options& opt,
                 const StopFn& stop = {});

} // namespace hardy::ode
