#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/adjoint_solver.hpp"
#include "cosserat/forward_solver.hpp"

namespace cosserat {

struct CostWeights {
    double chi1 = 10.0;   // deformation penalty
    double chi2 = 2e4;    // terminal miss
    double eta = 3e-5;    // learning rate per unit segment length (step is eta * ds * gradient)
    double T = 0.5;       // horizon [s]

    void validate() const;
};

struct CostBreakdown {
    double running = 0;
    double terminal = 0;
    double total = 0;
};

// J = sum_k dt [ 1/2 ds |u_k|^2 + chi1 V(q_k) ] + chi2/2 |r_tip(T) - target|^2,
// k = 0 .. steps-1.
CostBreakdown evaluate_cost(const Trajectory& trajectory, const ControlField& control, const RodProperties& props,
                            const CostWeights& weights, const Vec2& target);

// dH/du = gamma - u, with gamma taken at the step midpoint.
ControlField control_gradient(const BackwardSweep& sweep, const ControlField& control);

// u + eta * gradient.
ControlField update_control(const ControlField& control, const ControlField& gradient, double eta);

// <a, b> with dt * ds quadrature over every control entry.
double control_inner(const ControlField& a, const ControlField& b, double ds);
double max_abs_difference(const ControlField& a, const ControlField& b);

struct IterationRecord {
    int k = 0;
    double J = 0;
    double J_running = 0;
    double J_terminal = 0;
    double du_max = 0;
    double tip_dist = 0;
};

struct SolveLog {
    std::vector<IterationRecord> records;
    std::vector<std::string> warnings;
};

struct SolveOptions {
    int max_iters = 20;
    double epsilon = 1e-8;
    // Per-iteration learning rate; falls back to weights.eta when empty.
    std::function<double(int)> eta_schedule;
    std::optional<ControlField> initial_control;
    // Called after each forward sweep with (iteration, trajectory, control).
    std::function<void(int, const Trajectory&, const ControlField&)> on_iteration;
};

struct SolveResult {
    ControlField control;        // last simulated control
    Trajectory trajectory;       // its trajectory
    ControlField next_control;   // the update computed from it
    SolveLog log;
    bool converged = false;
};

// Raised when a sweep blows up; carries the iterations completed so far.
class SolveAborted : public std::runtime_error {
public:
    SolveAborted(const std::string& what, SolveLog log) : std::runtime_error(what), log_(std::move(log)) {}
    const SolveLog& log() const { return log_; }

private:
    SolveLog log_;
};

int steps_for_horizon(double T, double dt);

SolveResult solve(const RodState& initial, const RodProperties& props, const CostWeights& weights,
                  const Vec2& target, double dt, const SolveOptions& options);

}  // namespace cosserat
