#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/rod_model.hpp"

namespace cosserat {

// Distributed force (per node) and couple (per element) control densities on
// a fixed time grid. Step k holds the control applied over [t_k, t_k + dt).
struct ControlField {
    int N = 0;
    int steps = 0;
    double dt = 0;
    Vec2Array force;            // steps * (N+1)
    std::vector<double> couple; // steps * N

    ControlField() = default;
    ControlField(int N_, int steps_, double dt_)
        : N(N_), steps(steps_), dt(dt_),
          force(static_cast<std::size_t>(steps_) * (N_ + 1), Vec2::Zero()),
          couple(static_cast<std::size_t>(steps_) * N_, 0.0) {}

    std::span<Vec2> force_at(int k) { return {force.data() + offset_node(k), static_cast<std::size_t>(N + 1)}; }
    std::span<const Vec2> force_at(int k) const {
        return {force.data() + offset_node(k), static_cast<std::size_t>(N + 1)};
    }
    std::span<double> couple_at(int k) { return {couple.data() + offset_elem(k), static_cast<std::size_t>(N)}; }
    std::span<const double> couple_at(int k) const {
        return {couple.data() + offset_elem(k), static_cast<std::size_t>(N)};
    }

    double horizon() const { return steps * dt; }
    bool same_shape(const ControlField& other) const {
        return N == other.N && steps == other.steps && dt == other.dt;
    }

private:
    std::size_t offset_node(int k) const { return static_cast<std::size_t>(k) * (N + 1); }
    std::size_t offset_elem(int k) const { return static_cast<std::size_t>(k) * N; }
};

struct Trajectory {
    double dt = 0;
    std::vector<RodState> states;  // steps + 1, states[k] at t = k*dt

    int steps() const { return static_cast<int>(states.size()) - 1; }
    const RodState& final_state() const { return states.back(); }
};

// Thrown when a state entry becomes non-finite or exceeds kBlowupLimit.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

inline constexpr double kBlowupLimit = 1e12;

struct MomentumRates {
    Vec2Array dp_r;
    std::vector<double> dp_theta;
};

// Conservative internal forces -dV/dq at a configuration: dtilde(Q n) on
// nodes and dtilde(m) + ds (nu x n) on elements. Clamped base entries are
// zeroed.
void internal_forces(const Vec2Array& r, const std::vector<double>& theta, const RodProperties& props,
                     Vec2Array& f_r, std::vector<double>& f_theta);

// Momentum balance: internal forces, damping -zeta p / (rho A), and the
// control densities integrated over one segment (ds * u).
MomentumRates forward_rhs(const RodState& state, std::span<const Vec2> uF, std::span<const double> uC,
                          const RodProperties& props);

// Position Verlet: half drift, full kick at the midpoint configuration, half
// drift. The base node and base element stay clamped.
RodState verlet_step(const RodState& state, std::span<const Vec2> uF, std::span<const double> uC,
                     const RodProperties& props, double dt);

// Half-step configuration q + dt/2 * M^-1 p used inside verlet_step (and
// recomputed by the adjoint sweep).
RodState half_drift(const RodState& state, const RodProperties& props, double dt);

Trajectory simulate_forward(const RodState& initial, const ControlField& control, const RodProperties& props);

}  // namespace cosserat
