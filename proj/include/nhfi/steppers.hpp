#pragma once

#include "nhfi/core.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace nhfi {

enum class StepperKind { Euler, RK4 };

using RateFn = std::function<void(const VecX&, VecX&)>;

/// One explicit Euler or classical RK4 step.
VecX step(StepperKind kind, const RateFn& field, const VecX& state, double dt);

struct Observer {
    std::string name;
    std::function<double(double t, const VecX&)> fn;
};

/// Time-stamped states plus per-step diagnostic channels. Channels are
/// stored on the sampled grid; their running |max| and final values are
/// tracked over every evaluated step.
struct TrajectoryRecord {
    std::vector<double> times;  // channel sample grid
    std::vector<std::string> channel_names;
    std::vector<std::vector<double>> channels;  // channel-major
    std::vector<double> channel_abs_max;
    std::vector<double> channel_final;
    std::vector<double> state_times;
    std::vector<VecX> states;
    double dt = 0.0;
    bool failed = false;
    std::int64_t failure_step = -1;

    int channel_index(std::string_view name) const;
    const std::vector<double>& channel(std::string_view name) const;
    double max_abs(std::string_view name) const { return channel_abs_max[channel_index(name)]; }
    double final_abs(std::string_view name) const {
        return std::abs(channel_final[channel_index(name)]);
    }
};

struct IntegrateOptions {
    int channel_stride = 1;  // channel samples kept every this many steps
    int state_stride = 1;    // states kept every this many steps; 0 drops them
};

/// Fixed-step integration over [0, T] with N = round(T/dt) steps. Observers
/// are evaluated every step; a NaN/Inf state aborts with the partial record
/// flagged failed at the offending step index.
TrajectoryRecord integrate(StepperKind kind, const RateFn& field, const VecX& x0, double dt,
                           double t_final, const std::vector<Observer>& observers,
                           const IntegrateOptions& options = {});

/// Two consecutive configurations of the discrete Lagrange-d'Alembert
/// scheme for the nonholonomic oscillator, advanced by the explicit
/// two-step update.
struct DlaState {
    Vec3 q_prev;
    Vec3 q_curr;
    double step = 0.0;
};

DlaState dla_step(const DlaState& s);

/// |x_{i+2} - x_{i+1} + y_{i+1} (z_{i+2} - z_{i+1})| for the advanced pair.
double dla_constraint_residual(const DlaState& before, const DlaState& after);

/// Discrete momentum p_{i+1} = (q_{i+1} - q_i) / h.
Vec3 dla_momentum(const DlaState& s);

}  // namespace nhfi
