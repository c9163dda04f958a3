#include "nhfi/steppers.hpp"

#include <cmath>

namespace nhfi {

VecX step(StepperKind kind, const RateFn& field, const VecX& state, double dt) {
    const auto n = state.size();
    VecX k1(n);
    field(state, k1);
    if (kind == StepperKind::Euler) {
        return state + dt * k1;
    }
    VecX k2(n), k3(n), k4(n);
    field(state + 0.5 * dt * k1, k2);
    field(state + 0.5 * dt * k2, k3);
    field(state + dt * k3, k4);
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

int TrajectoryRecord::channel_index(std::string_view name) const {
    for (std::size_t i = 0; i < channel_names.size(); ++i) {
        if (channel_names[i] == name) return static_cast<int>(i);
    }
    throw Error("no channel named '" + std::string(name) + "'");
}

const std::vector<double>& TrajectoryRecord::channel(std::string_view name) const {
    return channels[channel_index(name)];
}

TrajectoryRecord integrate(StepperKind kind, const RateFn& field, const VecX& x0, double dt,
                           double t_final, const std::vector<Observer>& observers,
                           const IntegrateOptions& options) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("step size must be positive and finite");
    if (t_final < 0.0) throw Error("horizon must be nonnegative");
    const std::int64_t n_steps = std::llround(t_final / dt);

    TrajectoryRecord rec;
    rec.dt = dt;
    const std::size_t nc = observers.size();
    rec.channel_names.reserve(nc);
    rec.channels.resize(nc);
    rec.channel_abs_max.assign(nc, 0.0);
    rec.channel_final.assign(nc, 0.0);
    for (const auto& ob : observers) rec.channel_names.push_back(ob.name);

    VecX x = x0;
    auto record_step = [&](std::int64_t i) {
        const double t = static_cast<double>(i) * dt;
        if ((i % options.channel_stride == 0) || i == n_steps) {
            rec.times.push_back(t);
            for (std::size_t c = 0; c < nc; ++c) rec.channels[c].push_back(rec.channel_final[c]);
        }
        if (options.state_stride > 0 && ((i % options.state_stride == 0) || i == n_steps)) {
            rec.state_times.push_back(t);
            rec.states.push_back(x);
        }
    };
    auto eval_channels = [&](std::int64_t i) {
        const double t = static_cast<double>(i) * dt;
        for (std::size_t c = 0; c < nc; ++c) {
            const double v = observers[c].fn(t, x);
            rec.channel_abs_max[c] = std::max(rec.channel_abs_max[c], std::abs(v));
            rec.channel_final[c] = v;
        }
    };

    eval_channels(0);
    record_step(0);
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        x = step(kind, field, x, dt);
        if (!x.allFinite()) {
            rec.failed = true;
            rec.failure_step = i;
            return rec;
        }
        eval_channels(i);
        record_step(i);
    }
    return rec;
}

DlaState dla_step(const DlaState& s) {
    const double h = s.step;
    const double h2 = h * h;
    const Vec3& q0 = s.q_prev;
    const Vec3& q1 = s.q_curr;
    const double y1 = q1.y();
    const double lambda =
        ((1.0 - h2) * q1.x() - q0.x() + y1 * ((1.0 - h2) * q1.z() - q0.z())) /
        (h2 * (1.0 + y1 * y1));
    const Vec3 a(1.0, 0.0, y1);
    const Vec3 q2 = 2.0 * q1 - q0 - h2 * q1 - h2 * lambda * a;
    return DlaState{q1, q2, h};
}

double dla_constraint_residual(const DlaState& before, const DlaState& after) {
    const Vec3& q1 = before.q_curr;
    const Vec3& q2 = after.q_curr;
    return std::abs(q2.x() - q1.x() + q1.y() * (q2.z() - q1.z()));
}

Vec3 dla_momentum(const DlaState& s) { return (s.q_curr - s.q_prev) / s.step; }

}  // namespace nhfi
