#include "nhfi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

namespace nhfi {

namespace {

std::vector<Observer> build_observers(const SystemEntry& entry, const LyapunovSpec& lyap,
                                      bool with_exact) {
    std::vector<Observer> obs;
    if (with_exact && entry.exact) {
        const auto& ex = *entry.exact;
        for (std::size_t k = 0; k < ex.names.size(); ++k) {
            const int idx = ex.indices[k];
            auto eval = ex.eval;
            obs.push_back({ex.names[k], [idx, k, eval](double t, const VecX& x) {
                               return x[idx] - eval(t)[static_cast<int>(k)];
                           }});
        }
    }
    if (!entry.penalties.empty()) {
        const auto layout = entry.layout;
        const std::string block = entry.penalties.front().block;
        obs.push_back({"defect", [layout, block](double, const VecX& x) {
                           return orthogonality_defect(layout.matrix(x, block));
                       }});
    }
    for (const auto& f : entry.integrals) {
        obs.push_back({"d" + f.name, [f](double, const VecX& x) { return f.value(x) - f.target; }});
    }
    const auto layout = entry.layout;
    obs.push_back({"V", [lyap, layout](double, const VecX& x) {
                       return lyapunov_value(lyap, layout, x);
                   }});
    return obs;
}

TrajectoryRecord run_dla(const std::vector<Observer>& observers, const VecX& x0, double dt,
                         double horizon, const IntegrateOptions& options) {
    const std::int64_t n_steps = std::llround(horizon / dt);
    TrajectoryRecord rec;
    rec.dt = dt;
    const std::size_t nc = observers.size() + 1;
    for (const auto& ob : observers) rec.channel_names.push_back(ob.name);
    rec.channel_names.push_back("dla_residual");
    rec.channels.resize(nc);
    rec.channel_abs_max.assign(nc, 0.0);
    rec.channel_final.assign(nc, 0.0);

    const Vec3 q0 = x0.head(3);
    const Vec3 p0 = x0.tail(3);
    DlaState dla{q0, q0 + dt * p0, dt};
    VecX x(6);
    double residual = 0.0;

    auto eval_channels = [&](std::int64_t i, const Vec3& q, const Vec3& p) {
        const double t = static_cast<double>(i) * dt;
        x.head(3) = q;
        x.tail(3) = p;
        for (std::size_t c = 0; c + 1 < nc; ++c) {
            const double v = observers[c].fn(t, x);
            rec.channel_abs_max[c] = std::max(rec.channel_abs_max[c], std::abs(v));
            rec.channel_final[c] = v;
        }
        rec.channel_abs_max[nc - 1] = std::max(rec.channel_abs_max[nc - 1], residual);
        rec.channel_final[nc - 1] = residual;
    };
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

    eval_channels(0, q0, p0);
    record_step(0);
    for (std::int64_t i = 1; i <= n_steps; ++i) {
        const DlaState next = dla_step(dla);
        residual = dla_constraint_residual(dla, next);
        dla = next;
        if (!dla.q_curr.allFinite()) {
            rec.failed = true;
            rec.failure_step = i;
            return rec;
        }
        eval_channels(i, dla.q_curr, dla_momentum(dla));
        record_step(i);
    }
    return rec;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config) {
    RunResult result;
    result.entry = make_system(config.system, config.system_options);
    SystemEntry& entry = result.entry;

    if (config.initial_state) {
        if (static_cast<int>(config.initial_state->size()) != entry.layout.dim()) {
            throw ConfigError("initial state needs " + std::to_string(entry.layout.dim()) +
                              " entries for system '" + entry.name + "'");
        }
        entry.initial_state =
            Eigen::Map<const VecX>(config.initial_state->data(), entry.layout.dim());
        require_finite(entry.initial_state, "initial state");
        detail::default_targets(entry);
    }
    for (const auto& [name, value] : config.targets) {
        entry.integral(name).target = value;
    }
    for (const auto& [name, value] : config.gains) {
        if (value < 0.0) throw ConfigError("gain for '" + name + "' must be nonnegative");
        if (name == "manifold") {
            for (auto& pen : entry.penalties) pen.gain = value;
        } else {
            entry.integral(name).gain = value;
        }
    }
    if (entry.validate_targets) entry.validate_targets(entry.integrals);

    const double dt = config.dt > 0.0 ? config.dt : entry.default_dt;
    const double horizon = config.horizon >= 0.0 ? config.horizon : entry.default_horizon;
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");

    result.lyapunov = LyapunovSpec{entry.integrals, entry.penalties};

    const bool with_exact = config.reference && !config.initial_state.has_value();
    const auto observers = build_observers(entry, result.lyapunov, with_exact);

    IntegrateOptions options;
    options.channel_stride = std::max(1, config.csv_stride);
    options.state_stride = config.poincare ? 1 : options.channel_stride;

    if (config.use_dla) {
        if (!entry.has_dla) {
            throw ConfigError("system '" + entry.name + "' has no discrete "
                              "Lagrange-d'Alembert baseline");
        }
        result.record = run_dla(observers, entry.initial_state, dt, horizon, options);
    } else {
        RateFn rate;
        if (config.feedback) {
            std::shared_ptr<FeedbackField> fb;
            if (config.gain_matrix) {
                const int n = entry.layout.dim();
                if (static_cast<int>(config.gain_matrix->size()) != n * n) {
                    throw ConfigError("gain matrix needs " + std::to_string(n * n) + " entries");
                }
                MatX a(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) a(i, j) = (*config.gain_matrix)[i * n + j];
                fb = std::make_shared<FeedbackField>(entry.field, result.lyapunov, a);
            } else {
                fb = std::make_shared<FeedbackField>(entry.field, result.lyapunov);
            }
            rate = [fb](const VecX& x, VecX& dx) { fb->rate(x, dx); };
        } else {
            rate = entry.field.rate;
        }
        result.record =
            integrate(config.stepper, rate, entry.initial_state, dt, horizon, observers, options);
    }

    if (!config.csv_path.empty()) emit_csv(result.record, config.csv_path);
    if (!config.svg_path.empty()) emit_svg(result.record, config.svg_path);
    return result;
}

std::vector<ChannelStat> drift_metrics(const TrajectoryRecord& record) {
    std::vector<ChannelStat> stats;
    for (std::size_t c = 0; c < record.channel_names.size(); ++c) {
        stats.push_back({record.channel_names[c], record.channel_abs_max[c],
                         std::abs(record.channel_final[c])});
    }
    return stats;
}

std::vector<PoincarePoint> poincare_section(const TrajectoryRecord& record, int coordinate,
                                            int rate_coordinate) {
    std::vector<PoincarePoint> points;
    for (std::size_t i = 0; i + 1 < record.states.size(); ++i) {
        const double y0 = record.states[i][coordinate];
        const double y1 = record.states[i + 1][coordinate];
        if (!(y0 < 0.0 && y1 >= 0.0)) continue;
        const double alpha = -y0 / (y1 - y0);
        const VecX state = (1.0 - alpha) * record.states[i] + alpha * record.states[i + 1];
        if (state[rate_coordinate] <= 0.0) continue;
        const double t = (1.0 - alpha) * record.state_times[i] + alpha * record.state_times[i + 1];
        points.push_back({t, state});
    }
    return points;
}

double hausdorff_distance(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.empty() || b.empty()) {
        throw Error("hausdorff_distance requires nonempty point sets");
    }
    auto directed = [](const std::vector<Vec2>& from, const std::vector<Vec2>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, (p - q).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace nhfi
