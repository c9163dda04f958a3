#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

namespace {

VecX se2_bracket_racer(const VecX& xi, const VecX& eta) {
    VecX out(3);
    out << 0.0, xi[2] * eta[0] - xi[0] * eta[2], xi[0] * eta[1] - xi[1] * eta[0];
    return out;
}

}  // namespace

SystemEntry roller_racer_entry(const RacerParams& params, EnergyMode mode) {
    if (params.d2 == 0.0) {
        throw ConfigError("roller racer requires d2 != 0");
    }
    if (!(params.m > 0.0) || !(params.body_inertia > 0.0) || !(params.coupler_inertia > 0.0)) {
        throw ConfigError("roller racer inertias and mass must be positive");
    }
    const double m = params.m;
    const double i1 = params.body_inertia;
    const double i2 = params.coupler_inertia;
    const double d1 = params.d1;
    const double d2 = params.d2;

    BundleSetup setup;
    setup.dim_g = 3;
    setup.dim_x = 1;
    setup.bracket = se2_bracket_racer;
    MatX mass(4, 4);
    mass << i1 + i2, 0, 0, i2,
        0, m, 0, 0,
        0, 0, m, 0,
        i2, 0, 0, i2;
    setup.mass = mass;
    setup.mass_inv = mass.inverse();
    setup.frame.in_dim = 1;
    setup.frame.out_dim = 4;
    setup.frame.count = 2;
    setup.frame.orthonormal = true;
    setup.frame.field = [m, i1, i2, d1, d2](const VecX& x, int i) {
        VecX e(4);
        if (i == 1) {
            e << 0.0, 0.0, 1.0 / std::sqrt(m), 0.0;
            return e;
        }
        const double c = std::cos(x[0]);
        const double s = std::sin(x[0]);
        const double d = s * s / m + d1 * d1 * c * c / i1 + d2 * d2 / i2;
        e << d1 * c / i1, -s / m, 0.0, -d1 * c / i1 + d2 / i2;
        return VecX(e / std::sqrt(d));
    };
    setup.frame.jacobian = [m, i1, i2, d1, d2](const VecX& x, int i) {
        MatX de = MatX::Zero(4, 1);
        if (i == 1) return de;
        const double c = std::cos(x[0]);
        const double s = std::sin(x[0]);
        const double d = s * s / m + d1 * d1 * c * c / i1 + d2 * d2 / i2;
        const double dprime = 2.0 * s * c * (1.0 / m - d1 * d1 / i1);
        VecX w(4), wprime(4);
        w << d1 * c / i1, -s / m, 0.0, -d1 * c / i1 + d2 / i2;
        wprime << -d1 * s / i1, -c / m, 0.0, d1 * s / i1;
        de.col(0) = wprime / std::sqrt(d) - w * (0.5 * dprime / std::pow(d, 1.5));
        return de;
    };
    setup.chart = se2_angle_chart();
    setup.x_name = "phi";
    setup.px_name = "pphi";
    validate_bundle(setup, VecX::Constant(1, -3.2), VecX::Constant(1, 3.2));

    SystemEntry entry;
    entry.name = "roller-racer";
    entry.field = extended_field_bundle(setup);
    entry.layout = entry.field.layout;

    entry.initial_state = VecX::Zero(entry.layout.dim());
    const int pi_off = entry.layout.offset("Pi");
    const int pphi_off = entry.layout.offset("pphi");
    entry.initial_state[pi_off + 1] = 1.0;
    entry.initial_state[pphi_off] = 1.0;
    entry.initial_state = entry.field.project_to_constraint(entry.initial_state);

    const bool extended_energy = (mode != EnergyMode::Original);
    IntegralSpec j1 = entry.field.integrals[2];
    IntegralSpec j2 = entry.field.integrals[3];
    IntegralSpec energy = extended_energy ? entry.field.integrals[0] : entry.field.integrals[1];
    j1.gain = j2.gain = energy.gain = 100.0;
    entry.integrals = {j1, j2, energy};
    detail::default_targets(entry);

    const int dim = entry.layout.dim();
    entry.sample_state = [dim](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(dim);
        for (int i = 0; i < dim; ++i) x[i] = unit(rng);
        x[0] *= 3.14159265358979323846;
        x[3] *= 3.14159265358979323846;
        return x;
    };

    const double htilde0 = entry.integral(extended_energy ? "htilde" : "h").target;
    auto project = entry.field.project_to_constraint;
    auto htilde_value = entry.field.integrals[0].value;
    entry.sample_zero_set = [dim, pi_off, pphi_off, htilde0, project,
                             htilde_value](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (;;) {
            VecX x(dim);
            for (int i = 0; i < dim; ++i) x[i] = unit(rng);
            x[0] *= 3.14159265358979323846;
            x[3] *= 3.14159265358979323846;
            x = project(x);
            const double ht = htilde_value(x);
            if (ht < 1e-8) continue;  // degenerate momentum draw
            const double scale = std::sqrt(htilde0 / ht);
            x.segment(pi_off, 3) *= scale;
            x[pphi_off] *= scale;
            return x;
        }
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 10.0;
    return entry;
}

}  // namespace nhfi
