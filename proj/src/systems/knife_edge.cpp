#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

SystemEntry knife_edge_entry(const KnifeEdgeParams& params, EnergyMode mode) {
    if (!(params.incline > 0.0) || !(params.incline < 1.5707963267948966)) {
        throw ConfigError("knife edge incline must lie in (0, pi/2)");
    }
    if (!(params.m > 0.0) || !(params.inertia > 0.0) || !(params.gravity > 0.0)) {
        throw ConfigError("knife edge parameters must be positive");
    }
    const double m = params.m;
    const double jin = params.inertia;
    const double slope = params.m * params.gravity * std::sin(params.incline);
    const double sqm = std::sqrt(m);

    CanonicalSetup setup = CanonicalSetup::kinetic(3);
    const Mat3 mass = Vec3(m, m, jin).asDiagonal();
    const Mat3 mass_inv = Vec3(1.0 / m, 1.0 / m, 1.0 / jin).asDiagonal();
    setup.mass = [mass](const VecX&) { return MatX(mass); };
    setup.mass_inv = [mass_inv](const VecX&) { return MatX(mass_inv); };
    setup.potential = [slope](const VecX& q) { return -slope * q[0]; };
    setup.potential_grad = [slope](const VecX&) {
        VecX g(3);
        g << -slope, 0.0, 0.0;
        return g;
    };
    setup.frame.in_dim = 3;
    setup.frame.out_dim = 3;
    setup.frame.count = 1;
    setup.frame.orthonormal = true;
    setup.frame.field = [sqm](const VecX& q, int) {
        VecX e(3);
        e << std::sin(q[2]) / sqm, -std::cos(q[2]) / sqm, 0.0;
        return e;
    };
    setup.frame.flat = [sqm](const VecX& q, int) {
        VecX f(3);
        f << sqm * std::sin(q[2]), -sqm * std::cos(q[2]), 0.0;
        return f;
    };
    setup.frame.jacobian = [sqm](const VecX& q, int) {
        MatX de = MatX::Zero(3, 3);
        de(0, 2) = std::cos(q[2]) / sqm;
        de(1, 2) = std::sin(q[2]) / sqm;
        return de;
    };
    validate_canonical(setup, VecX::Constant(3, -3.0), VecX::Constant(3, 3.0));

    SystemEntry entry;
    entry.name = "knife-edge";
    entry.field = extended_field_canonical(setup);
    entry.layout = entry.field.layout;

    entry.initial_state = VecX::Zero(6);
    entry.initial_state[5] = 0.5;  // p_phi

    const bool extended_energy = (mode == EnergyMode::Extended);
    IntegralSpec j1 = entry.field.integrals[2];  // "J"
    j1.name = "J1";
    j1.gain = 1000.0;
    IntegralSpec j2;
    j2.name = "J2";
    j2.value = [](const VecX& x) { return x[5]; };
    j2.gradient = [](const VecX& x) {
        VecX g = VecX::Zero(x.size());
        g[5] = 1.0;
        return g;
    };
    j2.gain = 1000.0;
    // p_phi is conserved by the extended flow only where the constraint
    // momentum vanishes: d/dt p_phi = <p,e> (p_x cos + p_y sin) / sqrt(m).
    j2.on_constraint_only = true;
    IntegralSpec energy = extended_energy ? entry.field.integrals[0] : entry.field.integrals[1];
    energy.name = extended_energy ? "Htilde" : "H";
    energy.gain = 1000.0;
    entry.integrals = {j1, j2, energy};
    detail::default_targets(entry);

    const KnifeEdgeParams defaults;
    const bool default_data = params.m == defaults.m && params.inertia == defaults.inertia &&
                            params.gravity == defaults.gravity &&
                            params.incline == defaults.incline;
    if (default_data) {
        SystemEntry::ExactReference exact;
        exact.names = {"dx", "dy", "dphi"};
        exact.indices = {0, 1, 2};
        exact.eval = [](double t) {
            VecX v(3);
            v << 0.5 * (1.0 - std::cos(t)), 0.5 * (t - std::sin(t)), 0.5 * t;
            return v;
        };
        entry.exact = exact;
    }

    entry.sample_state = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(6);
        for (int i = 0; i < 6; ++i) x[i] = unit(rng);
        x[2] *= 3.14159265358979323846;
        return x;
    };

    const double h_target = 0.125;
    const double j2_target = 0.5;
    entry.sample_zero_set = [slope, jin, m, h_target, j2_target](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        const double phi = 3.14159265358979323846 * unit(rng);
        const double w = unit(rng);  // momentum along the blade: J1 = 0
        VecX x(6);
        x[1] = unit(rng);
        x[2] = phi;
        x[3] = w * std::cos(phi);
        x[4] = w * std::sin(phi);
        x[5] = j2_target;
        const double kinetic = 0.5 * w * w / m + 0.5 * j2_target * j2_target / jin;
        x[0] = (kinetic - h_target) / slope;
        return x;
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 200.0;
    return entry;
}

}  // namespace nhfi
