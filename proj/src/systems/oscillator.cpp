#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

SystemEntry oscillator_entry(EnergyMode mode) {
    CanonicalSetup setup = CanonicalSetup::kinetic(3);
    setup.potential = [](const VecX& q) { return 0.5 * q.squaredNorm(); };
    setup.potential_grad = [](const VecX& q) { return VecX(q); };
    setup.frame.in_dim = 3;
    setup.frame.out_dim = 3;
    setup.frame.count = 1;
    setup.frame.orthonormal = true;
    setup.frame.field = [](const VecX& q, int) {
        const double y = q[1];
        VecX e(3);
        e << 1.0, 0.0, y;
        return VecX(e / std::sqrt(1.0 + y * y));
    };
    setup.frame.flat = setup.frame.field;  // unit mass
    setup.frame.jacobian = [](const VecX& q, int) {
        const double y = q[1];
        const double s = std::pow(1.0 + y * y, 1.5);
        MatX de = MatX::Zero(3, 3);
        de(0, 1) = -y / s;
        de(2, 1) = 1.0 / s;
        return de;
    };
    validate_canonical(setup, VecX::Constant(3, -2.0), VecX::Constant(3, 2.0));

    SystemEntry entry;
    entry.name = "oscillator";
    entry.field = extended_field_canonical(setup);
    entry.layout = entry.field.layout;

    entry.initial_state = VecX::Zero(6);
    entry.initial_state.head(3) = Vec3(1.0, 1.0, 1.0);

    IntegralSpec hy;
    hy.name = "Hy";
    hy.value = [](const VecX& x) { return 0.5 * x[4] * x[4] + 0.5 * x[1] * x[1]; };
    hy.gradient = [](const VecX& x) {
        VecX g = VecX::Zero(6);
        g[1] = x[1];
        g[4] = x[4];
        return g;
    };
    hy.gain = 300.0;
    // d/dt Hy is proportional to the constraint momentum, so Hy is a first
    // integral of the extended flow only on {J = 0}.
    hy.on_constraint_only = true;

    const bool extended_energy = (mode != EnergyMode::Original);
    IntegralSpec energy = extended_energy ? entry.field.integrals[0] : entry.field.integrals[1];
    energy.gain = 500.0;
    IntegralSpec diag = extended_energy ? entry.field.integrals[1] : entry.field.integrals[0];
    diag.gain = 0.0;
    IntegralSpec j = entry.field.integrals[2];
    j.gain = 300.0;
    entry.integrals = {energy, hy, j, diag};
    detail::default_targets(entry);

    entry.sample_state = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(6);
        for (int i = 0; i < 6; ++i) x[i] = unit(rng);
        return x;
    };

    entry.sample_zero_set = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> angle(-3.14159265358979323846,
                                                     3.14159265358979323846);
        // {Htilde = 1.5, Hy = 0.5, J = 0} contains a two-parameter family
        const double a = angle(rng);
        const double b = angle(rng);
        VecX x = VecX::Zero(6);
        x[0] = std::sqrt(2.0) * std::cos(a);
        x[2] = std::sqrt(2.0) * std::sin(a);
        x[1] = std::sin(b);
        x[4] = std::cos(b);
        return x;
    };

    entry.has_dla = true;
    entry.poincare = SystemEntry::PoincareEvent{1, 4, {{"xz", 0, 2}, {"zpz", 2, 5}}};
    entry.default_dt = 1e-3;
    entry.default_horizon = 200.0;
    return entry;
}

}  // namespace nhfi
