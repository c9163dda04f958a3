#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

SystemEntry heisenberg_entry() {
    SystemEntry entry;
    entry.name = "heisenberg";
    entry.layout = ChartLayout{{"q", 3}, {"p", 3}};

    // The multiplier vanishes identically, so the free flow is already the
    // extension of the constrained system.
    entry.field.layout = entry.layout;
    entry.field.rate = [](const VecX& x, VecX& dx) {
        dx.resize(6);
        dx.head(3) = x.tail(3);
        dx.tail(3).setZero();
    };
    entry.field.constrained_rate = entry.field.rate;
    entry.field.project_to_constraint = [](const VecX& state) {
        VecX out = state;
        const Vec3 e(-state[1], state[0], 1.0);
        const Vec3 p = state.tail(3);
        out.tail(3) = p - (p.dot(e) / e.squaredNorm()) * e;
        return out;
    };

    IntegralSpec h;
    h.name = "H";
    h.value = [](const VecX& x) { return 0.5 * x.tail(3).squaredNorm(); };
    h.gradient = [](const VecX& x) {
        VecX g = VecX::Zero(6);
        g.tail(3) = x.tail(3);
        return g;
    };

    IntegralSpec j1;
    j1.name = "J1";
    j1.value = [](const VecX& x) { return x[5] - x[1] * x[3] + x[0] * x[4]; };
    j1.gradient = [](const VecX& x) {
        VecX g(6);
        g << x[4], -x[3], 0.0, -x[1], x[0], 1.0;
        return g;
    };

    IntegralSpec j2;
    j2.name = "J2";
    j2.value = [](const VecX& x) { return x[0] * x[4] - x[1] * x[3]; };
    j2.gradient = [](const VecX& x) {
        VecX g(6);
        g << x[4], -x[3], 0.0, -x[1], x[0], 0.0;
        return g;
    };

    entry.field.integrals = {h, j1, j2};
    h.gain = j1.gain = j2.gain = 100.0;
    entry.integrals = {j1, j2, h};

    entry.initial_state = VecX::Zero(6);
    entry.initial_state << 1.0, 1.0, 1.0, 1.0, 1.0, 0.0;  // p . e = 0, J2 = 0
    detail::default_targets(entry);

    SystemEntry::ExactReference exact;
    exact.names = {"dx", "dy", "dz"};
    exact.indices = {0, 1, 2};
    const Vec3 q0 = entry.initial_state.head(3);
    const Vec3 p0 = entry.initial_state.tail(3);
    exact.eval = [q0, p0](double t) { return VecX(q0 + t * p0); };
    entry.exact = exact;

    entry.sample_state = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(6);
        for (int i = 0; i < 6; ++i) x[i] = unit(rng);
        return x;
    };

    const VecX x0 = entry.initial_state;
    entry.sample_zero_set = [x0](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> angle(-3.14159265358979323846,
                                                     3.14159265358979323846);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        // rotations about the z-axis and z-translations preserve H, J1, J2
        const double a = angle(rng);
        const double c = std::cos(a);
        const double s = std::sin(a);
        VecX x(6);
        x[0] = c * x0[0] - s * x0[1];
        x[1] = s * x0[0] + c * x0[1];
        x[2] = x0[2] + unit(rng);
        x[3] = c * x0[3] - s * x0[4];
        x[4] = s * x0[3] + c * x0[4];
        x[5] = x0[5];
        return x;
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 10.0;
    return entry;
}

}  // namespace nhfi
