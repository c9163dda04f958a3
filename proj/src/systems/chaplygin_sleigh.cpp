#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

namespace {

// se(2) with generators (rotation, two translations):
// [xi, eta] = (0, xi_y eta_th - xi_th eta_y, xi_th eta_x - xi_x eta_th)
VecX se2_bracket(const VecX& xi, const VecX& eta) {
    VecX out(3);
    out << 0.0, xi[2] * eta[0] - xi[0] * eta[2], xi[0] * eta[1] - xi[1] * eta[0];
    return out;
}

}  // namespace

SystemEntry chaplygin_sleigh_entry(const SleighParams& params, SleighChart chart,
                                   EnergyMode mode) {
    if (!(params.m > 0.0) || !(params.inertia > 0.0) || !(params.offset > 0.0)) {
        throw ConfigError("sleigh parameters m, I, a must be positive");
    }
    const double m = params.m;
    const double in = params.inertia;
    const double a = params.offset;
    const double norm = std::sqrt(m * in * (in + m * a * a));

    Mat3 inertia;
    inertia << in + m * a * a, 0, m * a,
        0, m, 0,
        m * a, 0, m;
    const Vec3 e = Vec3(m * a, 0, -(in + m * a * a)) / norm;

    LiePoissonSetup lp;
    lp.dim = 3;
    lp.bracket = se2_bracket;
    lp.inertia = inertia;
    lp.inertia_inv = inertia.inverse();
    lp.elements = {VecX(e)};
    lp.chart = chart == SleighChart::EmbeddedSO2 ? so2_translation_chart() : se2_angle_chart();

    SystemEntry entry;
    entry.name = "chaplygin-sleigh";
    entry.field = extended_field_lie_poisson(lp);
    entry.layout = entry.field.layout;

    entry.initial_state = VecX::Zero(entry.layout.dim());
    if (chart == SleighChart::EmbeddedSO2) {
        entry.layout.set_matrix(entry.initial_state, "R", Mat2::Identity());
    }
    // on the constraint set for any parameters: <Pi, e> = 0
    entry.layout.seg(entry.initial_state, "Pi") = Vec3(in + m * a * a, 1.0, m * a);

    const bool extended_energy = (mode != EnergyMode::Original);
    IntegralSpec j = entry.field.integrals[2];  // "J"
    j.gain = 100.0;
    IntegralSpec energy = extended_energy ? entry.field.integrals[0] : entry.field.integrals[1];
    energy.gain = 100.0;
    entry.integrals = {j, energy};
    if (chart == SleighChart::EmbeddedSO2) {
        entry.penalties = {{"R", 100.0}};
    }
    detail::default_targets(entry);

    const bool embedded = chart == SleighChart::EmbeddedSO2;
    const int dim = entry.layout.dim();
    const int pi_off = entry.layout.offset("Pi");
    entry.sample_state = [embedded, dim](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(dim);
        for (int i = 0; i < dim; ++i) x[i] = unit(rng);
        if (embedded) {
            const Mat2 r = Mat2::Identity() + 0.3 * Mat2::NullaryExpr([&](int, int) { return unit(rng); });
            x[0] = r(0, 0);
            x[1] = r(0, 1);
            x[2] = r(1, 0);
            x[3] = r(1, 1);
        }
        return x;
    };

    const double htilde0 = entry.integral(extended_energy ? "htilde" : "h").target;
    entry.sample_zero_set = [embedded, dim, pi_off, m, in, a, htilde0](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::uniform_real_distribution<double> angle(-3.14159265358979323846,
                                                     3.14159265358979323846);
        VecX x = VecX::Zero(dim);
        if (embedded) {
            const Mat2 r = detail::random_rotation2(rng);
            x[0] = r(0, 0);
            x[1] = r(0, 1);
            x[2] = r(1, 0);
            x[3] = r(1, 1);
            x[4] = unit(rng);
            x[5] = unit(rng);
        } else {
            x[0] = angle(rng);
            x[1] = unit(rng);
            x[2] = unit(rng);
        }
        // h~ = Pi_th^2 / 2(I+ma^2) + Pi_x^2 / 2m on {<Pi, e> = 0}
        const double t = angle(rng);
        const double pith = std::sqrt(2.0 * (in + m * a * a) * htilde0) * std::cos(t);
        const double pix = std::sqrt(2.0 * m * htilde0) * std::sin(t);
        const double piy = m * a * pith / (in + m * a * a);
        x[pi_off + 0] = pith;
        x[pi_off + 1] = pix;
        x[pi_off + 2] = piy;
        return x;
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 10.0;
    return entry;
}

}  // namespace nhfi
