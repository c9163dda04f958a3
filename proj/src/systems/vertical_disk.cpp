#include "nhfi/systems.hpp"

#include <cmath>

namespace nhfi {

namespace {

// se(2) + a central S^1 generator (psi).
VecX se2_s1_bracket(const VecX& xi, const VecX& eta) {
    VecX out = VecX::Zero(4);
    out[1] = xi[2] * eta[0] - xi[0] * eta[2];
    out[2] = xi[0] * eta[1] - xi[1] * eta[0];
    return out;
}

}  // namespace

SystemEntry vertical_disk_entry(const DiskParams& params, DiskVariant variant) {
    if (!(params.m > 0.0) || !(params.roll_inertia > 0.0) || !(params.spin_inertia > 0.0) ||
        !(params.radius > 0.0)) {
        throw ConfigError("disk parameters m, J, I, R must be positive");
    }
    const double m = params.m;
    const double jroll = params.roll_inertia;  // J
    const double ispin = params.spin_inertia;  // I
    const double radius = params.radius;
    const double n2 = std::sqrt(m * ispin * (ispin + m * radius * radius));

    LiePoissonSetup lp;
    lp.dim = 4;
    lp.bracket = se2_s1_bracket;
    lp.inertia = Eigen::Vector4d(jroll, m, m, ispin).asDiagonal();
    lp.inertia_inv = Eigen::Vector4d(1 / jroll, 1 / m, 1 / m, 1 / ispin).asDiagonal();
    lp.elements = {VecX(Eigen::Vector4d(0, 0, 1, 0) / std::sqrt(m)),
                   VecX(Eigen::Vector4d(0, ispin, 0, -m * radius) / n2)};
    lp.chart = se2_s1_angle_chart();

    SystemEntry entry;
    entry.name = "vertical-disk";
    ExtendedField lie_field = extended_field_lie_poisson(lp);
    entry.layout = lie_field.layout;
    const int pi_off = entry.layout.offset("Pi");

    if (variant == DiskVariant::Extended) {
        entry.field = lie_field;
    } else {
        // Momenta frozen: substituting the constraint relations into the
        // extended system leaves Pidot = 0 and decouples the group motion.
        entry.field.layout = lie_field.layout;
        entry.field.integrals = lie_field.integrals;
        entry.field.constrained_rate = lie_field.constrained_rate;
        entry.field.project_to_constraint = lie_field.project_to_constraint;
        entry.field.rate = [m, jroll, ispin, pi_off](const VecX& x, VecX& dx) {
            dx.setZero(x.size());
            const double theta = x[0];
            const double pith = x[pi_off + 0];
            const double pix = x[pi_off + 1];
            const double pipsi = x[pi_off + 3];
            dx[0] = pith / jroll;
            dx[1] = pix * std::cos(theta) / m;
            dx[2] = pix * std::sin(theta) / m;
            dx[3] = pipsi / ispin;
        };
    }

    entry.initial_state = VecX::Zero(entry.layout.dim());
    entry.layout.seg(entry.initial_state, "Pi") =
        Eigen::Vector4d(1.0, 1.0, 0.0, ispin / (m * radius));

    if (variant == DiskVariant::Extended) {
        IntegralSpec htilde = lie_field.integrals[0];
        IntegralSpec j1 = lie_field.integrals[2];
        IntegralSpec j2 = lie_field.integrals[3];
        htilde.gain = j1.gain = j2.gain = 1.0;
        entry.integrals = {htilde, j1, j2};
    } else {
        static const char* names[4] = {"Pi_theta", "Pi_x", "Pi_y", "Pi_psi"};
        for (int c = 0; c < 4; ++c) {
            IntegralSpec f;
            f.name = names[c];
            f.value = [pi_off, c](const VecX& x) { return x[pi_off + c]; };
            f.gradient = [pi_off, c](const VecX& x) {
                VecX g = VecX::Zero(x.size());
                g[pi_off + c] = 1.0;
                return g;
            };
            f.gain = 1.0;
            entry.integrals.push_back(std::move(f));
        }
        IntegralSpec htilde = lie_field.integrals[0];
        htilde.gain = 0.0;  // diagnostic channel only
        entry.integrals.push_back(std::move(htilde));
    }
    detail::default_targets(entry);

    // Targets must lie on the reduced constraint set.
    entry.validate_targets = [m, ispin, radius, variant](const std::vector<IntegralSpec>& specs) {
        if (variant != DiskVariant::Frozen) return;
        double piy0 = 0.0, pix0 = 0.0, pipsi0 = 0.0;
        for (const auto& f : specs) {
            if (f.name == "Pi_y") piy0 = f.target;
            if (f.name == "Pi_x") pix0 = f.target;
            if (f.name == "Pi_psi") pipsi0 = f.target;
        }
        const double scale = 1.0 + std::abs(pix0) + std::abs(pipsi0);
        if (std::abs(piy0) > 1e-9 * scale ||
            std::abs(ispin * pix0 - m * radius * pipsi0) > 1e-9 * scale) {
            throw ConfigError("vertical disk targets must satisfy Pi_y = 0 and "
                              "I Pi_x - m R Pi_psi = 0");
        }
    };

    const int dim = entry.layout.dim();
    entry.sample_state = [dim](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(dim);
        for (int i = 0; i < dim; ++i) x[i] = unit(rng);
        x[0] *= 3.14159265358979323846;
        return x;
    };

    const VecX pi0 = entry.initial_state.segment(pi_off, 4);
    const double htilde0 = lie_field.integrals[0].value(entry.initial_state);
    entry.sample_zero_set = [dim, pi_off, pi0, variant, m, jroll, ispin, radius,
                             htilde0](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(dim);
        for (int i = 0; i < pi_off; ++i) x[i] = unit(rng);
        if (variant == DiskVariant::Frozen) {
            x.segment(pi_off, 4) = pi0;
        } else {
            // C_red is the (Pi_theta, Pi_x) plane; h~ restricted to it is an ellipse
            const double t = 3.14159265358979323846 * unit(rng);
            const double pith = std::sqrt(2.0 * jroll * htilde0) * std::cos(t);
            const double pix = m * radius * std::sin(t) *
                               std::sqrt(2.0 * htilde0 / (ispin + m * radius * radius));
            x[pi_off + 0] = pith;
            x[pi_off + 1] = pix;
            x[pi_off + 2] = 0.0;
            x[pi_off + 3] = ispin * pix / (m * radius);
        }
        return x;
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 10.0;
    return entry;
}

}  // namespace nhfi
