#include "nhfi/systems.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace nhfi {

namespace {

VecX so3_bracket(const VecX& xi, const VecX& eta) {
    return Vec3(xi).cross(Vec3(eta));
}

}  // namespace

SystemEntry suslov_entry(const SuslovParams& params, EnergyMode mode) {
    require_finite(MatX(params.inertia), "suslov inertia");
    require_finite(VecX(params.axis), "suslov constraint axis");
    Eigen::LLT<Mat3> llt(params.inertia);
    if (llt.info() != Eigen::Success) {
        throw FrameError("suslov inertia tensor must be symmetric positive definite");
    }
    if (params.axis.norm() == 0.0) {
        throw FrameError("suslov constraint axis must be nonzero");
    }

    const Mat3 inertia_inv = params.inertia.inverse();
    const Vec3 e = (inertia_inv * params.axis) /
                   std::sqrt(params.axis.dot(inertia_inv * params.axis));

    LiePoissonSetup lp;
    lp.dim = 3;
    lp.bracket = so3_bracket;
    lp.inertia = params.inertia;
    lp.inertia_inv = inertia_inv;
    lp.elements = {VecX(e)};
    lp.chart = so3_matrix_chart();

    SystemEntry entry;
    entry.name = "suslov";
    entry.field = extended_field_lie_poisson(lp);
    entry.layout = entry.field.layout;

    entry.initial_state = VecX::Zero(12);
    entry.layout.set_matrix(entry.initial_state, "R", Mat3::Identity());
    entry.layout.seg(entry.initial_state, "Pi") = Vec3(0, 1, 1);

    const bool extended_energy = (mode == EnergyMode::Extended);
    IntegralSpec j = entry.field.integrals[2];  // "J"
    j.gain = 100.0;
    IntegralSpec energy = extended_energy ? entry.field.integrals[0] : entry.field.integrals[1];
    energy.name = extended_energy ? "htilde" : "h";
    energy.gain = 100.0;
    entry.integrals = {j, energy};
    entry.penalties = {{"R", 100.0}};
    detail::default_targets(entry);

    const bool default_data = params.inertia.isApprox(SuslovParams{}.inertia) &&
                            params.axis.isApprox(SuslovParams{}.axis);
    if (default_data) {
        SystemEntry::ExactReference exact;
        exact.names = {"dPi1", "dPi2", "dPi3"};
        exact.indices = {9, 10, 11};
        exact.eval = [](double t) {
            VecX v(3);
            v << -std::tanh(t), 1.0 / std::cosh(t), 1.0 / std::cosh(t);
            return v;
        };
        entry.exact = exact;
    }

    entry.sample_state = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        VecX x(12);
        const Mat3 r = Mat3::Identity() + 0.3 * Mat3::NullaryExpr([&](int, int) { return unit(rng); });
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) x[3 * i + c] = r(i, c);
        for (int i = 0; i < 3; ++i) x[9 + i] = unit(rng);
        return x;
    };

    const double h0 = 0.5 * Vec3(0, 1, 1).dot(inertia_inv * Vec3(0, 1, 1));
    entry.sample_zero_set = [e, inertia_inv, h0](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> angle(-3.14159265358979323846,
                                                     3.14159265358979323846);
        // basis of the plane {Pi . e = 0}
        Vec3 v1 = e.cross(Vec3(1, 0, 0));
        if (v1.norm() < 1e-6) v1 = e.cross(Vec3(0, 1, 0));
        v1.normalize();
        const Vec3 v2 = e.cross(v1).normalized();
        const double t = angle(rng);
        Vec3 pi = std::cos(t) * v1 + std::sin(t) * v2;
        pi *= std::sqrt(h0 / (0.5 * pi.dot(inertia_inv * pi)));
        VecX x(12);
        const Mat3 r = detail::random_rotation3(rng);
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 3; ++c) x[3 * i + c] = r(i, c);
        x.tail(3) = pi;
        return x;
    };

    entry.default_dt = 1e-3;
    entry.default_horizon = 10.0;
    return entry;
}

}  // namespace nhfi
