#pragma once

#include "nhfi/extension.hpp"
#include "nhfi/feedback.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace nhfi::testing {

inline std::mt19937_64 make_rng(std::uint64_t seed = 0x5eed) { return std::mt19937_64(seed); }

inline VecX uniform_vec(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    VecX v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

using ScalarFn = std::function<double(const VecX&)>;

/// Canonical bracket {F, G} = dF/dq . dG/dp - dG/dq . dF/dp through central
/// finite differences; the independent oracle for multiplier formulas.
inline double canonical_bracket_fd(const ScalarFn& f, const ScalarFn& g, const VecX& state,
                                   int dim_q, double step = 1e-5) {
    const VecX gf = finite_difference_gradient(f, state, step);
    const VecX gg = finite_difference_gradient(g, state, step);
    double v = 0.0;
    for (int k = 0; k < dim_q; ++k) {
        v += gf[k] * gg[dim_q + k] - gg[k] * gf[dim_q + k];
    }
    return v;
}

/// Minus Lie-Poisson bracket {f, g}_-(mu) = -<mu, [df/dmu, dg/dmu]> with
/// finite-difference functional derivatives.
inline double lie_poisson_bracket_fd(const ScalarFn& f, const ScalarFn& g, const VecX& mu,
                                     const std::function<VecX(const VecX&, const VecX&)>& bracket,
                                     double step = 1e-5) {
    const VecX gf = finite_difference_gradient(f, mu, step);
    const VecX gg = finite_difference_gradient(g, mu, step);
    return -mu.dot(bracket(gf, gg));
}

/// Product bracket on g* x T*X for full states laid out as
/// [group | x | mu | px]: the Lie-Poisson block plus the canonical block.
inline double bundle_bracket_fd(const ScalarFn& f, const ScalarFn& g, const VecX& state,
                                int group_dim, int dim_x, int dim_g,
                                const std::function<VecX(const VecX&, const VecX&)>& bracket,
                                double step = 1e-5) {
    const VecX gf = finite_difference_gradient(f, state, step);
    const VecX gg = finite_difference_gradient(g, state, step);
    const VecX mu = state.segment(group_dim + dim_x, dim_g);
    const VecX gf_mu = gf.segment(group_dim + dim_x, dim_g);
    const VecX gg_mu = gg.segment(group_dim + dim_x, dim_g);
    double v = -mu.dot(bracket(gf_mu, gg_mu));
    for (int k = 0; k < dim_x; ++k) {
        v += gf[group_dim + k] * gg[group_dim + dim_x + dim_g + k] -
             gg[group_dim + k] * gf[group_dim + dim_x + dim_g + k];
    }
    return v;
}

/// The Chaplygin sleigh on T*SE(2) in coordinates (theta, x, y), built as a
/// canonical setup with a configuration-dependent mass tensor. Reduction to
/// se(2)* is Pi = B(theta) p.
struct UnreducedSleigh {
    CanonicalSetup setup;
    Mat3 body_inertia;
    std::function<Mat3(double)> b;        // B(theta)
    std::function<Mat3(double)> b_prime;  // B'(theta)
};

inline UnreducedSleigh make_unreduced_sleigh(double m, double in, double a) {
    UnreducedSleigh out;
    Mat3 inertia;
    inertia << in + m * a * a, 0, m * a,
        0, m, 0,
        m * a, 0, m;
    out.body_inertia = inertia;
    const Mat3 inertia_inv = inertia.inverse();
    const double norm = std::sqrt(m * in * (in + m * a * a));
    const Vec3 e_red = Vec3(m * a, 0, -(in + m * a * a)) / norm;
    const Vec3 e_red_flat = inertia * e_red;

    out.b = [](double th) {
        Mat3 b;
        b << 1, 0, 0,
            0, std::cos(th), std::sin(th),
            0, -std::sin(th), std::cos(th);
        return b;
    };
    out.b_prime = [](double th) {
        Mat3 bp;
        bp << 0, 0, 0,
            0, -std::sin(th), std::cos(th),
            0, -std::cos(th), -std::sin(th);
        return bp;
    };
    const auto b = out.b;
    const auto bp = out.b_prime;

    CanonicalSetup s = CanonicalSetup::kinetic(3);
    s.mass = [b, inertia](const VecX& q) { return MatX(b(q[0]).transpose() * inertia * b(q[0])); };
    s.mass_inv = [b, inertia_inv](const VecX& q) {
        return MatX(b(q[0]).transpose() * inertia_inv * b(q[0]));
    };
    s.kinetic_q_grad = [b, bp, inertia_inv](const VecX& q, const VecX& p) {
        VecX g = VecX::Zero(3);
        g[0] = (b(q[0]) * p).dot(inertia_inv * (bp(q[0]) * p));
        return g;
    };
    s.frame.in_dim = 3;
    s.frame.out_dim = 3;
    s.frame.count = 1;
    s.frame.orthonormal = true;
    s.frame.field = [b, e_red](const VecX& q, int) { return VecX(b(q[0]).transpose() * e_red); };
    s.frame.flat = [b, e_red_flat](const VecX& q, int) {
        return VecX(b(q[0]).transpose() * e_red_flat);
    };
    s.frame.jacobian = [bp, e_red](const VecX& q, int) {
        MatX de = MatX::Zero(3, 3);
        de.col(0) = bp(q[0]).transpose() * e_red;
        return de;
    };
    out.setup = s;
    return out;
}

}  // namespace nhfi::testing
