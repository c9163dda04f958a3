#include "nhfi/extension.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <memory>
#include <mutex>
#include <random>
#include <utility>

namespace nhfi {

namespace {

constexpr double kOrthoTol = 1e-10;

struct CanonicalParts {
    VecX q, p;
};

CanonicalParts split(const CanonicalSetup& s, const VecX& state) {
    s.layout.check(state);
    return {state.head(s.dim_q), state.tail(s.dim_q)};
}

MatX gram_matrix(const CanonicalSetup& s, const VecX& q) {
    const int k = s.frame.count;
    MatX g(k, k);
    std::vector<VecX> fields(k), flats(k);
    const MatX m = s.mass(q);
    for (int i = 0; i < k; ++i) {
        fields[i] = s.frame.field(q, i);
        flats[i] = s.frame.flat ? s.frame.flat(q, i) : VecX(m * fields[i]);
    }
    for (int l = 0; l < k; ++l) {
        for (int i = 0; i < k; ++i) {
            g(l, i) = flats[l].dot(fields[i]);
        }
    }
    return g;
}

MatX inverse_gram(const CanonicalSetup& s, const VecX& q) {
    if (s.frame.orthonormal) {
        return MatX::Identity(s.frame.count, s.frame.count);
    }
    const MatX g = gram_matrix(s, q);
    Eigen::FullPivLU<MatX> lu(g);
    if (!lu.isInvertible()) {
        throw FrameError("degenerate constraint frame: singular Gram matrix");
    }
    return lu.inverse();
}

VecX hamiltonian_q_grad(const CanonicalSetup& s, const VecX& q, const VecX& p) {
    VecX g = VecX::Zero(s.dim_q);
    if (s.kinetic_q_grad) g += s.kinetic_q_grad(q, p);
    if (s.potential_grad) g += s.potential_grad(q);
    return g;
}

/// {H, <p, e_i>} = <dH/dq, e_i> - <p, De_i dH/dp> for every i.
VecX bracket_h_with_momenta(const CanonicalSetup& s, const VecX& q, const VecX& p) {
    const int k = s.frame.count;
    const VecX dhdq = hamiltonian_q_grad(s, q, p);
    const VecX psharp = s.mass_inv(q) * p;
    VecX out(k);
    for (int i = 0; i < k; ++i) {
        const VecX e = s.frame.field(q, i);
        const MatX de = s.frame.jacobian(q, i);
        out[i] = dhdq.dot(e) - p.dot(de * psharp);
    }
    return out;
}

}  // namespace

CanonicalSetup CanonicalSetup::kinetic(int dim_q) {
    CanonicalSetup s;
    s.dim_q = dim_q;
    s.mass = [dim_q](const VecX&) { return MatX::Identity(dim_q, dim_q); };
    s.mass_inv = s.mass;
    s.layout = ChartLayout{{"q", dim_q}, {"p", dim_q}};
    return s;
}

void validate_canonical(const CanonicalSetup& setup, const VecX& box_lo, const VecX& box_hi,
                        int samples, unsigned seed) {
    if (box_lo.size() != setup.dim_q || box_hi.size() != setup.dim_q) {
        throw LayoutError("sample box dimension does not match configuration space");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < samples; ++n) {
        VecX q(setup.dim_q);
        for (int i = 0; i < setup.dim_q; ++i) {
            q[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(rng);
        }
        const MatX m = setup.mass(q);
        Eigen::LLT<MatX> llt(m);
        if (llt.info() != Eigen::Success) {
            throw FrameError("mass tensor not positive definite at a sampled point");
        }
        const MatX g = gram_matrix(setup, q);
        if (setup.frame.orthonormal) {
            const double defect = (g - MatX::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
            if (defect > kOrthoTol) {
                throw FrameError("constraint frame not orthonormal at a sampled point (defect " +
                                 std::to_string(defect) + ")");
            }
        } else {
            if ((g - g.transpose()).cwiseAbs().maxCoeff() > kOrthoTol) {
                throw FrameError("constraint Gram matrix not symmetric at a sampled point");
            }
            Eigen::LLT<MatX> gllt(g);
            if (gllt.info() != Eigen::Success) {
                throw FrameError("constraint Gram matrix not positive definite at a sampled point");
            }
        }
    }
}

VecX constraint_momenta(const CanonicalSetup& setup, const VecX& state) {
    const auto [q, p] = split(setup, state);
    VecX u(setup.frame.count);
    for (int i = 0; i < setup.frame.count; ++i) {
        u[i] = p.dot(setup.frame.field(q, i));
    }
    return u;
}

double hamiltonian(const CanonicalSetup& setup, const VecX& state) {
    const auto [q, p] = split(setup, state);
    double h = 0.5 * p.dot(setup.mass_inv(q) * p);
    if (setup.potential) h += setup.potential(q);
    return h;
}

double extended_hamiltonian(const CanonicalSetup& setup, const VecX& state) {
    const auto [q, p] = split(setup, state);
    const VecX u = constraint_momenta(setup, state);
    const MatX c = inverse_gram(setup, q);
    return hamiltonian(setup, state) - 0.5 * u.dot(c * u);
}

VecX constrained_multipliers(const CanonicalSetup& setup, const VecX& state) {
    const auto [q, p] = split(setup, state);
    return bracket_h_with_momenta(setup, q, p);
}

VecX multipliers_tilde(const CanonicalSetup& setup, const VecX& state) {
    if (!setup.frame.orthonormal) {
        throw FrameError("multipliers_tilde requires an orthonormal frame; "
                         "use general_multipliers for the general case");
    }
    const auto [q, p] = split(setup, state);
    const int k = setup.frame.count;
    VecX lam = bracket_h_with_momenta(setup, q, p);
    if (k > 1) {
        std::vector<VecX> fields(k);
        std::vector<MatX> jacs(k);
        VecX u(k);
        for (int i = 0; i < k; ++i) {
            fields[i] = setup.frame.field(q, i);
            jacs[i] = setup.frame.jacobian(q, i);
            u[i] = p.dot(fields[i]);
        }
        // <p, [e_j, e_i]> = <p, De_i e_j> - <p, De_j e_i>
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                lam[i] += u[j] * (p.dot(jacs[i] * fields[j]) - p.dot(jacs[j] * fields[i]));
            }
        }
    }
    return lam;
}

VecX general_multipliers(const CanonicalSetup& setup, const VecX& state) {
    const auto [q, p] = split(setup, state);
    const MatX c = inverse_gram(setup, q);
    return c * bracket_h_with_momenta(setup, q, p);
}

namespace {

// A null kinetic_q_grad declares the mass tensor constant; cache its inverse
// after the first evaluation so the hot path skips the user closure.
struct MassInvCache {
    std::once_flag once;
    MatX minv;
};

}  // namespace

ExtendedField extended_field_canonical(const CanonicalSetup& setup) {
    if (!setup.frame.orthonormal) {
        throw FrameError("extended_field_canonical requires an orthonormal frame");
    }
    auto s = std::make_shared<const CanonicalSetup>(setup);
    const int n = s->dim_q;
    const int k = s->frame.count;
    const bool constant_mass = !setup.kinetic_q_grad;
    auto minv_cache = std::make_shared<MassInvCache>();

    ExtendedField field;
    field.layout = s->layout;

    field.rate = [s, n, k, constant_mass, minv_cache](const VecX& state, VecX& dx) {
        const VecX q = state.head(n);
        const VecX p = state.tail(n);
        dx.resize(2 * n);

        std::vector<VecX> e(k), eflat(k);
        std::vector<MatX> de(k);
        VecX u(k);
        for (int i = 0; i < k; ++i) {
            e[i] = s->frame.field(q, i);
            eflat[i] = s->frame.flat ? s->frame.flat(q, i) : VecX(s->mass(q) * e[i]);
            de[i] = s->frame.jacobian(q, i);
            u[i] = p.dot(e[i]);
        }
        VecX psharp(n);
        if (constant_mass) {
            std::call_once(minv_cache->once, [&] { minv_cache->minv = s->mass_inv(q); });
            psharp.noalias() = minv_cache->minv * p;
        } else {
            psharp = s->mass_inv(q) * p;
        }

        VecX qdot = psharp;
        for (int j = 0; j < k; ++j) qdot -= u[j] * e[j];

        const VecX dhdq = hamiltonian_q_grad(*s, q, p);
        VecX dhtdq = dhdq;
        for (int j = 0; j < k; ++j) dhtdq -= u[j] * (de[j].transpose() * p);

        VecX pdot = -dhtdq;
        for (int i = 0; i < k; ++i) {
            double lam = dhdq.dot(e[i]) - p.dot(de[i] * psharp);
            for (int j = 0; j < k; ++j) {
                lam += u[j] * (p.dot(de[i] * e[j]) - p.dot(de[j] * e[i]));
            }
            pdot += lam * eflat[i];
        }
        dx.head(n) = qdot;
        dx.tail(n) = pdot;
    };

    field.constrained_rate = [s, n, k](const VecX& state, VecX& dx) {
        const VecX q = state.head(n);
        const VecX p = state.tail(n);
        dx.resize(2 * n);
        const MatX m = s->mass(q);
        const VecX lam = constrained_multipliers(*s, state);
        dx.head(n) = s->mass_inv(q) * p;
        VecX pdot = -hamiltonian_q_grad(*s, q, p);
        for (int i = 0; i < k; ++i) {
            const VecX eflat = s->frame.flat ? s->frame.flat(q, i) : VecX(m * s->frame.field(q, i));
            pdot += lam[i] * eflat;
        }
        dx.tail(n) = pdot;
    };

    field.project_to_constraint = [s, n, k](const VecX& state) {
        VecX out = state;
        const VecX q = state.head(n);
        VecX p = state.tail(n);
        const MatX m = s->mass(q);
        for (int i = 0; i < k; ++i) {
            const VecX e = s->frame.field(q, i);
            const VecX eflat = s->frame.flat ? s->frame.flat(q, i) : VecX(m * e);
            p -= p.dot(e) * eflat;
        }
        out.tail(n) = p;
        return out;
    };

    IntegralSpec htilde;
    htilde.name = "Htilde";
    htilde.value = [s](const VecX& x) { return extended_hamiltonian(*s, x); };
    htilde.gradient = [s, n, k](const VecX& state) {
        const VecX q = state.head(n);
        const VecX p = state.tail(n);
        std::vector<VecX> e(k);
        std::vector<MatX> de(k);
        VecX u(k);
        for (int i = 0; i < k; ++i) {
            e[i] = s->frame.field(q, i);
            de[i] = s->frame.jacobian(q, i);
            u[i] = p.dot(e[i]);
        }
        VecX dq = hamiltonian_q_grad(*s, q, p);
        VecX dp = s->mass_inv(q) * p;
        for (int j = 0; j < k; ++j) {
            dq -= u[j] * (de[j].transpose() * p);
            dp -= u[j] * e[j];
        }
        VecX g(2 * n);
        g.head(n) = dq;
        g.tail(n) = dp;
        return g;
    };

    IntegralSpec h;
    h.name = "H";
    h.value = [s](const VecX& x) { return hamiltonian(*s, x); };
    h.gradient = [s, n](const VecX& state) {
        const VecX q = state.head(n);
        const VecX p = state.tail(n);
        VecX g(2 * n);
        g.head(n) = hamiltonian_q_grad(*s, q, p);
        g.tail(n) = s->mass_inv(q) * p;
        return g;
    };

    field.integrals.push_back(std::move(htilde));
    field.integrals.push_back(std::move(h));
    for (int i = 0; i < k; ++i) {
        IntegralSpec j;
        j.name = k == 1 ? "J" : ("J" + std::to_string(i + 1));
        j.value = [s, n, i](const VecX& state) {
            return state.tail(n).dot(s->frame.field(state.head(n), i));
        };
        j.gradient = [s, n, i](const VecX& state) {
            const VecX q = state.head(n);
            const VecX p = state.tail(n);
            VecX g(2 * n);
            g.head(n) = s->frame.jacobian(q, i).transpose() * p;
            g.tail(n) = s->frame.field(q, i);
            return g;
        };
        field.integrals.push_back(std::move(j));
    }
    return field;
}

// --- group charts ------------------------------------------------------------

GroupChart so3_matrix_chart() {
    GroupChart chart;
    chart.layout = ChartLayout{{"R", 3, 3}};
    chart.reconstruct = [](const VecX& group, const VecX& u, VecX& rate) {
        Mat3 r;
        r << group[0], group[1], group[2],
            group[3], group[4], group[5],
            group[6], group[7], group[8];
        const Mat3 rdot = r * hat(Vec3(u[0], u[1], u[2]));
        rate.resize(9);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) rate[3 * i + j] = rdot(i, j);
        }
    };
    return chart;
}

GroupChart so2_translation_chart() {
    GroupChart chart;
    chart.layout = ChartLayout{{"R", 2, 2}, {"xy", 2}};
    chart.reconstruct = [](const VecX& group, const VecX& u, VecX& rate) {
        Mat2 r;
        r << group[0], group[1], group[2], group[3];
        const Mat2 rdot = r * hat2(u[0]);
        const Vec2 xydot = r * Vec2(u[1], u[2]);
        rate.resize(6);
        rate << rdot(0, 0), rdot(0, 1), rdot(1, 0), rdot(1, 1), xydot[0], xydot[1];
    };
    return chart;
}

GroupChart se2_angle_chart() {
    GroupChart chart;
    chart.layout = ChartLayout{{"theta", 1}, {"xy", 2}};
    chart.reconstruct = [](const VecX& group, const VecX& u, VecX& rate) {
        const double c = std::cos(group[0]);
        const double s = std::sin(group[0]);
        rate.resize(3);
        rate << u[0], c * u[1] - s * u[2], s * u[1] + c * u[2];
    };
    return chart;
}

GroupChart se2_s1_angle_chart() {
    GroupChart chart;
    chart.layout = ChartLayout{{"theta", 1}, {"xy", 2}, {"psi", 1}};
    chart.reconstruct = [](const VecX& group, const VecX& u, VecX& rate) {
        const double c = std::cos(group[0]);
        const double s = std::sin(group[0]);
        rate.resize(4);
        rate << u[0], c * u[1] - s * u[2], s * u[1] + c * u[2], u[3];
    };
    return chart;
}

// --- Lie-Poisson engine -------------------------------------------------------

namespace {

ChartLayout lie_poisson_layout(const LiePoissonSetup& s) {
    std::vector<ChartLayout::BlockSpec> specs;
    for (const auto& b : s.chart.layout.blocks()) {
        specs.push_back({b.name, b.rows, b.cols});
    }
    specs.push_back({s.mu_name, s.dim, 1});
    return ChartLayout(specs);
}

}  // namespace

void validate_lie_poisson(const LiePoissonSetup& setup) {
    Eigen::LLT<MatX> llt(setup.inertia);
    if (llt.info() != Eigen::Success) {
        throw FrameError("locked inertia tensor not positive definite");
    }
    const int k = static_cast<int>(setup.elements.size());
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double v = (setup.inertia * setup.elements[i]).dot(setup.elements[j]);
            if (std::abs(v - (i == j ? 1.0 : 0.0)) > kOrthoTol) {
                throw FrameError("Lie algebra constraint elements not orthonormal "
                                 "with respect to the locked inertia tensor");
            }
        }
    }
}

VecX coadjoint(const LiePoissonSetup& setup, const VecX& xi, const VecX& mu) {
    VecX out(setup.dim);
    VecX basis = VecX::Zero(setup.dim);
    for (int b = 0; b < setup.dim; ++b) {
        basis[b] = 1.0;
        out[b] = mu.dot(setup.bracket(xi, basis));
        basis[b] = 0.0;
    }
    return out;
}

double lie_poisson_hamiltonian(const LiePoissonSetup& setup, const VecX& mu) {
    return 0.5 * mu.dot(setup.inertia_inv * mu);
}

double lie_poisson_extended_hamiltonian(const LiePoissonSetup& setup, const VecX& mu) {
    double h = lie_poisson_hamiltonian(setup, mu);
    for (const auto& e : setup.elements) {
        const double j = mu.dot(e);
        h -= 0.5 * j * j;
    }
    return h;
}

VecX lie_poisson_multipliers_tilde(const LiePoissonSetup& setup, const VecX& mu) {
    VecX u = setup.inertia_inv * mu;
    for (const auto& e : setup.elements) u -= mu.dot(e) * e;
    const int k = static_cast<int>(setup.elements.size());
    VecX lam(k);
    for (int i = 0; i < k; ++i) {
        lam[i] = -mu.dot(setup.bracket(u, setup.elements[i]));
    }
    return lam;
}

ExtendedField extended_field_lie_poisson(const LiePoissonSetup& setup) {
    validate_lie_poisson(setup);
    auto s = std::make_shared<const LiePoissonSetup>(setup);
    const int gdim = s->chart.layout.dim();
    const int n = s->dim;
    const int k = static_cast<int>(s->elements.size());

    ExtendedField field;
    field.layout = lie_poisson_layout(*s);
    const int total = field.layout.dim();

    field.rate = [s, gdim, n, k](const VecX& state, VecX& dx) {
        const VecX mu = state.tail(n);
        dx.resize(state.size());

        VecX u = s->inertia_inv * mu;
        for (int i = 0; i < k; ++i) u -= mu.dot(s->elements[i]) * s->elements[i];

        VecX mudot = coadjoint(*s, u, mu);
        for (int i = 0; i < k; ++i) {
            const double lam = -mu.dot(s->bracket(u, s->elements[i]));
            mudot += lam * (s->inertia * s->elements[i]);
        }
        if (gdim > 0) {
            VecX grate;
            s->chart.reconstruct(state.head(gdim), u, grate);
            dx.head(gdim) = grate;
        }
        dx.tail(n) = mudot;
    };

    field.constrained_rate = [s, gdim, n, k](const VecX& state, VecX& dx) {
        const VecX mu = state.tail(n);
        dx.resize(state.size());
        const VecX u0 = s->inertia_inv * mu;
        VecX mudot = coadjoint(*s, u0, mu);
        for (int i = 0; i < k; ++i) {
            const double lam = -mu.dot(s->bracket(u0, s->elements[i]));
            mudot += lam * (s->inertia * s->elements[i]);
        }
        if (gdim > 0) {
            VecX grate;
            s->chart.reconstruct(state.head(gdim), u0, grate);
            dx.head(gdim) = grate;
        }
        dx.tail(n) = mudot;
    };

    field.project_to_constraint = [s, n](const VecX& state) {
        VecX out = state;
        VecX mu = state.tail(n);
        for (const auto& e : s->elements) mu -= mu.dot(e) * (s->inertia * e);
        out.tail(n) = mu;
        return out;
    };

    IntegralSpec htilde;
    htilde.name = "htilde";
    htilde.value = [s, n](const VecX& x) {
        return lie_poisson_extended_hamiltonian(*s, x.tail(n));
    };
    htilde.gradient = [s, n, total](const VecX& x) {
        const VecX mu = x.tail(n);
        VecX u = s->inertia_inv * mu;
        for (const auto& e : s->elements) u -= mu.dot(e) * e;
        VecX g = VecX::Zero(total);
        g.tail(n) = u;
        return g;
    };

    IntegralSpec h;
    h.name = "h";
    h.value = [s, n](const VecX& x) { return lie_poisson_hamiltonian(*s, x.tail(n)); };
    h.gradient = [s, n, total](const VecX& x) {
        VecX g = VecX::Zero(total);
        g.tail(n) = s->inertia_inv * x.tail(n);
        return g;
    };

    field.integrals.push_back(std::move(htilde));
    field.integrals.push_back(std::move(h));
    for (int i = 0; i < k; ++i) {
        IntegralSpec j;
        j.name = k == 1 ? "J" : ("J" + std::to_string(i + 1));
        j.value = [s, n, i](const VecX& x) { return x.tail(n).dot(s->elements[i]); };
        j.gradient = [s, n, i, total](const VecX&) {
            VecX g = VecX::Zero(total);
            g.tail(n) = s->elements[i];
            return g;
        };
        field.integrals.push_back(std::move(j));
    }
    return field;
}

// --- bundle engine --------------------------------------------------------------

namespace {

ChartLayout bundle_layout(const BundleSetup& s) {
    std::vector<ChartLayout::BlockSpec> specs;
    for (const auto& b : s.chart.layout.blocks()) {
        specs.push_back({b.name, b.rows, b.cols});
    }
    specs.push_back({s.x_name, s.dim_x, 1});
    specs.push_back({s.mu_name, s.dim_g, 1});
    specs.push_back({s.px_name, s.dim_x, 1});
    return ChartLayout(specs);
}

struct BundleEval {
    VecX x;          // base configuration
    VecX momentum;   // (mu, p_x) combined
    std::vector<VecX> e;
    std::vector<VecX> eflat;
    std::vector<MatX> de;
    VecX j;          // constraint momenta
    VecX u;          // dh~/d(mu,p_x)
    VecX dhdx;       // dh~/dx
};

BundleEval bundle_eval(const BundleSetup& s, const VecX& state) {
    const int gdim = s.chart.layout.dim();
    const int nm = s.dim_g + s.dim_x;
    BundleEval ev;
    ev.x = state.segment(gdim, s.dim_x);
    ev.momentum.resize(nm);
    ev.momentum.head(s.dim_g) = state.segment(gdim + s.dim_x, s.dim_g);
    ev.momentum.tail(s.dim_x) = state.tail(s.dim_x);

    const int k = s.frame.count;
    ev.e.resize(k);
    ev.eflat.resize(k);
    ev.de.resize(k);
    ev.j.resize(k);
    for (int i = 0; i < k; ++i) {
        ev.e[i] = s.frame.field(ev.x, i);
        ev.eflat[i] = s.frame.flat ? s.frame.flat(ev.x, i) : VecX(s.mass * ev.e[i]);
        ev.de[i] = s.frame.jacobian(ev.x, i);
        ev.j[i] = ev.momentum.dot(ev.e[i]);
    }
    ev.u = s.mass_inv * ev.momentum;
    for (int i = 0; i < k; ++i) ev.u -= ev.j[i] * ev.e[i];
    ev.dhdx = s.potential_grad ? s.potential_grad(ev.x) : VecX(VecX::Zero(s.dim_x));
    for (int i = 0; i < k; ++i) ev.dhdx -= ev.j[i] * (ev.de[i].transpose() * ev.momentum);
    return ev;
}

}  // namespace

void validate_bundle(const BundleSetup& setup, const VecX& box_lo, const VecX& box_hi,
                     int samples, unsigned seed) {
    Eigen::LLT<MatX> llt(setup.mass);
    if (llt.info() != Eigen::Success) {
        throw FrameError("reduced mass tensor not positive definite");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int n = 0; n < samples; ++n) {
        VecX x(setup.dim_x);
        for (int i = 0; i < setup.dim_x; ++i) {
            x[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(rng);
        }
        for (int i = 0; i < setup.frame.count; ++i) {
            const VecX ei = setup.frame.field(x, i);
            for (int j = 0; j < setup.frame.count; ++j) {
                const VecX ej = setup.frame.field(x, j);
                const double v = (setup.mass * ei).dot(ej);
                if (std::abs(v - (i == j ? 1.0 : 0.0)) > kOrthoTol) {
                    throw FrameError("bundle constraint frame not orthonormal "
                                     "with respect to the reduced mass tensor");
                }
            }
        }
    }
}

double bundle_hamiltonian(const BundleSetup& setup, const VecX& state) {
    const auto ev = bundle_eval(setup, state);
    double h = 0.5 * ev.momentum.dot(setup.mass_inv * ev.momentum);
    if (setup.potential) h += setup.potential(ev.x);
    return h;
}

double bundle_extended_hamiltonian(const BundleSetup& setup, const VecX& state) {
    const auto ev = bundle_eval(setup, state);
    double h = 0.5 * ev.momentum.dot(setup.mass_inv * ev.momentum);
    if (setup.potential) h += setup.potential(ev.x);
    for (int i = 0; i < setup.frame.count; ++i) h -= 0.5 * ev.j[i] * ev.j[i];
    return h;
}

VecX bundle_multipliers_tilde(const BundleSetup& setup, const VecX& state) {
    const auto ev = bundle_eval(setup, state);
    const int k = setup.frame.count;
    const VecX ug = ev.u.head(setup.dim_g);
    const VecX ux = ev.u.tail(setup.dim_x);
    const VecX mu = ev.momentum.head(setup.dim_g);
    VecX lam(k);
    for (int i = 0; i < k; ++i) {
        const VecX eg = ev.e[i].head(setup.dim_g);
        const VecX ex = ev.e[i].tail(setup.dim_x);
        const double lie_part = -mu.dot(setup.bracket(ug, eg));
        const VecX djdx = ev.de[i].transpose() * ev.momentum;
        const double canonical_part = ev.dhdx.dot(ex) - djdx.dot(ux);
        lam[i] = lie_part + canonical_part;
    }
    return lam;
}

ExtendedField extended_field_bundle(const BundleSetup& setup) {
    if (!setup.frame.orthonormal) {
        throw FrameError("extended_field_bundle requires a frame orthonormal "
                         "with respect to the reduced mass tensor");
    }
    auto s = std::make_shared<const BundleSetup>(setup);
    const int gdim = s->chart.layout.dim();
    const int ng = s->dim_g;
    const int nx = s->dim_x;
    const int k = s->frame.count;

    ExtendedField field;
    field.layout = bundle_layout(*s);
    const int total = field.layout.dim();

    LiePoissonSetup lie;  // only for coadjoint pairing
    lie.dim = ng;
    lie.bracket = s->bracket;

    field.rate = [s, lie, gdim, ng, nx, k](const VecX& state, VecX& dx) {
        const auto ev = bundle_eval(*s, state);
        const VecX ug = ev.u.head(ng);
        const VecX ux = ev.u.tail(nx);
        const VecX mu = ev.momentum.head(ng);

        VecX mudot = coadjoint(lie, ug, mu);
        VecX pxdot = -ev.dhdx;
        for (int i = 0; i < k; ++i) {
            const VecX eg = ev.e[i].head(ng);
            const VecX ex = ev.e[i].tail(nx);
            const VecX djdx = ev.de[i].transpose() * ev.momentum;
            const double lam = -mu.dot(s->bracket(ug, eg)) + ev.dhdx.dot(ex) - djdx.dot(ux);
            mudot += lam * ev.eflat[i].head(ng);
            pxdot += lam * ev.eflat[i].tail(nx);
        }
        dx.resize(state.size());
        if (gdim > 0) {
            VecX grate;
            s->chart.reconstruct(state.head(gdim), ug, grate);
            dx.head(gdim) = grate;
        }
        dx.segment(gdim, nx) = ux;
        dx.segment(gdim + nx, ng) = mudot;
        dx.tail(nx) = pxdot;
    };

    field.constrained_rate = [s, lie, gdim, ng, nx, k](const VecX& state, VecX& dx) {
        const auto ev = bundle_eval(*s, state);
        const VecX u0 = s->mass_inv * ev.momentum;
        const VecX ug = u0.head(ng);
        const VecX ux = u0.tail(nx);
        const VecX mu = ev.momentum.head(ng);
        const VecX dhdx0 = s->potential_grad ? s->potential_grad(ev.x) : VecX(VecX::Zero(nx));

        VecX mudot = coadjoint(lie, ug, mu);
        VecX pxdot = -dhdx0;
        for (int i = 0; i < k; ++i) {
            const VecX eg = ev.e[i].head(ng);
            const VecX ex = ev.e[i].tail(nx);
            const VecX djdx = ev.de[i].transpose() * ev.momentum;
            const double lam = -mu.dot(s->bracket(ug, eg)) + dhdx0.dot(ex) - djdx.dot(ux);
            mudot += lam * ev.eflat[i].head(ng);
            pxdot += lam * ev.eflat[i].tail(nx);
        }
        dx.resize(state.size());
        if (gdim > 0) {
            VecX grate;
            s->chart.reconstruct(state.head(gdim), ug, grate);
            dx.head(gdim) = grate;
        }
        dx.segment(gdim, nx) = ux;
        dx.segment(gdim + nx, ng) = mudot;
        dx.tail(nx) = pxdot;
    };

    field.project_to_constraint = [s, gdim, ng, nx, k](const VecX& state) {
        VecX out = state;
        auto ev = bundle_eval(*s, state);
        VecX momentum = ev.momentum;
        for (int i = 0; i < k; ++i) {
            momentum -= momentum.dot(ev.e[i]) * ev.eflat[i];
        }
        out.segment(gdim + nx, ng) = momentum.head(ng);
        out.tail(nx) = momentum.tail(nx);
        return out;
    };

    auto momentum_gradient = [gdim, ng, nx, total](const VecX& dx_part, const VecX& dmom_part) {
        VecX g = VecX::Zero(total);
        g.segment(gdim, nx) = dx_part;
        g.segment(gdim + nx, ng) = dmom_part.head(ng);
        g.tail(nx) = dmom_part.tail(nx);
        return g;
    };

    IntegralSpec htilde;
    htilde.name = "htilde";
    htilde.value = [s](const VecX& x) { return bundle_extended_hamiltonian(*s, x); };
    htilde.gradient = [s, momentum_gradient](const VecX& state) {
        const auto ev = bundle_eval(*s, state);
        return momentum_gradient(ev.dhdx, ev.u);
    };

    IntegralSpec h;
    h.name = "h";
    h.value = [s](const VecX& x) { return bundle_hamiltonian(*s, x); };
    h.gradient = [s, nx, momentum_gradient](const VecX& state) {
        const auto ev = bundle_eval(*s, state);
        const VecX dhdx0 = s->potential_grad ? s->potential_grad(ev.x) : VecX(VecX::Zero(nx));
        return momentum_gradient(dhdx0, s->mass_inv * ev.momentum);
    };

    field.integrals.push_back(std::move(htilde));
    field.integrals.push_back(std::move(h));
    for (int i = 0; i < k; ++i) {
        IntegralSpec j;
        j.name = k == 1 ? "J" : ("J" + std::to_string(i + 1));
        j.value = [s, i](const VecX& state) {
            const auto ev = bundle_eval(*s, state);
            return ev.j[i];
        };
        j.gradient = [s, i, momentum_gradient](const VecX& state) {
            const auto ev = bundle_eval(*s, state);
            return momentum_gradient(ev.de[i].transpose() * ev.momentum, ev.e[i]);
        };
        field.integrals.push_back(std::move(j));
    }
    return field;
}

}  // namespace nhfi
