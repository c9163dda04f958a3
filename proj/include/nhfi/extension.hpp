#pragma once

#include "nhfi/core.hpp"
#include "nhfi/integral.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nhfi {

/// A set of constraint one-forms <p, e_i(q)> given through the vector
/// fields e_i, their flats e_i^b = m(q) e_i and Jacobians D e_i.
struct ConstraintFrame {
    int in_dim = 0;   // dimension of the configuration argument
    int out_dim = 0;  // dimension of e_i(q)
    int count = 0;    // K
    bool orthonormal = true;
    std::function<VecX(const VecX& q, int i)> field;
    std::function<VecX(const VecX& q, int i)> flat;      // optional; engines fall back to mass*field
    std::function<MatX(const VecX& q, int i)> jacobian;  // (j,k) = d(e_i)_j / dq_k, out_dim x in_dim
};

/// Constrained Hamiltonian data on T*Q in coordinates (q, p).
struct CanonicalSetup {
    int dim_q = 0;
    std::function<MatX(const VecX& q)> mass;
    std::function<MatX(const VecX& q)> mass_inv;
    std::function<double(const VecX& q)> potential;     // null => 0
    std::function<VecX(const VecX& q)> potential_grad;  // null => 0
    // d/dq of (1/2) p . m(q)^{-1} p; null means the mass tensor is constant.
    std::function<VecX(const VecX& q, const VecX& p)> kinetic_q_grad;
    ConstraintFrame frame;
    ChartLayout layout;  // blocks {"q", dim_q}, {"p", dim_q}

    static CanonicalSetup kinetic(int dim_q);  // m = I, V = 0, no frame yet
};

/// Checks the frame against the setup on sampled configuration points:
/// orthonormal frames must satisfy <e_i^b, e_j> = delta_ij to 1e-10 at
/// every sample; general frames must have a symmetric positive definite
/// Gram matrix there. The mass tensor is required SPD at every sample.
/// Throws FrameError on violation.
void validate_canonical(const CanonicalSetup& setup, const VecX& box_lo, const VecX& box_hi,
                        int samples = 32, unsigned seed = 20240612);

/// The unconstrained vector field that extends a constrained system, plus
/// the first integrals it is guaranteed to preserve.
struct ExtendedField {
    ChartLayout layout;
    std::function<void(const VecX& x, VecX& dx)> rate;
    std::vector<IntegralSpec> integrals;
    // The classical multiplier form of the constrained system; meaningful on
    // the constraint set, where it agrees with rate.
    std::function<void(const VecX& x, VecX& dx)> constrained_rate;
    // Projects the momentum part onto the constraint set.
    std::function<VecX(const VecX& x)> project_to_constraint;

    VecX operator()(const VecX& x) const {
        VecX dx(x.size());
        rate(x, dx);
        return dx;
    }
};

// --- canonical (T*Q) operations -------------------------------------------

/// (<p, e_1(q)>, ..., <p, e_K(q)>).
VecX constraint_momenta(const CanonicalSetup& setup, const VecX& state);

double hamiltonian(const CanonicalSetup& setup, const VecX& state);

/// H - (1/2) sum_ij <p,e_i> C_ij <p,e_j>, with C the inverse Gram matrix
/// (identity for an orthonormal frame).
double extended_hamiltonian(const CanonicalSetup& setup, const VecX& state);

/// lambda_i = {H, <p, e_i>} for an orthonormal frame.
VecX constrained_multipliers(const CanonicalSetup& setup, const VecX& state);

/// lambda~_i = {H~, <p, e_i>} = {H, <p,e_i>} + sum_j <p,e_j><p,[e_j,e_i]>.
/// Requires an orthonormal frame.
VecX multipliers_tilde(const CanonicalSetup& setup, const VecX& state);

/// lambda_i = sum_l {H, <p, e_l>} C_li with C the inverse Gram matrix.
/// Works for any frame; reduces to constrained_multipliers when C = I.
/// Throws FrameError if the Gram matrix is singular at q.
VecX general_multipliers(const CanonicalSetup& setup, const VecX& state);

ExtendedField extended_field_canonical(const CanonicalSetup& setup);

// --- Lie-Poisson (T*G ~ G x g*) --------------------------------------------

/// Reconstruction of the group factor from the body velocity u = dh~/dmu.
/// Maps (group coordinates, u) to group coordinate rates. The group blocks
/// precede the mu block in the state layout.
struct GroupChart {
    ChartLayout layout;  // group blocks only; empty layout => reduced state only
    std::function<void(const VecX& group, const VecX& u, VecX& group_rate)> reconstruct;
};

GroupChart so3_matrix_chart();                       // block {"R",3,3}; Rdot = R hat(u)
GroupChart so2_translation_chart();                  // blocks {"R",2,2},{"xy",2}; planar group, embedded rotation
GroupChart se2_angle_chart();                        // blocks {"theta",1},{"xy",2}
GroupChart se2_s1_angle_chart();                     // blocks {"theta",1},{"xy",2},{"psi",1}

struct LiePoissonSetup {
    int dim = 0;                                              // dim g*
    std::function<VecX(const VecX&, const VecX&)> bracket;    // [xi, eta] on g
    MatX inertia;                                             // locked inertia
    MatX inertia_inv;
    std::vector<VecX> elements;                               // constraint elements e_i in g
    GroupChart chart;                                         // may have empty layout
    std::string mu_name = "Pi";
};

/// Checks inertia SPD and <I e_i, e_j> = delta_ij to 1e-10; throws FrameError.
void validate_lie_poisson(const LiePoissonSetup& setup);

/// Structure-constant pairing <ad*_xi mu, .> as a covector.
VecX coadjoint(const LiePoissonSetup& setup, const VecX& xi, const VecX& mu);

double lie_poisson_hamiltonian(const LiePoissonSetup& setup, const VecX& mu);
double lie_poisson_extended_hamiltonian(const LiePoissonSetup& setup, const VecX& mu);

/// lambda~_i = {h~, <mu, e_i>}_- = -<mu, [dh~/dmu, e_i]>.
VecX lie_poisson_multipliers_tilde(const LiePoissonSetup& setup, const VecX& mu);

ExtendedField extended_field_lie_poisson(const LiePoissonSetup& setup);

// --- trivial principal bundle (g* x T*X) ------------------------------------

/// Reduced data on g* x T*X for Q = G x X. The combined momentum is
/// (mu, p_x); constraint sections e_i(x) live in g + T_xX and are
/// orthonormal with respect to the (constant) reduced mass tensor.
struct BundleSetup {
    int dim_g = 0;
    int dim_x = 0;
    std::function<VecX(const VecX&, const VecX&)> bracket;  // [xi, eta] on g
    MatX mass;                                              // (dim_g+dim_x) square
    MatX mass_inv;
    std::function<double(const VecX& x)> potential;         // null => 0
    std::function<VecX(const VecX& x)> potential_grad;      // null => 0
    ConstraintFrame frame;                                  // in_dim = dim_x, out_dim = dim_g+dim_x
    GroupChart chart;
    std::string x_name = "x";
    std::string mu_name = "Pi";
    std::string px_name = "px";
};

void validate_bundle(const BundleSetup& setup, const VecX& box_lo, const VecX& box_hi,
                     int samples = 32, unsigned seed = 20240612);

double bundle_hamiltonian(const BundleSetup& setup, const VecX& state);
double bundle_extended_hamiltonian(const BundleSetup& setup, const VecX& state);

/// lambda~_i = {h~, <(mu,p_x), e_i>} under the product bracket: the minus
/// Lie-Poisson block plus the canonical block.
VecX bundle_multipliers_tilde(const BundleSetup& setup, const VecX& state);

ExtendedField extended_field_bundle(const BundleSetup& setup);

}  // namespace nhfi
