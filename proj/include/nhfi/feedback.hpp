#pragma once

#include "nhfi/core.hpp"
#include "nhfi/extension.hpp"
#include "nhfi/integral.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nhfi {

/// Penalty (k/4) ||R^T R - I||^2 on an embedded matrix block, keeping the
/// block near the orthogonal group.
struct ManifoldPenalty {
    std::string block;
    double gain = 0.0;
};

/// V = sum_i (k_i/2) |F_i - c_i|^2 + sum penalties.
struct LyapunovSpec {
    std::vector<IntegralSpec> integrals;
    std::vector<ManifoldPenalty> penalties;
};

double lyapunov_value(const LyapunovSpec& spec, const ChartLayout& layout, const VecX& state);

/// Chain rule: sum_i k_i (F_i - c_i) grad F_i plus k R (R^T R - I) per penalty block.
VecX lyapunov_gradient(const LyapunovSpec& spec, const ChartLayout& layout, const VecX& state);

/// The modified dynamics X - A grad V. A defaults to the identity; when
/// supplied, its symmetric part must be positive definite.
class FeedbackField {
public:
    FeedbackField(ExtendedField base, LyapunovSpec spec);
    FeedbackField(ExtendedField base, LyapunovSpec spec, MatX gain_matrix);

    void rate(const VecX& state, VecX& dx) const;
    VecX operator()(const VecX& state) const;

    const ExtendedField& base() const { return base_; }
    const LyapunovSpec& spec() const { return spec_; }
    const std::optional<MatX>& gain_matrix() const { return gain_matrix_; }

private:
    ExtendedField base_;
    LyapunovSpec spec_;
    std::optional<MatX> gain_matrix_;
};

/// Central finite-difference gradient of a scalar map.
VecX finite_difference_gradient(const std::function<double(const VecX&)>& f, const VecX& state,
                                double step);

/// Worst componentwise relative deviation of an analytic gradient from
/// central finite differences of the value map.
double gradient_check(const std::function<double(const VecX&)>& f,
                      const std::function<VecX(const VecX&)>& grad, const VecX& state,
                      double step = 1e-5);

}  // namespace nhfi
