#include "nhfi/feedback.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <utility>

namespace nhfi {

double lyapunov_value(const LyapunovSpec& spec, const ChartLayout& layout, const VecX& state) {
    double v = 0.0;
    for (const auto& f : spec.integrals) {
        if (f.gain == 0.0) continue;
        const double d = f.value(state) - f.target;
        v += 0.5 * f.gain * d * d;
    }
    for (const auto& pen : spec.penalties) {
        if (pen.gain == 0.0) continue;
        const double defect = orthogonality_defect(layout.matrix(state, pen.block));
        v += 0.25 * pen.gain * defect * defect;
    }
    return v;
}

VecX lyapunov_gradient(const LyapunovSpec& spec, const ChartLayout& layout, const VecX& state) {
    VecX g = VecX::Zero(state.size());
    for (const auto& f : spec.integrals) {
        if (f.gain == 0.0) continue;
        g += f.gain * (f.value(state) - f.target) * f.gradient(state);
    }
    for (const auto& pen : spec.penalties) {
        if (pen.gain == 0.0) continue;
        const auto& b = layout.block(pen.block);
        const MatX r = layout.matrix(state, pen.block);
        const MatX gr = pen.gain * r * (r.transpose() * r - MatX::Identity(r.cols(), r.cols()));
        for (int i = 0; i < b.rows; ++i) {
            for (int j = 0; j < b.cols; ++j) {
                g[b.offset + i * b.cols + j] += gr(i, j);
            }
        }
    }
    return g;
}

FeedbackField::FeedbackField(ExtendedField base, LyapunovSpec spec)
    : base_(std::move(base)), spec_(std::move(spec)) {}

FeedbackField::FeedbackField(ExtendedField base, LyapunovSpec spec, MatX gain_matrix)
    : base_(std::move(base)), spec_(std::move(spec)), gain_matrix_(std::move(gain_matrix)) {
    const MatX& a = *gain_matrix_;
    if (a.rows() != base_.layout.dim() || a.cols() != base_.layout.dim()) {
        throw ConfigError("gain matrix dimension does not match the state layout");
    }
    const MatX sym = 0.5 * (a + a.transpose());
    Eigen::LLT<MatX> llt(sym);
    if (llt.info() != Eigen::Success) {
        throw ConfigError("gain matrix must have a positive definite symmetric part");
    }
}

void FeedbackField::rate(const VecX& state, VecX& dx) const {
    base_.rate(state, dx);
    const VecX g = lyapunov_gradient(spec_, base_.layout, state);
    if (gain_matrix_) {
        dx -= *gain_matrix_ * g;
    } else {
        dx -= g;
    }
}

VecX FeedbackField::operator()(const VecX& state) const {
    VecX dx(state.size());
    rate(state, dx);
    return dx;
}

VecX finite_difference_gradient(const std::function<double(const VecX&)>& f, const VecX& state,
                                double step) {
    VecX g(state.size());
    VecX x = state;
    for (int i = 0; i < state.size(); ++i) {
        const double save = x[i];
        x[i] = save + step;
        const double fp = f(x);
        x[i] = save - step;
        const double fm = f(x);
        x[i] = save;
        g[i] = (fp - fm) / (2.0 * step);
    }
    return g;
}

double gradient_check(const std::function<double(const VecX&)>& f,
                      const std::function<VecX(const VecX&)>& grad, const VecX& state,
                      double step) {
    if (step <= 0.0) throw Error("gradient_check requires a positive step");
    const VecX g = grad(state);
    const VecX fd = finite_difference_gradient(f, state, step);
    const double scale = fd.cwiseAbs().maxCoeff() + g.cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double denom = std::max({std::abs(fd[i]), 1e-4 * scale, 1e-12});
        worst = std::max(worst, std::abs(g[i] - fd[i]) / denom);
    }
    return worst;
}

}  // namespace nhfi
