#include "nhfi/core.hpp"

#include <cmath>

namespace nhfi {

Mat3 hat(const Vec3& omega) {
    Mat3 m;
    m << 0.0, -omega.z(), omega.y(),
        omega.z(), 0.0, -omega.x(),
        -omega.y(), omega.x(), 0.0;
    return m;
}

Mat2 hat2(double omega) {
    Mat2 m;
    m << 0.0, -omega,
        omega, 0.0;
    return m;
}

double orthogonality_defect(const MatX& r) {
    const MatX d = r.transpose() * r - MatX::Identity(r.cols(), r.cols());
    return d.norm();
}

void require_finite(const VecX& v, std::string_view what) {
    if (!v.allFinite()) {
        throw Error("non-finite entry in " + std::string(what));
    }
}

void require_finite(const MatX& m, std::string_view what) {
    if (!m.allFinite()) {
        throw Error("non-finite entry in " + std::string(what));
    }
}

void require_finite(double x, std::string_view what) {
    if (!std::isfinite(x)) {
        throw Error("non-finite value for " + std::string(what));
    }
}

ChartLayout::ChartLayout(std::initializer_list<BlockSpec> blocks)
    : ChartLayout(std::vector<BlockSpec>(blocks)) {}

ChartLayout::ChartLayout(const std::vector<BlockSpec>& blocks) {
    int offset = 0;
    for (const auto& spec : blocks) {
        if (spec.rows <= 0 || spec.cols <= 0) {
            throw LayoutError("block '" + spec.name + "' must have positive extent");
        }
        if (has(spec.name)) {
            throw LayoutError("duplicate block name '" + spec.name + "'");
        }
        blocks_.push_back(Block{spec.name, offset, spec.rows, spec.cols});
        offset += spec.rows * spec.cols;
    }
    dim_ = offset;
}

bool ChartLayout::has(std::string_view name) const {
    for (const auto& b : blocks_) {
        if (b.name == name) return true;
    }
    return false;
}

const ChartLayout::Block& ChartLayout::block(std::string_view name) const {
    for (const auto& b : blocks_) {
        if (b.name == name) return b;
    }
    throw LayoutError("no block named '" + std::string(name) + "'");
}

void ChartLayout::check(const VecX& x) const {
    if (x.size() != dim_) {
        throw LayoutError("state has dimension " + std::to_string(x.size()) +
                          ", layout expects " + std::to_string(dim_));
    }
}

Eigen::VectorBlock<VecX> ChartLayout::seg(VecX& x, std::string_view name) const {
    check(x);
    const Block& b = block(name);
    return x.segment(b.offset, b.size());
}

Eigen::VectorBlock<const VecX> ChartLayout::seg(const VecX& x, std::string_view name) const {
    check(x);
    const Block& b = block(name);
    return x.segment(b.offset, b.size());
}

MatX ChartLayout::matrix(const VecX& x, std::string_view name) const {
    check(x);
    const Block& b = block(name);
    MatX m(b.rows, b.cols);
    for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            m(i, j) = x[b.offset + i * b.cols + j];
        }
    }
    return m;
}

void ChartLayout::set_matrix(VecX& x, std::string_view name, const MatX& m) const {
    check(x);
    const Block& b = block(name);
    if (m.rows() != b.rows || m.cols() != b.cols) {
        throw LayoutError("matrix shape mismatch for block '" + std::string(name) + "'");
    }
    for (int i = 0; i < b.rows; ++i) {
        for (int j = 0; j < b.cols; ++j) {
            x[b.offset + i * b.cols + j] = m(i, j);
        }
    }
}

}  // namespace nhfi
