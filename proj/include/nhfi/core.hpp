#pragma once

#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nhfi {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LayoutError : Error {
    using Error::Error;
};
struct FrameError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

/// Skew matrix of omega: hat(omega) * v == omega x v.
Mat3 hat(const Vec3& omega);

/// 2x2 analogue, the so(2) generator scaled by omega: [[0,-w],[w,0]].
Mat2 hat2(double omega);

/// ||R^T R - I|| in the trace norm ||A|| = sqrt(trace(A^T A)).
double orthogonality_defect(const MatX& r);

/// Throws Error if any entry is NaN/Inf. Used at user-input boundaries.
void require_finite(const VecX& v, std::string_view what);
void require_finite(const MatX& m, std::string_view what);
void require_finite(double x, std::string_view what);

/// Named blocks with offsets into a flat state vector. Matrix blocks are
/// flattened row-major.
class ChartLayout {
public:
    struct BlockSpec {
        std::string name;
        int rows = 0;
        int cols = 1;
    };
    struct Block {
        std::string name;
        int offset = 0;
        int rows = 0;
        int cols = 1;
        int size() const { return rows * cols; }
    };

    ChartLayout() = default;
    ChartLayout(std::initializer_list<BlockSpec> blocks);
    explicit ChartLayout(const std::vector<BlockSpec>& blocks);

    int dim() const { return dim_; }
    const std::vector<Block>& blocks() const { return blocks_; }
    bool has(std::string_view name) const;
    const Block& block(std::string_view name) const;
    int offset(std::string_view name) const { return block(name).offset; }
    int size(std::string_view name) const { return block(name).size(); }

    /// Throws LayoutError unless x.size() == dim().
    void check(const VecX& x) const;

    Eigen::VectorBlock<VecX> seg(VecX& x, std::string_view name) const;
    Eigen::VectorBlock<const VecX> seg(const VecX& x, std::string_view name) const;

    /// Row-major round trip for matrix blocks.
    MatX matrix(const VecX& x, std::string_view name) const;
    void set_matrix(VecX& x, std::string_view name, const MatX& m) const;

private:
    std::vector<Block> blocks_;
    int dim_ = 0;
};

}  // namespace nhfi
