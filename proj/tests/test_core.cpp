#include "nhfi/core.hpp"

#include "nhfi/systems.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace nhfi;

TEST_CASE("hat map matches the displayed skew matrix") {
    CHECK(hat(Vec3::Zero()).isZero(0.0));

    Mat3 expected;
    expected << 0, -3, 2,
        3, 0, -1,
        -2, 1, 0;
    CHECK((hat(Vec3(1, 2, 3)) - expected).norm() == doctest::Approx(0.0));

    const Vec3 v = hat(Vec3(1, 0, 0)) * Vec3(0, 1, 0);
    CHECK((v - Vec3(0, 0, 1)).norm() == doctest::Approx(0.0));
}

TEST_CASE("hat map properties on random input") {
    auto rng = testing::make_rng(1);
    for (int n = 0; n < 100; ++n) {
        const Vec3 w = testing::uniform_vec(rng, 3);
        const Vec3 v = testing::uniform_vec(rng, 3);
        const Mat3 h = hat(w);
        CHECK((h.transpose() + h).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK((h * v - w.cross(v)).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("orthogonality defect") {
    CHECK(orthogonality_defect(Mat3::Identity()) == 0.0);

    const double a = 3.14159265358979323846 / 3.0;
    Mat3 rz;
    rz << std::cos(a), -std::sin(a), 0,
        std::sin(a), std::cos(a), 0,
        0, 0, 1;
    CHECK(orthogonality_defect(rz) <= 1e-15);

    CHECK(orthogonality_defect(2.0 * Mat3::Identity()) ==
          doctest::Approx(3.0 * std::sqrt(3.0)).epsilon(1e-14));

    auto rng = testing::make_rng(2);
    for (int n = 0; n < 50; ++n) {
        const Mat3 r = detail::random_rotation3(rng) * detail::random_rotation3(rng);
        CHECK(orthogonality_defect(r) <= 1e-14);
    }
}

TEST_CASE("hat2 spins vectors counterclockwise") {
    const Vec2 v = hat2(1.0) * Vec2(1, 0);
    CHECK(v.x() == doctest::Approx(0.0));
    CHECK(v.y() == doctest::Approx(1.0));
}

TEST_CASE("chart layout partitions the state vector") {
    const ChartLayout layout{{"R", 3, 3}, {"Pi", 3}};
    CHECK(layout.dim() == 12);
    CHECK(layout.offset("R") == 0);
    CHECK(layout.offset("Pi") == 9);
    CHECK(layout.block("R").size() == 9);
    CHECK_THROWS_AS(layout.block("nope"), LayoutError);
    CHECK_THROWS_AS(layout.check(VecX::Zero(5)), LayoutError);
    CHECK_THROWS_AS(ChartLayout({{"a", 2}, {"a", 3}}), LayoutError);

    int total = 0;
    int expected_offset = 0;
    for (const auto& b : layout.blocks()) {
        CHECK(b.offset == expected_offset);
        expected_offset += b.size();
        total += b.size();
    }
    CHECK(total == layout.dim());
}

TEST_CASE("matrix blocks flatten row-major") {
    const ChartLayout layout{{"R", 2, 2}, {"v", 1}};
    VecX x = VecX::Zero(5);
    Mat2 m;
    m << 1, 2, 3, 4;
    layout.set_matrix(x, "R", m);
    CHECK(x[0] == 1);
    CHECK(x[1] == 2);
    CHECK(x[2] == 3);
    CHECK(x[3] == 4);
    CHECK((layout.matrix(x, "R") - m).norm() == 0.0);
    CHECK_THROWS_AS(layout.set_matrix(x, "R", MatX::Zero(3, 3)), LayoutError);
}

TEST_CASE("finiteness guard") {
    VecX v = VecX::Ones(3);
    CHECK_NOTHROW(require_finite(v, "v"));
    v[1] = std::nan("");
    CHECK_THROWS_AS(require_finite(v, "v"), Error);
}
