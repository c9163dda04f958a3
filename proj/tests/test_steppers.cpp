#include "nhfi/steppers.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace nhfi;

namespace {

void decay(const VecX& x, VecX& dx) { dx = -x; }

}  // namespace

TEST_CASE("single steps") {
    VecX x0 = VecX::Ones(1);

    SUBCASE("zero field leaves the state unchanged") {
        auto zero = [](const VecX& x, VecX& dx) { dx.setZero(x.size()); };
        CHECK(step(StepperKind::Euler, zero, x0, 0.1)[0] == 1.0);
        CHECK(step(StepperKind::RK4, zero, x0, 0.1)[0] == 1.0);
    }
    SUBCASE("Euler on exponential decay") {
        CHECK(step(StepperKind::Euler, decay, x0, 0.1)[0] == doctest::Approx(0.9).epsilon(1e-15));
    }
    SUBCASE("RK4 matches the fourth-order Taylor polynomial") {
        // 1 - h + h^2/2 - h^3/6 + h^4/24 at h = 0.1
        CHECK(step(StepperKind::RK4, decay, x0, 0.1)[0] ==
              doctest::Approx(0.9048375).epsilon(1e-12));
    }
}

TEST_CASE("integrate bookkeeping") {
    SUBCASE("zero-length run keeps a single sample") {
        const auto rec = integrate(StepperKind::Euler, decay, VecX::Ones(1), 0.1, 0.0,
                                   {{"x", [](double, const VecX& x) { return x[0]; }}});
        CHECK(rec.times.size() == 1);
        CHECK(rec.states.size() == 1);
        CHECK(rec.channel("x")[0] == 1.0);
        CHECK_FALSE(rec.failed);
    }
    SUBCASE("free flow is integrated exactly by Euler") {
        auto free_flow = [](const VecX& x, VecX& dx) {
            dx.resize(6);
            dx.head(3) = x.tail(3);
            dx.tail(3).setZero();
        };
        VecX x0(6);
        x0 << 1, 1, 1, 0.5, -0.25, 0.125;
        const auto rec = integrate(StepperKind::Euler, free_flow, x0, 0.125, 4.0, {});
        const VecX expected_q = x0.head(3) + 4.0 * x0.tail(3);
        CHECK((rec.states.back().head(3) - expected_q).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((rec.states.back().tail(3) - x0.tail(3)).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("NaN in the field flags a failure with the step index") {
        auto blow_up = [](const VecX& x, VecX& dx) {
            dx.resize(1);
            dx[0] = x[0] > 1.5 ? std::nan("") : 1.0;
        };
        const auto rec = integrate(StepperKind::Euler, blow_up, VecX::Ones(1), 1.0, 10.0, {});
        CHECK(rec.failed);
        CHECK(rec.failure_step == 2);
    }
    SUBCASE("channel maxima are tracked at every step independent of the stride") {
        IntegrateOptions options;
        options.channel_stride = 7;
        const auto rec = integrate(
            StepperKind::RK4,
            [](const VecX& x, VecX& dx) {
                dx.resize(2);
                dx[0] = x[1];
                dx[1] = -x[0];
            },
            (VecX(2) << 0.0, 1.0).finished(), 1e-2, 6.3,
            {{"sin", [](double, const VecX& x) { return x[0]; }}}, options);
        CHECK(rec.max_abs("sin") == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(rec.times.size() < 200);
    }
}

TEST_CASE("discrete Lagrange-d'Alembert step") {
    SUBCASE("repeated initial configuration") {
        const double h = 0.25;
        const DlaState s{Vec3(1, 1, 1), Vec3(1, 1, 1), h};
        const DlaState next = dla_step(s);
        // lambda = -1; q2 = (1, 1 - h^2, 1)
        CHECK(next.q_curr.x() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(next.q_curr.y() == doctest::Approx(1.0 - h * h).epsilon(1e-15));
        CHECK(next.q_curr.z() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(dla_constraint_residual(s, next) <= 1e-15);
    }
    SUBCASE("equilibrium at the origin") {
        const DlaState s{Vec3::Zero(), Vec3::Zero(), 1e-3};
        const DlaState next = dla_step(s);
        CHECK(next.q_curr.norm() == 0.0);
    }
    SUBCASE("discrete constraint holds to 1e-12 over 2e5 steps") {
        DlaState s{Vec3(1, 1, 1), Vec3(1, 1, 1), 1e-3};
        double worst = 0.0;
        for (int i = 0; i < 200000; ++i) {
            const DlaState next = dla_step(s);
            worst = std::max(worst, dla_constraint_residual(s, next));
            s = next;
        }
        CHECK(worst <= 1e-12);
    }
    SUBCASE("discrete momentum") {
        const DlaState s{Vec3::Zero(), Vec3(1e-3, 0, 0), 1e-3};
        CHECK((dla_momentum(s) - Vec3(1, 0, 0)).norm() <= 1e-12);
    }
}
