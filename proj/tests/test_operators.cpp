#include <doctest.h>

#include <numbers>

#include "jspec/errors.hpp"
#include "jspec/operators.hpp"
#include "oracles.hpp"

using namespace jspec;

namespace {
constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd mat3(std::initializer_list<double> vals) {
    Eigen::MatrixXd m(3, 3);
    int k = 0;
    for (double v : vals) m(k / 3, k % 3) = v, ++k;
    return m;
}
} // namespace

TEST_CASE("whole-line truncation of the free model") {
    const auto op = build_whole_line(CoefficientModel::free_model(), 1);
    CHECK(op.dense() == mat3({0, 1, 0, 1, 0, 1, 0, 1, 0}));
}

TEST_CASE("whole-line truncation reads the window off the model") {
    // b_0 = b_1 = 2, everything else 0, a == 1
    const CoefficientModel m(0, {1.0, 1.0}, {2.0, 2.0}, ConstantTail{1.0, 0.0});
    const auto op = build_whole_line(m, 2);
    const Eigen::VectorXd d = op.dense().diagonal();
    CHECK(d(0) == 0.0);
    CHECK(d(1) == 0.0);
    CHECK(d(2) == 2.0);
    CHECK(d(3) == 2.0);
    CHECK(d(4) == 0.0);
}

TEST_CASE("periodic tail produces the alternating diagonal") {
    const CoefficientModel m(0, {1.0, 1.0}, {1.0, -1.0}, PeriodicTail{2});
    const auto op = build_whole_line(m, 3);
    for (long n = -3; n <= 3; ++n) {
        CHECK(op.dense()(op.window().pos(n), op.window().pos(n)) ==
              oracles::periodic_b_bruteforce({1.0, -1.0}, 0, 2, n));
    }
}

TEST_CASE("nesting: the smaller truncation is an exact submatrix") {
    const auto model = oracles::random_model(7, 10);
    const auto big = build_whole_line(model, 9);
    const auto small = build_whole_line(model, 4);
    for (long i = -4; i <= 4; ++i) {
        for (long j = -4; j <= 4; ++j) {
            CHECK(big.dense()(big.window().pos(i), big.window().pos(j)) ==
                  small.dense()(small.window().pos(i), small.window().pos(j)));
        }
    }
}

TEST_CASE("constructed matrices are symmetric to machine exactness") {
    const auto model = oracles::random_model(11, 8);
    for (const auto& op :
         {build_whole_line(model, 6), build_half_line(model, Side::plus, BoundaryAngle(0.3), 6),
          build_direct_sum(model, BoundaryAngle(1.1), 6)}) {
        const Eigen::MatrixXd d = op.dense();
        CHECK(d == d.transpose().eval());
    }
}

TEST_CASE("half-line builds") {
    const auto free = CoefficientModel::free_model();

    SUBCASE("theta = 0 on the plus side is the plain truncation") {
        const auto op = build_half_line(free, Side::plus, BoundaryAngle(0.0), 3);
        CHECK(op.window() == IndexWindow{1, 3});
        CHECK(op.corrections().empty());
        CHECK(op.dense() == mat3({0, 1, 0, 1, 0, 1, 0, 1, 0}));
    }

    SUBCASE("theta = pi/4 subtracts tan = 1 at index 1") {
        const auto op = build_half_line(free, Side::plus, BoundaryAngle(kPi / 4), 2);
        Eigen::MatrixXd expect(2, 2);
        expect << -1, 1, 1, 0;
        // the correction is computed (tan), not copied: compare with tolerance
        CHECK((op.dense() - expect).cwiseAbs().maxCoeff() < 1e-15);
    }

    SUBCASE("theta = pi/2 drops the boundary index and shifts") {
        const auto op = build_half_line(free, Side::plus, BoundaryAngle(kPi / 2), 3);
        CHECK(op.window() == IndexWindow{1, 2});
        CHECK(op.corrections().empty());
        Eigen::MatrixXd expect(2, 2);
        expect << 0, 1, 1, 0;
        CHECK(op.dense() == expect);
    }

    SUBCASE("theta = pi/2 with n < 2 leaves an empty window") {
        CHECK_THROWS_AS(build_half_line(free, Side::plus, BoundaryAngle(kPi / 2), 1),
                        ValidationError);
    }

    SUBCASE("shifted windows carry the shifted coefficients") {
        const auto model = oracles::random_model(3, 10);
        const auto plus = build_half_line(model, Side::plus, BoundaryAngle(kPi / 2), 5);
        for (long k = 1; k <= 4; ++k) {
            CHECK(plus.dense()(plus.window().pos(k), plus.window().pos(k)) == model.b(k + 1));
        }
        const auto minus = build_half_line(model, Side::minus, BoundaryAngle(0.0), 5);
        CHECK(minus.window() == IndexWindow{-4, 0});
        for (long k = -4; k <= 0; ++k) {
            CHECK(minus.dense()(minus.window().pos(k), minus.window().pos(k)) ==
                  model.b(k - 1));
        }
    }

    SUBCASE("minus side carries -cot(theta) at index 0") {
        const auto op = build_half_line(free, Side::minus, BoundaryAngle(kPi / 4), 2);
        CHECK(op.window() == IndexWindow{-2, 0});
        CHECK(op.dense()(2, 2) == doctest::Approx(-1.0).epsilon(1e-15));
    }
}

TEST_CASE("direct sum block structure") {
    const auto free = CoefficientModel::free_model();

    SUBCASE("theta = pi/4 on the free model, n = 1") {
        const auto op = build_direct_sum(free, BoundaryAngle(kPi / 4), 1);
        CHECK((op.dense() - mat3({0, 1, 0, 1, -1, 0, 0, 0, -1})).cwiseAbs().maxCoeff() <
              1e-15);
    }

    SUBCASE("exactly one zero coupling, at the 0-1 seam") {
        const auto model = oracles::random_model(5, 8);
        const auto op = build_direct_sum(model, BoundaryAngle(0.9), 6);
        int zeros = 0;
        for (size_t i = 0; i < op.offdiag().size(); ++i) {
            if (op.offdiag()[i] == 0.0) {
                ++zeros;
                CHECK(op.window().index_at(static_cast<long>(i)) == 0);
            }
        }
        CHECK(zeros == 1);
    }

    SUBCASE("restoring the coupling and dropping corrections recovers the whole line") {
        const auto model = oracles::random_model(5, 8);
        const auto op = build_direct_sum(model, BoundaryAngle(0.9), 6);
        auto off = op.offdiag();
        off[op.window().pos(0)] = model.a(0);
        const TruncatedOperator restored(op.window(), op.diag(), off, {});
        CHECK(restored.dense() == build_whole_line(model, 6).dense());
    }

    SUBCASE("minimal windows at the special angles") {
        CHECK(build_half_line(free, Side::minus, BoundaryAngle(0.0), 1).window() ==
              IndexWindow{0, 0});
        CHECK(build_direct_sum(free, BoundaryAngle(0.0), 1).window() == IndexWindow{0, 1});
        // the plus-side drop needs n >= 2, and the direct sum inherits that
        CHECK_THROWS_AS(build_direct_sum(free, BoundaryAngle(kPi / 2), 1), ValidationError);
    }

    SUBCASE("special angles shrink the window by the dropped index") {
        const auto model = oracles::random_model(5, 8);
        const auto at_zero = build_direct_sum(model, BoundaryAngle(0.0), 6);
        CHECK(at_zero.window() == IndexWindow{-5, 6});
        CHECK(at_zero.corrections().empty()); // tan(0) = 0 and index 0 dropped
        const auto at_half_pi = build_direct_sum(model, BoundaryAngle(kPi / 2), 6);
        CHECK(at_half_pi.window() == IndexWindow{-6, 5});
        CHECK(at_half_pi.corrections().empty());
        // both keep exactly one zero coupling at the seam
        for (const auto& op : {at_zero, at_half_pi}) {
            int zeros = 0;
            for (double v : op.offdiag()) zeros += v == 0.0;
            CHECK(zeros == 1);
            CHECK(op.offdiag()[op.window().pos(0)] == 0.0);
        }
    }
}

TEST_CASE("difference J_theta - J is supported on the 0-1 boundary pair") {
    // the displayed difference formula carries the coefficients
    // (a_0 psi(1) + cot(theta) psi(0)) at 0 and (a_0 psi(0) + tan(theta) psi(1)) at 1;
    // computing (J - J_theta) psi directly produces them with positive sign
    const auto model = oracles::random_model(9, 8);
    const BoundaryAngle theta(0.7);
    const Eigen::MatrixXd j = build_whole_line(model, 6).dense();
    const Eigen::MatrixXd j_theta = build_direct_sum(model, theta, 6).dense();
    const IndexWindow w{-6, 6};

    SUBCASE("(J - J_theta) delta_0 = cot(theta) delta_0 + a_0 delta_1") {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(w.size());
        psi(w.pos(0)) = 1.0;
        const Eigen::VectorXd diff = j * psi - j_theta * psi;
        CHECK(diff(w.pos(0)) == doctest::Approx(theta.cot()).epsilon(1e-14));
        CHECK(diff(w.pos(1)) == doctest::Approx(model.a(0)).epsilon(1e-14));
        for (long n = -6; n <= 6; ++n) {
            if (n != 0 && n != 1) CHECK(diff(w.pos(n)) == 0.0);
        }
    }

    SUBCASE("psi supported away from {0,1} is untouched") {
        Eigen::VectorXd psi = Eigen::VectorXd::Zero(w.size());
        psi(w.pos(3)) = 2.0;
        psi(w.pos(-4)) = -1.0;
        CHECK((j * psi - j_theta * psi).norm() == 0.0);
    }
}

TEST_CASE("direct_sum_matrix drops the boundary index in place at special angles") {
    const auto model = oracles::random_model(13, 8);
    const IndexWindow w{-5, 5};
    const Eigen::MatrixXd at_zero = direct_sum_matrix(model, BoundaryAngle(0.0), w);
    CHECK(at_zero.row(w.pos(0)).norm() == 0.0);
    CHECK(at_zero.col(w.pos(0)).norm() == 0.0);
    const Eigen::MatrixXd at_half_pi = direct_sum_matrix(model, BoundaryAngle(kPi / 2), w);
    CHECK(at_half_pi.row(w.pos(1)).norm() == 0.0);
    CHECK(at_half_pi(w.pos(0), w.pos(0)) == model.b(0)); // cot(pi/2) = 0
}

TEST_CASE("boundary angle domain checks") {
    CHECK_THROWS_AS((void)BoundaryAngle(-0.1), ValidationError);
    CHECK_THROWS_AS((void)BoundaryAngle(kPi), ValidationError);
    CHECK_THROWS_AS(BoundaryAngle(kPi / 2).tan(), ValidationError);
    CHECK_THROWS_AS(BoundaryAngle(0.0).cot(), ValidationError);
    CHECK(BoundaryAngle(0.0).tan() == 0.0);
    CHECK(BoundaryAngle(kPi / 2).cot() == doctest::Approx(0.0).epsilon(1e-15));
}
