#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "jspec/errors.hpp"
#include "jspec/expansion.hpp"
#include "jspec/herglotz.hpp"
#include "jspec/recurrence.hpp"
#include "jspec/spectral.hpp"
#include "oracles.hpp"

using namespace jspec;

namespace {
constexpr double kPi = std::numbers::pi;
const Complex kI{0.0, 1.0};
} // namespace

TEST_CASE("borel transform on tiny measures") {
    const auto one = DiscreteMeasure::make({{0.0, 1.0}});
    CHECK(std::abs(borel_transform(one, kI) - kI) < 1e-15);

    const auto pair = DiscreteMeasure::make({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK(std::abs(borel_transform(pair, kI) - Complex{0.0, 0.5}) < 1e-15);
}

TEST_CASE("borel transform of a spectral measure equals the resolvent entry") {
    const auto sys = eigendecompose(build_whole_line(CoefficientModel::free_model(), 1));
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(3);
    psi(sys.window.pos(1)) = 1.0;
    const auto mu = spectral_measure(sys, psi);
    const Complex direct = oracles::dense_resolvent_entry(sys.matrix, sys.window.pos(1),
                                                          sys.window.pos(1), 2.0 * kI);
    CHECK(std::abs(borel_transform(mu, 2.0 * kI) - direct) < 1e-12);
}

TEST_CASE("borel transform pole and domain errors") {
    const auto mu = DiscreteMeasure::make({{0.5, 1.0}, {2.0, 0.25}});
    CHECK_THROWS_AS(borel_transform(mu, Complex{0.5, 0.0}), PoleError);
    CHECK_THROWS_AS(borel_transform(mu, Complex{0.0, -0.1}), ValidationError);
    CHECK(std::abs(borel_transform(mu, Complex{1.0, 0.0}) - (1.0 / (0.5 - 1.0) + 0.25)) <
          1e-15);
}

TEST_CASE("measure validation") {
    CHECK_THROWS_AS(DiscreteMeasure::make({{0.0, 1.0}, {0.0, 2.0}}), ValidationError);
    CHECK_THROWS_AS(DiscreteMeasure::make({{0.0, -1.0}}, true), ValidationError);
    CHECK_NOTHROW(DiscreteMeasure::make({{0.0, -1.0}}, false));
    CHECK_THROWS_AS(EpsSchedule(0.1, 1.5, 10), ValidationError);
    CHECK_THROWS_AS(EpsSchedule(-0.1, 0.5, 10), ValidationError);
}

TEST_CASE("half-line m-function of the free model") {
    const auto free = CoefficientModel::free_model();

    SUBCASE("continued fraction against the fixed-point oracle at z=i") {
        const Complex oracle = oracles::m_fixed_point(1.0, 0.0, kI);
        const Complex m = half_line_m(free, Side::plus, BoundaryAngle(0.0), kI, 64);
        CHECK(std::abs(m - oracle) < 1e-12);
        CHECK(std::abs(m - kI * (std::sqrt(5.0) - 1.0) / 2.0) < 1e-12);
    }

    SUBCASE("z=3i: purely imaginary and inside the resolvent bound") {
        const Complex m = half_line_m(free, Side::plus, BoundaryAngle(0.0), 3.0 * kI, 64);
        CHECK(std::abs(m.real()) < 1e-14);
        CHECK(std::abs(m) < 1.0 / 3.0);
    }

    SUBCASE("continued fraction agrees with the truncation resolvent route") {
        const Complex z{0.4, 0.8};
        const Complex cf = half_line_m(free, Side::plus, BoundaryAngle(0.6), z, 64);
        const Complex mat = half_line_m_matrix(free, Side::plus, BoundaryAngle(0.6), z, 600);
        CHECK(std::abs(cf - mat) < 1e-8);
    }
}

TEST_CASE("half-line m with periodic tail stays internally consistent") {
    const CoefficientModel model(0, {1.0, 0.8}, {0.4, -0.4}, PeriodicTail{2});
    const Complex z{0.1, 0.3};
    const Complex cf = half_line_m(model, Side::plus, BoundaryAngle(0.0), z, 32);
    const Complex deep = half_line_m(model, Side::plus, BoundaryAngle(0.0), z, 512);
    CHECK(std::abs(cf - deep) < 1e-12);
    const Complex mat = half_line_m_matrix(model, Side::plus, BoundaryAngle(0.0), z, 800);
    CHECK(std::abs(cf - mat) < 1e-7);
}

TEST_CASE("depth nesting: doubling the depth moves nothing once past the window") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.1, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const auto model = oracles::random_model(300 + rep, 6);
        const Complex z{2.0 * unif(rng) - 1.0, 0.1 + unif(rng)};
        const Complex m1 = half_line_m(model, Side::plus, BoundaryAngle(0.0), z, 16);
        const Complex m2 = half_line_m(model, Side::plus, BoundaryAngle(0.0), z, 32);
        CHECK(std::abs(m1 - m2) < 1e-13);
    }
}

TEST_CASE("a depth window too short to see the coefficients is flagged") {
    // strong variation at indices 3..6 invisible at depth 1 but not depth 2
    const CoefficientModel model(1, {1, 1, 1, 1, 1, 1}, {0, 0, 3, -2, 3, -2},
                                 ConstantTail{1.0, 0.0});
    CHECK_THROWS_AS(
        half_line_m(model, Side::plus, BoundaryAngle(0.0), Complex{0.2, 0.2}, 1, 1e-12),
        ConvergenceError);
}

TEST_CASE("perturbation formula") {
    SUBCASE("theta = 0 is the identity") {
        const Complex m0{0.3, 0.7};
        CHECK(perturbation_formula(m0, BoundaryAngle(0.0)) == m0);
    }
    SUBCASE("m0 = i, theta = pi/4") {
        const Complex got = perturbation_formula(kI, BoundaryAngle(kPi / 4));
        CHECK(std::abs(got - Complex{-0.5, 0.5}) < 1e-15);
    }
    SUBCASE("matches the directly modified operator") {
        const auto free = CoefficientModel::free_model();
        const Complex z{0.3, 0.5};
        const Complex m0 = half_line_m(free, Side::plus, BoundaryAngle(0.0), z, 64);
        const Complex direct = half_line_m(free, Side::plus, BoundaryAngle(kPi / 4), z, 64);
        CHECK(std::abs(direct - perturbation_formula(m0, BoundaryAngle(kPi / 4))) < 1e-9);
    }
    SUBCASE("functional identity on random models") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int rep = 0; rep < 30; ++rep) {
            const auto model = oracles::random_model(400 + rep, 5);
            const Complex z{2.0 * unif(rng) - 1.0, 0.05 + unif(rng)};
            double theta = kPi * unif(rng);
            if (std::abs(theta - kPi / 2) < 0.05) theta = 0.3;
            const Complex m0 = half_line_m(model, Side::plus, BoundaryAngle(0.0), z, 48);
            const Complex direct =
                half_line_m(model, Side::plus, BoundaryAngle(theta), z, 48);
            CHECK(std::abs(direct - perturbation_formula(m0, BoundaryAngle(theta))) < 1e-8);
        }
    }
}

TEST_CASE("whole-line resolvent entries") {
    const auto free = CoefficientModel::free_model();

    SUBCASE("diagonal entries are Herglotz, off-diagonal symmetric and bounded") {
        const auto model = oracles::random_model(23, 8);
        const Complex z{0.3, 0.7};
        const Complex diag = whole_line_resolvent_entry(model, 2, 2, z, 60);
        CHECK(diag.imag() > 0.0);
        CHECK(std::abs(diag) <= 1.0 / z.imag());
        const Complex a = whole_line_resolvent_entry(model, -3, 5, z, 60);
        const Complex b = whole_line_resolvent_entry(model, 5, -3, z, 60);
        CHECK(std::abs(a - b) < 1e-12);
        CHECK(std::abs(a) <= 1.0 / z.imag());
    }

    SUBCASE("free model k=j=0 matches the eigendecomposition route") {
        const auto sys = eigendecompose(build_whole_line(free, 60));
        const auto mu00 = joint_measure(sys, 0, 0);
        const Complex via_measure = borel_transform(mu00, 2.0 * kI);
        const Complex direct = whole_line_resolvent_entry(free, 0, 0, 2.0 * kI, 60);
        CHECK(std::abs(via_measure - direct) < 1e-12);
    }

    SUBCASE("resolvent norm bound") {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int rep = 0; rep < 25; ++rep) {
            const auto model = oracles::random_model(500 + rep, 6);
            const Complex z{4.0 * unif(rng) - 2.0, 0.2 + 2.0 * unif(rng)};
            const long k = static_cast<long>(unif(rng) * 7) - 3;
            const long j = static_cast<long>(unif(rng) * 7) - 3;
            const auto op = build_whole_line(model, 16);
            CHECK(std::abs(truncation_resolvent_entry(op, k, j, z)) <= 1.0 / z.imag());
        }
    }

    SUBCASE("truncation-sensitive z raises a convergence error") {
        CHECK_THROWS_AS(
            whole_line_resolvent_entry(free, 0, 0, Complex{0.0, 1e-7}, 12, 1e-10),
            ConvergenceError);
    }
}

TEST_CASE("herglotz property under randomized measures") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::pair<double, double>> atoms;
        const int n = 1 + static_cast<int>(unif(rng) * 12);
        for (int i = 0; i < n; ++i) atoms.push_back({i + unif(rng) * 0.5, unif(rng)});
        const auto mu = DiscreteMeasure::make(std::move(atoms));
        const Complex z{20.0 * unif(rng) - 10.0, 0.01 + 3.0 * unif(rng)};
        const HerglotzSample s = sample_borel(mu, z); // asserts Im > -1e-14 internally
        CHECK(s.value.imag() > -1e-14);
        CHECK(s.z == z);
    }
}

TEST_CASE("boundary value of m_0 matches the detected subordinate angle") {
    // pure-point example: a diagonal bump pins an isolated eigenvalue outside
    // [-2, 2] whose eigenvector decays on both sides
    const CoefficientModel model(0, {1.0, 1.0}, {3.0, 0.4}, ConstantTail{1.0, 0.0});
    const auto sys = eigendecompose(build_whole_line(model, 150));
    const int atom = sys.size() - 1;
    const double E = sys.energies(atom);
    REQUIRE(E > 2.5);

    const auto verdict = detect_subordinate(model, Side::plus, E, 8192, 1e-3);
    REQUIRE(verdict.status == SubordinacyStatus::subordinate_angle);
    const double theta = *verdict.theta;

    // the detected angle agrees with the eigenvector's boundary pair
    const auto u = subordinate_amplitude(sys, atom);
    CHECK(std::abs(u.at(0) * std::cos(theta) + u.at(1) * std::sin(theta)) < 1e-6);

    // and with the boundary value of the unperturbed m-function (trend along
    // the schedule down to eps = 1e-6, tolerance 1e-3)
    const EpsSchedule sched(0.1, 0.5, 18);
    std::vector<Complex> values;
    for (double eps : sched.values()) {
        values.push_back(half_line_m(model, Side::plus, BoundaryAngle(0.0),
                                     Complex{E, eps}, 64));
    }
    const Complex limit = richardson_extrapolate(values, sched.factor, 5);
    CHECK(std::abs(std::cos(theta) / std::sin(theta) - limit.real()) < 1e-3);
}

TEST_CASE("richardson extrapolation removes polynomial error terms") {
    const EpsSchedule sched(0.1, 0.5, 12);
    std::vector<Complex> vals;
    for (double e : sched.values()) {
        vals.push_back(Complex{3.0 + 2.0 * e + 0.5 * e * e, -1.0 + 0.3 * e});
    }
    const Complex lim = richardson_extrapolate(vals, sched.factor, 5);
    CHECK(std::abs(lim - Complex{3.0, -1.0}) < 1e-12);
}

TEST_CASE("poltoratskii ratio") {
    SUBCASE("nu = sigma gives ratio 1 at every eps") {
        const auto sigma = DiscreteMeasure::make({{-0.5, 0.4}, {1.0, 0.6}});
        const auto est = poltoratskii_ratio(sigma, sigma, 1.0, EpsSchedule(0.1, 0.5, 15));
        for (const auto& [eps, v] : est.trace) CHECK(std::abs(v - 1.0) < 1e-15);
        CHECK(est.converged);
    }
    SUBCASE("weight ratio at an atom") {
        const auto sigma = DiscreteMeasure::make({{0.0, 0.7}, {1.0, 0.3}});
        const auto nu = DiscreteMeasure::make({{0.0, 0.35}});
        const auto est = poltoratskii_ratio(nu, sigma, 0.0, EpsSchedule(0.1, 0.5, 20));
        CHECK(std::abs(est.limit - 0.5) < 1e-10);
        // the raw trace approaches the weight ratio from its eps != 0 values
        CHECK(std::abs(est.trace.back().second - 0.5) <
              std::abs(est.trace.front().second - 0.5));
    }
    SUBCASE("nu = c sigma is exactly c even away from atoms") {
        std::vector<std::pair<double, double>> atoms{{-1.0, 0.2}, {0.4, 0.5}, {2.0, 0.3}};
        const auto sigma = DiscreteMeasure::make(atoms);
        for (auto& a : atoms) a.second *= 0.25;
        const auto nu = DiscreteMeasure::make(atoms);
        const auto est = poltoratskii_ratio(nu, sigma, 5.0, EpsSchedule(0.1, 0.5, 10));
        for (const auto& [eps, v] : est.trace) CHECK(std::abs(v - 0.25) < 1e-14);
    }
    SUBCASE("absolute continuity precondition") {
        const auto sigma = DiscreteMeasure::make({{0.0, 1.0}});
        const auto nu = DiscreteMeasure::make({{0.5, 1.0}});
        CHECK_THROWS_AS(poltoratskii_ratio(nu, sigma, 0.0, EpsSchedule()), ValidationError);
    }
}

TEST_CASE("tridiagonal solver with pivoting matches dense LU") {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 2 + static_cast<int>((unif(rng) + 1.0) * 20);
        std::vector<Complex> d(n), dl(n - 1), du(n - 1), rhs(n);
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            d[i] = Complex{unif(rng), unif(rng)};
            if (rep == 0 && i % 5 == 0) d[i] = 0.0; // exercise the pivot path
            m(i, i) = d[i];
            rhs[i] = Complex{unif(rng), unif(rng)};
        }
        for (int i = 0; i + 1 < n; ++i) {
            dl[i] = Complex{unif(rng), unif(rng)};
            du[i] = dl[i];
            m(i, i + 1) = m(i + 1, i) = dl[i];
        }
        Eigen::VectorXcd b(n);
        for (int i = 0; i < n; ++i) b(i) = rhs[i];
        const Eigen::VectorXcd expect = m.partialPivLu().solve(b);
        const auto got = detail::tridiag_solve(d, dl, du, rhs);
        for (int i = 0; i < n; ++i) CHECK(std::abs(got[i] - expect(i)) < 1e-9);
    }
    SUBCASE("zero diagonal forces a row swap") {
        const auto x = detail::tridiag_solve({Complex{0.0, 0.0}, Complex{0.0, 0.0}},
                                             {Complex{1.0, 0.0}}, {Complex{1.0, 0.0}},
                                             {Complex{2.0, 0.0}, Complex{3.0, 0.0}});
        CHECK(std::abs(x[0] - 3.0) < 1e-15);
        CHECK(std::abs(x[1] - 2.0) < 1e-15);
    }
}
