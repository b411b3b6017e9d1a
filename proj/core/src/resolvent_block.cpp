#include "jspec/resolvent_block.hpp"

#include <cmath>

#include "jspec/errors.hpp"
#include "jspec/operators.hpp"

namespace jspec {

namespace {

Eigen::MatrixXcd ambient_block(const CoefficientModel& model, long n, Complex z, long depth) {
    const IndexWindow ambient{-depth, depth};
    const long size = ambient.size();
    std::vector<Complex> diag(size), lower(size - 1), upper(size - 1);
    for (long p = 0; p < size; ++p) diag[p] = model.b(ambient.index_at(p)) - z;
    for (long p = 0; p + 1 < size; ++p) {
        lower[p] = upper[p] = model.a(ambient.index_at(p));
    }
    const long m = 2 * n + 1;
    Eigen::MatrixXcd block(m, m);
    for (long j = -n; j <= n; ++j) {
        std::vector<Complex> rhs(size, Complex{0.0, 0.0});
        rhs[ambient.pos(j)] = 1.0;
        const auto col = detail::tridiag_solve(diag, lower, upper, std::move(rhs));
        for (long k = -n; k <= n; ++k) block(k + n, j + n) = col[ambient.pos(k)];
    }
    return block;
}

} // namespace

ResolventBlock build_block(const CoefficientModel& model, long n, Complex z,
                           long outer_depth, double tol) {
    if (!(z.imag() > 0.0)) throw ValidationError("resolvent block requires Im z > 0");
    if (n < 0) throw ValidationError("block half-width must be >= 0");
    if (outer_depth <= n + 10) throw ValidationError("outer_depth must exceed n + 10");

    ResolventBlock block;
    block.n = n;
    block.z = z;
    block.outer_depth = outer_depth;
    block.entries = ambient_block(model, n, z, outer_depth);
    const Eigen::MatrixXcd deeper = ambient_block(model, n, z, 2 * outer_depth);
    block.richardson_diff = (block.entries - deeper).cwiseAbs().maxCoeff();
    if (block.richardson_diff > tol) {
        throw ConvergenceError("resolvent block is truncation sensitive",
                               block.entries(0, 0), deeper(0, 0));
    }
    return block;
}

StructureReport verify_inverse_structure(const ResolventBlock& block,
                                         const CoefficientModel& model) {
    const long m = block.entries.rows();
    const long n = block.n;
    if (n < 1) throw ValidationError("inverse structure needs n >= 1 (two corners)");

    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block.entries);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(m - 1);
    if (smin == 0.0 || smax / smin > 1e12) {
        throw ConditioningError("resolvent block too ill-conditioned to invert");
    }

    const Eigen::MatrixXcd inv = block.entries.inverse();

    StructureReport report;
    report.n = n;
    report.z = block.z;
    report.condition = smax / smin;

    for (long i = 0; i < m; ++i) {
        for (long j = 0; j < m; ++j) {
            const double v = std::abs(inv(i, j));
            if (std::labs(i - j) > 1) {
                report.off_band_max = std::max(report.off_band_max, v);
            }
        }
    }
    for (long i = 0; i + 1 < m; ++i) {
        const double a = model.a(i - n); // couples lattice indices i-n and i-n+1
        report.band_deviation_max =
            std::max({report.band_deviation_max, std::abs(inv(i, i + 1) - a),
                      std::abs(inv(i + 1, i) - a)});
    }
    for (long i = 1; i + 1 < m; ++i) {
        const Complex expected = Complex{model.b(i - n), 0.0} - block.z;
        report.band_deviation_max =
            std::max(report.band_deviation_max, std::abs(inv(i, i) - expected));
    }

    // corner entries against the outward m-functions; the continued fraction
    // is exact once its seed clears the coefficient window
    const long reach_plus = std::max<long>(40, model.window_end() - n + 40);
    const long reach_minus = std::max<long>(40, -model.window_start() - n + 40);
    const Complex m_plus = outward_m(model, n, Side::plus, block.z, reach_plus);
    const Complex m_minus = outward_m(model, -n, Side::minus, block.z, reach_minus);
    report.corner_error_minus = std::abs(inv(0, 0) - 1.0 / m_minus);
    report.corner_error_plus = std::abs(inv(m - 1, m - 1) - 1.0 / m_plus);

    for (long i = 1; i + 1 < m; ++i) {
        const long k = i - n;
        const Complex m_k = outward_m(model, k, Side::plus, block.z,
                                      std::max<long>(40, model.window_end() - k + 40));
        const Complex literal = Complex{model.b(k), 0.0} - block.z + 1.0 / m_k;
        report.literal_diagonal_deviation =
            std::max(report.literal_diagonal_deviation, std::abs(inv(i, i) - literal));
    }
    return report;
}

} // namespace jspec
