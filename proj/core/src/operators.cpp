#include "jspec/operators.hpp"

#include <cmath>
#include <numbers>

namespace jspec {

namespace {
constexpr double kHalfPi = std::numbers::pi / 2.0;
}

IndexWindow make_window(long lo, long hi) {
    if (lo > hi) throw ValidationError("index window requires lo <= hi");
    return IndexWindow{lo, hi};
}

BoundaryAngle::BoundaryAngle(double theta) : theta_(theta) {
    if (!(theta >= 0.0) || theta >= std::numbers::pi) {
        throw ValidationError("boundary angle must lie in [0, pi)");
    }
}

bool BoundaryAngle::is_half_pi() const { return theta_ == kHalfPi; }

double BoundaryAngle::tan() const {
    if (is_half_pi()) throw ValidationError("tan(theta) undefined at theta = pi/2");
    return std::tan(theta_);
}

double BoundaryAngle::cot() const {
    if (is_zero()) throw ValidationError("cot(theta) undefined at theta = 0");
    return std::cos(theta_) / std::sin(theta_);
}

TruncatedOperator::TruncatedOperator(IndexWindow window, std::vector<double> diag,
                                     std::vector<double> offdiag,
                                     std::vector<BoundaryCorrection> corrections)
    : window_(window),
      diag_(std::move(diag)),
      offdiag_(std::move(offdiag)),
      corrections_(std::move(corrections)) {
    const long n = window_.size();
    if (static_cast<long>(diag_.size()) != n ||
        static_cast<long>(offdiag_.size()) != n - 1) {
        throw ValidationError("truncated operator: diag/offdiag sizes do not match window");
    }
    for (double v : offdiag_) {
        if (v < 0.0) throw ValidationError("off-diagonal entries must be non-negative");
    }
    for (const auto& c : corrections_) {
        if (!window_.contains(c.index)) {
            throw ValidationError("boundary correction index outside window");
        }
    }
}

Eigen::MatrixXd TruncatedOperator::dense() const {
    const long n = window_.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (long i = 0; i < n; ++i) m(i, i) = diag_[i];
    for (long i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = offdiag_[i];
        m(i + 1, i) = offdiag_[i];
    }
    for (const auto& c : corrections_) {
        const long p = window_.pos(c.index);
        m(p, p) += c.value;
    }
    return m;
}

double TruncatedOperator::effective_diag(long p) const {
    double v = diag_[p];
    for (const auto& c : corrections_) {
        if (window_.pos(c.index) == p) v += c.value;
    }
    return v;
}

TruncatedOperator TruncatedOperator::without_corrections() const {
    return TruncatedOperator(window_, diag_, offdiag_, {});
}

TruncatedOperator build_window(const CoefficientModel& model, IndexWindow window) {
    const long n = window.size();
    std::vector<double> diag(n), off(n - 1);
    for (long p = 0; p < n; ++p) diag[p] = model.b(window.index_at(p));
    for (long p = 0; p + 1 < n; ++p) off[p] = model.a(window.index_at(p));
    return TruncatedOperator(window, std::move(diag), std::move(off));
}

TruncatedOperator build_whole_line(const CoefficientModel& model, long n) {
    if (n < 1) throw ValidationError("whole-line truncation requires n >= 1");
    return build_window(model, IndexWindow{-n, n});
}

namespace {

// Shifted half-line truncation dropping the boundary index. The plus-side
// window [1, n] has n points, so the drop-and-shift leaves [1, n-1] carrying
// the original coefficients of [2, n]; the minus-side window [-n, 0] has n+1
// points and leaves [-(n-1), 0] carrying [-n, -1].
TruncatedOperator build_shifted_half_line(const CoefficientModel& model, Side side, long n) {
    if (side == Side::plus) {
        if (n < 2) throw ValidationError("shifted plus half-line requires n >= 2");
        const long m = n - 1;
        std::vector<double> diag(m), off(m - 1);
        for (long p = 0; p < m; ++p) diag[p] = model.b(2 + p);
        for (long p = 0; p + 1 < m; ++p) off[p] = model.a(2 + p);
        return TruncatedOperator(IndexWindow{1, m}, std::move(diag), std::move(off));
    }
    const long m = n;
    std::vector<double> diag(m), off(m - 1);
    for (long p = 0; p < m; ++p) diag[p] = model.b(-n + p);
    for (long p = 0; p + 1 < m; ++p) off[p] = model.a(-n + p);
    return TruncatedOperator(IndexWindow{-(m - 1), 0}, std::move(diag), std::move(off));
}

} // namespace

TruncatedOperator build_half_line(const CoefficientModel& model, Side side,
                                  BoundaryAngle theta, long n) {
    if (n < 1) throw ValidationError("half-line truncation requires n >= 1");
    if (side == Side::plus) {
        if (theta.is_half_pi()) return build_shifted_half_line(model, side, n);
        auto op = build_window(model, IndexWindow{1, n});
        if (theta.is_zero()) return op;
        return TruncatedOperator(op.window(), op.diag(), op.offdiag(),
                                 {{1, -theta.tan()}});
    }
    if (theta.is_zero()) return build_shifted_half_line(model, side, n);
    auto op = build_window(model, IndexWindow{-n, 0});
    if (theta.is_half_pi()) return op; // cot(pi/2) = 0
    return TruncatedOperator(op.window(), op.diag(), op.offdiag(), {{0, -theta.cot()}});
}

TruncatedOperator build_direct_sum(const CoefficientModel& model, BoundaryAngle theta,
                                   long n) {
    if (n < 1) throw ValidationError("direct sum requires n >= 1");
    const auto minus = build_half_line(model, Side::minus, theta, n);
    const auto plus = build_half_line(model, Side::plus, theta, n);

    const IndexWindow window{minus.window().lo, plus.window().hi};
    std::vector<double> diag;
    diag.reserve(window.size());
    diag.insert(diag.end(), minus.diag().begin(), minus.diag().end());
    diag.insert(diag.end(), plus.diag().begin(), plus.diag().end());

    std::vector<double> off;
    off.reserve(window.size() - 1);
    off.insert(off.end(), minus.offdiag().begin(), minus.offdiag().end());
    off.push_back(0.0); // decoupled seam between the two blocks
    off.insert(off.end(), plus.offdiag().begin(), plus.offdiag().end());

    std::vector<BoundaryCorrection> corr;
    for (const auto& c : minus.corrections()) corr.push_back(c);
    for (const auto& c : plus.corrections()) corr.push_back(c);
    return TruncatedOperator(window, std::move(diag), std::move(off), std::move(corr));
}

Eigen::MatrixXd direct_sum_matrix(const CoefficientModel& model, BoundaryAngle theta,
                                  IndexWindow window) {
    if (!window.contains(0) || !window.contains(1)) {
        throw ValidationError("direct sum window must contain the 0-1 seam");
    }
    Eigen::MatrixXd m = build_window(model, window).dense();
    const long p0 = window.pos(0);
    const long p1 = window.pos(1);
    m(p0, p1) = 0.0;
    m(p1, p0) = 0.0;
    if (theta.is_zero()) {
        m.row(p0).setZero();
        m.col(p0).setZero();
    } else if (theta.is_half_pi()) {
        m.row(p1).setZero();
        m.col(p1).setZero();
    } else {
        m(p0, p0) -= theta.cot();
        m(p1, p1) -= theta.tan();
    }
    return m;
}

} // namespace jspec
