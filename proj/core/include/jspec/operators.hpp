#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jspec/coefficients.hpp"
#include "jspec/errors.hpp"

namespace jspec {

enum class Side { plus, minus };

/// Contiguous integer index range [lo, hi], both ends inclusive.
struct IndexWindow {
    long lo = 0;
    long hi = 0;

    long size() const { return hi - lo + 1; }
    bool contains(long n) const { return n >= lo && n <= hi; }
    /// Zero-based matrix position of lattice index n.
    long pos(long n) const { return n - lo; }
    long index_at(long p) const { return lo + p; }
    bool operator==(const IndexWindow&) const = default;
};

IndexWindow make_window(long lo, long hi);

/// theta in [0, pi) encoding the boundary condition
/// u(0) cos(theta) + u(1) sin(theta) = 0. tan is used only away from pi/2 and
/// cot only away from 0; those two angles have dedicated operator handling.
class BoundaryAngle {
public:
    explicit BoundaryAngle(double theta);

    double theta() const { return theta_; }
    bool is_zero() const { return theta_ == 0.0; }
    bool is_half_pi() const;
    double tan() const;
    double cot() const;

private:
    double theta_;
};

struct BoundaryCorrection {
    long index;
    double value; // added to the diagonal at `index`
};

/// Real symmetric tridiagonal truncation of a Jacobi operator, stored as the
/// base coefficients over an index window plus rank-one diagonal corrections.
/// At most one off-diagonal coupling (the 0-1 seam of a direct sum) may be
/// zero; all other couplings are strictly positive copies of the model.
class TruncatedOperator {
public:
    TruncatedOperator(IndexWindow window, std::vector<double> diag,
                      std::vector<double> offdiag,
                      std::vector<BoundaryCorrection> corrections = {});

    const IndexWindow& window() const { return window_; }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& offdiag() const { return offdiag_; }
    const std::vector<BoundaryCorrection>& corrections() const { return corrections_; }

    /// Dense symmetric matrix with corrections applied.
    Eigen::MatrixXd dense() const;

    /// Diagonal at matrix position p with corrections applied.
    double effective_diag(long p) const;

    TruncatedOperator without_corrections() const;

private:
    IndexWindow window_;
    std::vector<double> diag_;
    std::vector<double> offdiag_;
    std::vector<BoundaryCorrection> corrections_;
};

/// Plain truncation of the whole-line operator to an arbitrary window.
TruncatedOperator build_window(const CoefficientModel& model, IndexWindow window);

/// Truncation to [-n, n].
TruncatedOperator build_whole_line(const CoefficientModel& model, long n);

/// Boundary-modified half-line truncation. Side plus lives on [1, n] with
/// correction -tan(theta) at index 1; side minus on [-n, 0] with correction
/// -cot(theta) at index 0. The angles theta = pi/2 (plus side) and theta = 0
/// (minus side) drop the boundary index and shift the sequences instead.
TruncatedOperator build_half_line(const CoefficientModel& model, Side side,
                                  BoundaryAngle theta, long n);

/// Block direct sum of the two boundary-modified half-lines on [-n, n]: the
/// 0-1 coupling is zeroed and the diagonal picks up -cot(theta) at 0 and
/// -tan(theta) at 1. Special angles drop one boundary index as in
/// build_half_line, shrinking the window by one.
TruncatedOperator build_direct_sum(const CoefficientModel& model, BoundaryAngle theta,
                                   long n);

/// Direct sum on an arbitrary window containing the 0-1 seam. For the special
/// angles the dropped index is kept in place as a zero row/column so the
/// result stays positionally comparable with whole-line truncations.
Eigen::MatrixXd direct_sum_matrix(const CoefficientModel& model, BoundaryAngle theta,
                                  IndexWindow window);

} // namespace jspec
