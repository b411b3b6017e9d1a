#pragma once

#include <Eigen/Dense>

#include "jspec/herglotz.hpp"

namespace jspec {

/// The (2n+1)x(2n+1) resolvent submatrix F(n,z)_{kj} = <delta_k, (J-z)^{-1}
/// delta_j>, k,j in [-n,n], computed from an ambient truncation deep enough
/// that the entries have stabilized.
struct ResolventBlock {
    long n = 0;
    Complex z{0.0, 1.0};
    Eigen::MatrixXcd entries;
    long outer_depth = 0;
    double richardson_diff = 0.0; // worst entry change between depth and 2*depth
};

/// Builds the block from the ambient truncation [-outer_depth, outer_depth]
/// and checks it against the doubled truncation; raises ConvergenceError when
/// entries move by more than `tol`.
ResolventBlock build_block(const CoefficientModel& model, long n, Complex z,
                           long outer_depth = 800, double tol = 1e-9);

/// Deviation of F(n,z)^{-1} from the tridiagonal structure with interior
/// entries (a_k, b_k - z) and corner diagonal entries 1/m_{-n}, 1/m_{+n},
/// where m_{+-n} are the m-functions of the outward half-lines including
/// index +-n (continued-fraction route).
struct StructureReport {
    long n = 0;
    Complex z{0.0, 1.0};
    double off_band_max = 0.0;
    double band_deviation_max = 0.0;
    double corner_error_minus = 0.0;
    double corner_error_plus = 0.0;
    double condition = 0.0;
    /// Distance of the interior diagonal from the reading that adds a full
    /// diagonal of m-reciprocals on top of the band. Reported for comparison,
    /// never asserted small: the consistent reading keeps the interior at
    /// b_k - z and this gauge measures |1/m_{[k,inf)}| there.
    double literal_diagonal_deviation = 0.0;
};

StructureReport verify_inverse_structure(const ResolventBlock& block,
                                         const CoefficientModel& model);

} // namespace jspec
