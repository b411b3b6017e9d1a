#pragma once

#include <optional>
#include <vector>

#include "jspec/coefficients.hpp"
#include "jspec/operators.hpp"

namespace jspec {

/// One solution of the eigenvalue recurrence
///   a_{n-1} u(n-1) + a_n u(n+1) + b_n u(n) = E u(n)
/// on a contiguous index range. Stored values are the true solution scaled by
/// exp(-log_scale); rescaling is applied to the whole array at once, so the
/// stored values satisfy the recurrence too.
struct SolutionSample {
    Side side = Side::plus;
    double energy = 0.0;
    long first_index = 0;
    std::vector<double> values; // ascending by lattice index
    double log_scale = 0.0;
    bool identically_zero = false;

    long last_index() const { return first_index + static_cast<long>(values.size()) - 1; }
    bool has_index(long n) const { return n >= first_index && n <= last_index(); }
    double at(long n) const { return values[static_cast<size_t>(n - first_index)]; }
};

/// Propagates initial data through the recurrence. For side plus the data is
/// (u(0), u(1)) and the sample covers [0, L_max + 1]; for side minus the data
/// is (u(1), u(0)) and the sample covers [-L_max, 1]. Magnitudes above 1e150
/// trigger a whole-array renormalization recorded in log_scale.
SolutionSample solve(const CoefficientModel& model, double E, Side side, double u_prev,
                     double u_next, long L_max);

/// Interpolated norm over an interval of length L > 1 anchored at the
/// boundary: sqrt( sum_{n=1}^{[L]} |u(n)|^2 + (L - [L]) |u([L]+1)|^2 ) on the
/// plus side, mirrored through the 0 boundary on the minus side. Ignores
/// log_scale; see log_norm_interval for the absolute version.
double norm_interval(const SolutionSample& u, double L);

/// log of the true interval norm: log(norm_interval) + log_scale.
double log_norm_interval(const SolutionSample& u, double L);

/// The solution with u(0) = -sin(theta), u(1) = cos(theta) (the unique pair
/// satisfying the boundary condition with u(1) = cos(theta)), propagated to
/// the requested side.
SolutionSample boundary_solution(const CoefficientModel& model, BoundaryAngle theta,
                                 double E, Side side = Side::plus, long L_max = 256);

enum class SubordinacyStatus { subordinate_angle, none_detected, inconclusive };

struct RatioPoint {
    double L;
    double ratio; // |u_theta|_L / |u_{theta+pi/2}|_L
};

struct SubordinacyVerdict {
    SubordinacyStatus status = SubordinacyStatus::inconclusive;
    std::optional<double> theta;
    double final_ratio = 0.0;
    std::vector<RatioPoint> ratio_trace; // geometric checkpoints up to L_max
    long L_max = 0;
    double threshold = 0.0;
};

/// Scans boundary angles for a subordinate solution at energy E. The limit in
/// the definition is undecidable numerically; the operational criterion is
/// "norm ratio against the orthogonal candidate below `threshold` at L_max and
/// non-increasing over the last six geometric checkpoints". The full trace is
/// returned so callers can assert trends rather than verdicts.
SubordinacyVerdict detect_subordinate(const CoefficientModel& model, Side side, double E,
                                      long L_max = 100000, double threshold = 1e-4);

/// a_n (u(n+1) v(n) - u(n) v(n+1)); constant in n for two solutions at the
/// same energy.
double wronskian(const CoefficientModel& model, const SolutionSample& u,
                 const SolutionSample& v, long n);

/// Largest relative residual of the recurrence over the sample's interior.
double recurrence_residual(const CoefficientModel& model, const SolutionSample& u);

} // namespace jspec
