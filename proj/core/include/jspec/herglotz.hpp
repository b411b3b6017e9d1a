#pragma once

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "jspec/coefficients.hpp"
#include "jspec/operators.hpp"

namespace jspec {

using Complex = std::complex<double>;

/// Finitely many atoms (E_i, w_i) with strictly increasing positions. Signed
/// weights are allowed for joint measures; positive_flag records whether the
/// measure is known to be positive (and then Herglotz bounds apply).
struct DiscreteMeasure {
    std::vector<double> positions;
    std::vector<double> weights;
    bool positive_flag = true;

    /// Sorts atoms by position and validates; throws on duplicate positions.
    static DiscreteMeasure make(std::vector<std::pair<double, double>> atoms,
                                bool positive_flag = true);

    size_t size() const { return positions.size(); }
    double total_mass() const;
    /// Index of the atom at exactly this position, if present.
    std::optional<size_t> find_atom(double E) const;
    /// Sum of weights inside the open interval (E - eps, E + eps).
    double interval_mass(double E, double eps) const;

    nlohmann::json to_json() const;
    static DiscreteMeasure from_json(const nlohmann::json& j);
};

/// Strictly decreasing geometric sequence eps_k = eps_start * factor^k along
/// which boundary limits eps -> 0 are sampled.
struct EpsSchedule {
    double eps_start = 0.1;
    double factor = 0.5;
    int count = 20;

    EpsSchedule() = default;
    EpsSchedule(double start, double f, int n);

    double eps(int k) const;
    std::vector<double> values() const;
};

/// A Borel-transform evaluation M(z) together with its evaluation point.
struct HerglotzSample {
    Complex z;
    Complex value;
};

/// Evaluates the Borel transform and packages it with its point; for positive
/// measures the Herglotz property Im M > 0 is enforced (1e-14 slack).
HerglotzSample sample_borel(const DiscreteMeasure& mu, Complex z);

/// Boundary-limit estimate: extrapolated value plus the full trace along the
/// eps schedule so callers can assert convergence behaviour.
struct LimitEstimate {
    Complex limit{0.0, 0.0};
    bool converged = false;
    double residual = 0.0; // disagreement of the last two extrapolation stages
    std::vector<std::pair<double, Complex>> trace; // (eps, value)
};

/// sum_i w_i / (E_i - z), summed in ascending |E_i - z|. Requires Im z > 0 or
/// z real away from every atom; evaluation at an atom raises PoleError.
Complex borel_transform(const DiscreteMeasure& mu, Complex z);

/// Iterated Richardson extrapolation of the last `use_last` values of a
/// sequence sampled on a geometric schedule with the given ratio.
Complex richardson_extrapolate(const std::vector<Complex>& values, double factor,
                               int use_last = 5);

/// lim_{eps->0} M_nu(E + i eps) / M_sigma(E + i eps) along the schedule. At an
/// atom of sigma the limit is the weight ratio. Requires every nu atom to sit
/// on a sigma atom. Non-convergence is reported in the estimate, not thrown.
LimitEstimate poltoratskii_ratio(const DiscreteMeasure& nu, const DiscreteMeasure& sigma,
                                 double E, const EpsSchedule& sched);

/// Weyl m-function of the outward half-line starting at `boundary`: the
/// (boundary, boundary) resolvent entry of the restriction of the model's
/// operator to [boundary, +inf) (direction plus) or (-inf, boundary]
/// (direction minus), evaluated by continued fraction. The recursion is
/// truncated `depth` levels out and seeded with the tail rule's fixed point,
/// which makes it exact once the seed lies beyond the coefficient window.
Complex outward_m(const CoefficientModel& model, long boundary, Side direction,
                  Complex z, long depth);

/// m-function of the boundary-modified half-line operator: continued fraction
/// m = 1/(b_1 - tan(theta) - z - a_1^2 (next level)) on the plus side, the
/// cot(theta) analogue at index 0 on the minus side. Evaluated at `depth` and
/// 2 * depth; disagreement beyond `tol` raises ConvergenceError carrying both.
Complex half_line_m(const CoefficientModel& model, Side side, BoundaryAngle theta,
                    Complex z, long depth, double tol = 1e-9);

/// Alternative route to half_line_m: boundary resolvent entry of the
/// depth-sized half-line truncation.
Complex half_line_m_matrix(const CoefficientModel& model, Side side, BoundaryAngle theta,
                           Complex z, long n);

/// m_theta = m0 / (1 - tan(theta) m0). Requires theta != pi/2 and a
/// non-vanishing denominator.
Complex perturbation_formula(Complex m0, BoundaryAngle theta);

/// <delta_k, (T - z)^{-1} delta_j> for a truncation, solved directly; exact
/// for the finite operator (equals the Borel transform of its joint measure).
Complex truncation_resolvent_entry(const TruncatedOperator& op, long k, long j, Complex z);

/// <delta_k, (J_{[-n,n]} - z)^{-1} delta_j> with a consistency check against
/// the enlarged truncation [-n-d, n+d]; raises ConvergenceError when the two
/// differ by more than `tol` (truncation-sensitive z).
Complex whole_line_resolvent_entry(const CoefficientModel& model, long k, long j,
                                   Complex z, long n, double tol = 1e-9);

namespace detail {
/// Tridiagonal solve with partial pivoting (LAPACK gtsv style). Bands may
/// contain zeros; throws ConditioningError on a numerically singular pivot.
std::vector<Complex> tridiag_solve(std::vector<Complex> diag, std::vector<Complex> lower,
                                   std::vector<Complex> upper, std::vector<Complex> rhs);
} // namespace detail

} // namespace jspec
