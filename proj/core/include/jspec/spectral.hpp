#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jspec/herglotz.hpp"
#include "jspec/operators.hpp"

namespace jspec {

/// Full eigendecomposition of a truncation: ascending energies, orthonormal
/// eigenvector columns with the first nonzero entry positive, plus a copy of
/// the dense matrix it was computed from.
struct EigenSystem {
    IndexWindow window;
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
    Eigen::MatrixXd matrix;

    int size() const { return static_cast<int>(energies.size()); }
    double operator_norm() const;
    /// Entry of eigenvector `atom` at lattice index n.
    double component(int atom, long n) const { return vectors(window.pos(n), atom); }
};

/// Dense symmetric eigensolve with a residual check at 1e-10 * ||J||.
EigenSystem eigendecompose(const TruncatedOperator& op);
EigenSystem eigendecompose_matrix(const Eigen::MatrixXd& m, IndexWindow window);

/// mu({E_atom}) for mu = mu_{delta_0} + mu_{delta_1}: psi(0)^2 + psi(1)^2.
double mu_mass(const EigenSystem& sys, int atom);

/// Scalar spectral measure of psi: atoms (E_i, |<psi_i, psi>|^2), numerically
/// equal energies merged at tolerance 1e-9 * ||J||.
DiscreteMeasure spectral_measure(const EigenSystem& sys, const Eigen::VectorXd& psi);

/// Signed joint spectral measure of delta_k and delta_j.
DiscreteMeasure joint_measure(const EigenSystem& sys, long k, long j);

/// mu = mu_00 + mu_11, the canonical measure of the cyclic pair {delta_0, delta_1}.
DiscreteMeasure delta_pair_measure(const EigenSystem& sys);

enum class RnMode { interval_ratio, borel_ratio };

/// Radon-Nikodym derivative d(nu)/d(mu) at E, estimated either by interval
/// mass ratios nu(I_eps)/mu(I_eps) or by the Borel-transform boundary ratio.
/// Raises UndefinedPointError when mu charges no scheduled interval around E.
LimitEstimate rn_derivative(const DiscreteMeasure& nu, const DiscreteMeasure& mu, double E,
                            RnMode mode, const EpsSchedule& sched);

/// Regularized weight w(n) = max(n^2, 1). Bare multiplication by n would
/// annihilate delta_0; the floor at 1 keeps the inverse bounded while
/// preserving the summability sum 1/w < infinity the trace bound needs.
struct WeightOperator {
    double operator()(long n) const {
        const double x = static_cast<double>(n);
        return x * x >= 1.0 ? x * x : 1.0;
    }
};

/// P(B) = sum of eigenprojectors over the selected atoms.
Eigen::MatrixXd spectral_projector(const EigenSystem& sys, const std::vector<int>& atoms);

/// The trace-bounded nonnegative operator A^{-1} P(B) A^{-1} with
/// A = diag(sqrt(w(n))); its trace is sum_{i in B} sum_n psi_i(n)^2 / w(n).
Eigen::MatrixXd novm_theta(const EigenSystem& sys, const WeightOperator& w,
                           const std::vector<int>& atoms);

/// sum_{n in window} 1 / w(n), the bound tr Theta(B) must respect.
double novm_trace_bound(const IndexWindow& window, const WeightOperator& w);

/// J P(A): on a pure-point model with A the set of all atoms this is the
/// singular part of J itself.
Eigen::MatrixXd singular_projection_composition(const EigenSystem& sys,
                                                const std::vector<int>& atoms);

/// Convenience: indices {0, 1, ..., size-1}.
std::vector<int> all_atoms(const EigenSystem& sys);

} // namespace jspec
