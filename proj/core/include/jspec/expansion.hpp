#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jspec/spectral.hpp"

namespace jspec {

/// Eigenvector renormalized to unit boundary pair, |u(0)|^2 + |u(1)|^2 = 1,
/// with sign fixed by u(1) >= 0 (ties broken by u(0) > 0). This is the
/// per-atom subordinate amplitude of the pure-point expansion.
struct SubordinateAmplitude {
    double energy = 0.0;
    IndexWindow window;
    Eigen::VectorXd values;
    double norm01 = 0.0; // mu({E}) = psi(0)^2 + psi(1)^2 of the raw eigenvector

    double at(long n) const { return values(window.pos(n)); }
};

/// Raises DegeneracyError when the boundary pair carries no mass
/// (psi(0)^2 + psi(1)^2 <= 1e-14): such an atom is invisible to mu.
SubordinateAmplitude subordinate_amplitude(const EigenSystem& sys, int atom);

/// Boundary-ratio estimate of the rank-one kernel at an atom E: entries
/// alpha_kj = lim M_kj(E + i eps) / M(E + i eps) for k, j in [-halfwidth,
/// halfwidth], M = M_00 + M_11, extrapolated along the schedule.
struct GammaMatrix {
    double energy = 0.0;
    IndexWindow window;
    Eigen::MatrixXd entries;
    bool converged = false;
    double max_imag = 0.0;     // largest imaginary residue after extrapolation
    double max_residual = 0.0; // largest extrapolation-stage disagreement
};

GammaMatrix gamma_estimate(const EigenSystem& sys, double E, long halfwidth,
                           const EpsSchedule& sched);

/// Singular-part expansion restricted to a set of atoms:
/// sum_{E in B} <u_E, psi> u_E mu({E}). Atoms rejected by the degeneracy
/// signal contribute zero and are reported through `excluded`.
Eigen::VectorXd reconstruct_singular(const EigenSystem& sys, const std::vector<int>& atoms,
                                     const Eigen::VectorXd& psi,
                                     std::vector<int>* excluded = nullptr);

enum class WeightSign { plus, minus };

/// Weighted sequence-space norm: sqrt(sum |psi(n)|^2 * w(n)^{-1}) for the
/// plus space and sqrt(sum |psi(n)|^2 * w(n)) for the minus space.
double weighted_norm(const Eigen::VectorXd& psi, const IndexWindow& window,
                     const WeightOperator& w, WeightSign sign);

/// Operator norm of the rank-one kernel Phi(E) = <u_E, .> u_E as a map from
/// the w-weighted space into its dual: equals sum_n u_E(n)^2 / w(n).
double phi_operator_norm(const SubordinateAmplitude& u, const WeightOperator& w);

} // namespace jspec
