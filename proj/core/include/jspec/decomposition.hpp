#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jspec/expansion.hpp"
#include "jspec/spectral.hpp"

namespace jspec {

/// The unique theta in [0, pi) with u(0) cos(theta) + u(1) sin(theta) = 0,
/// computed as the angle of the vector (u(1), -u(0)) folded into [0, pi).
BoundaryAngle theta_of_energy(const SubordinateAmplitude& u);

/// One point of the boundary-angle support: a representative angle and the
/// eigensystem atoms whose subordinate amplitudes share it (within 1e-9 rad).
struct AngleAtom {
    double theta = 0.0;
    std::vector<int> atom_indices;
};

/// Finite union of half-open angle intervals [lo, hi) plus singletons.
/// Membership of a singleton is decided at the angle-grouping tolerance.
class AngleSet {
public:
    static AngleSet interval(double lo, double hi);
    static AngleSet singleton(double theta);
    static AngleSet full(); // [0, pi)

    AngleSet unite(const AngleSet& other) const;
    AngleSet intersect(const AngleSet& other) const;
    bool contains(double theta) const;

    static constexpr double kSingletonTol = 1e-9;

private:
    std::vector<std::pair<double, double>> intervals_;
    std::vector<double> singletons_;
};

/// Spectral resolution over boundary angles: eigensystem atoms grouped by
/// the angle of their boundary pair. Q(B) is the spectral projector onto the
/// atoms whose angle lies in B; it is a PVM on [0, pi) commuting with J.
class QMeasure {
public:
    QMeasure(EigenSystem sys, std::vector<AngleAtom> atoms, std::vector<int> excluded);

    const EigenSystem& sys() const { return sys_; }
    const std::vector<AngleAtom>& atoms() const { return atoms_; }
    /// Atoms rejected by the boundary-pair degeneracy signal (reported, never
    /// silently dropped).
    const std::vector<int>& excluded() const { return excluded_; }

    Eigen::MatrixXd projector(const AngleSet& set) const;
    Eigen::VectorXd apply(const AngleSet& set, const Eigen::VectorXd& psi) const;

    /// Smallest gap between consecutive representative angles.
    double min_angle_gap() const;

private:
    EigenSystem sys_;
    std::vector<AngleAtom> atoms_;
    std::vector<int> excluded_;
};

/// Groups the eigensystem's subordinate amplitudes by boundary angle
/// (tolerance 1e-9 rad); group representatives within that tolerance of the
/// special angles 0 and pi/2 snap to them exactly.
QMeasure build_q(const EigenSystem& sys);

/// The function families the splitting theorem covers: powers x^n, the
/// unitary group e^{itx}, and resolvents (x - z)^{-1} with Im z > 0.
struct FunctionSpec {
    enum class Kind { power, unitary, resolvent };
    Kind kind = Kind::power;
    int n = 1;
    double t = 0.0;
    Complex z{0.0, 1.0};

    static FunctionSpec power(int n);
    static FunctionSpec unitary(double t);
    static FunctionSpec resolvent(Complex z);

    Complex eval(double x) const;
    std::string label() const;
};

/// F applied through the spectral theorem: eigenvalues mapped through F. The
/// resolvent path is cross-checked against a direct linear solve.
Eigen::MatrixXcd apply_function(const TruncatedOperator& op, const FunctionSpec& F);
Eigen::MatrixXcd apply_function(const EigenSystem& sys, const FunctionSpec& F);
Eigen::MatrixXcd apply_function_matrix(const Eigen::MatrixXd& m, IndexWindow window,
                                       const FunctionSpec& F);

struct ThetaSample {
    double theta;
    double lhs; // ||F(J_theta) Q([a,b)) psi - F(J) Q([a,b)) psi||
    double ratio;
};

struct DefectReport {
    std::string function;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<ThetaSample> samples; // theta in {alpha, midpoint, beta^-}
    double q_psi_norm = 0.0;
    double rhs_base = 0.0;       // |beta - alpha| * ||Q([alpha,beta)) psi||
    double empirical_gamma = 0.0; // max ratio over the samples
    bool vacuous = false;        // Q([alpha,beta)) psi = 0
};

/// Measures the splitting inequality on a truncation: the inequality bounds
/// lhs by gamma * |beta - alpha| * ||Q psi|| for some gamma; the report gives
/// the observed ratios, never a theoretical gamma.
DefectReport splitting_defect(const CoefficientModel& model, const EigenSystem& sys,
                              const FunctionSpec& F, double alpha, double beta,
                              const Eigen::VectorXd& psi);

/// Partition x_0 <= ... <= x_m of an angle interval with tags t_j in
/// [x_{j-1}, x_j); mesh = max cell width.
struct Partition {
    std::vector<double> points;
    std::vector<double> tags;

    double mesh() const;
    void validate() const;
};

/// Uniform partition of [a, b) into `cells` cells. A cell containing exactly
/// one angle atom gets its tag snapped to that atom's angle, otherwise the
/// midpoint is used.
Partition uniform_partition(const QMeasure& q, double a, double b, int cells);

/// Riemann-Stieltjes sum  sum_j F(J_{t_j}) Q([x_{j-1}, x_j)).
Eigen::MatrixXcd rs_integral(const CoefficientModel& model, const QMeasure& q,
                             const FunctionSpec& F, const Partition& partition);

/// Frobenius norm of RS - F(J) Q([x_0, x_m)).
double rs_defect(const CoefficientModel& model, const QMeasure& q, const FunctionSpec& F,
                 const Partition& partition);

} // namespace jspec
