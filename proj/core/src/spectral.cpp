#include "jspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jspec/errors.hpp"

namespace jspec {

double EigenSystem::operator_norm() const {
    if (energies.size() == 0) return 0.0;
    return std::max(std::abs(energies(0)), std::abs(energies(energies.size() - 1)));
}

EigenSystem eigendecompose_matrix(const Eigen::MatrixXd& m, IndexWindow window) {
    if (m.rows() != m.cols() || m.rows() != window.size()) {
        throw ValidationError("eigendecompose: matrix does not match window");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    if (solver.info() != Eigen::Success) {
        throw DegeneracyError("symmetric eigensolve failed");
    }
    EigenSystem sys;
    sys.window = window;
    sys.energies = solver.eigenvalues();
    sys.vectors = solver.eigenvectors();
    sys.matrix = m;

    // sign convention: first entry of magnitude above 1e-12 made positive
    for (int i = 0; i < sys.size(); ++i) {
        for (long p = 0; p < window.size(); ++p) {
            const double v = sys.vectors(p, i);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) sys.vectors.col(i) *= -1.0;
                break;
            }
        }
    }

    const double scale = std::max(1.0, sys.operator_norm());
    for (int i = 0; i < sys.size(); ++i) {
        const double resid =
            (m * sys.vectors.col(i) - sys.energies(i) * sys.vectors.col(i)).norm();
        if (resid > 1e-10 * scale) {
            throw DegeneracyError("eigensolve residual above 1e-10 * ||J||");
        }
    }
    return sys;
}

EigenSystem eigendecompose(const TruncatedOperator& op) {
    return eigendecompose_matrix(op.dense(), op.window());
}

double mu_mass(const EigenSystem& sys, int atom) {
    if (!sys.window.contains(0) || !sys.window.contains(1)) {
        throw ValidationError("mu_mass needs the 0-1 boundary pair inside the window");
    }
    return sys.component(atom, 0) * sys.component(atom, 0) +
           sys.component(atom, 1) * sys.component(atom, 1);
}

namespace {

// Groups numerically equal energies (gap below 1e-9 * ||J||) and sums the
// per-atom weights within each group.
DiscreteMeasure merged_measure(const EigenSystem& sys, const std::vector<double>& weights,
                               bool positive_flag) {
    const double tol = 1e-9 * std::max(1.0, sys.operator_norm());
    std::vector<std::pair<double, double>> atoms;
    int i = 0;
    const int n = sys.size();
    while (i < n) {
        int j = i + 1;
        double esum = sys.energies(i), wsum = weights[i];
        while (j < n && sys.energies(j) - sys.energies(j - 1) <= tol) {
            esum += sys.energies(j);
            wsum += weights[j];
            ++j;
        }
        atoms.emplace_back(esum / (j - i), wsum);
        i = j;
    }
    return DiscreteMeasure::make(std::move(atoms), positive_flag);
}

} // namespace

DiscreteMeasure spectral_measure(const EigenSystem& sys, const Eigen::VectorXd& psi) {
    if (psi.size() != sys.window.size()) {
        throw ValidationError("spectral_measure: psi does not match window");
    }
    std::vector<double> w(sys.size());
    for (int i = 0; i < sys.size(); ++i) {
        const double c = sys.vectors.col(i).dot(psi);
        w[i] = c * c;
    }
    return merged_measure(sys, w, true);
}

DiscreteMeasure joint_measure(const EigenSystem& sys, long k, long j) {
    if (!sys.window.contains(k) || !sys.window.contains(j)) {
        throw ValidationError("joint_measure: indices outside window");
    }
    std::vector<double> w(sys.size());
    for (int i = 0; i < sys.size(); ++i) {
        w[i] = sys.component(i, k) * sys.component(i, j);
    }
    return merged_measure(sys, w, k == j);
}

DiscreteMeasure delta_pair_measure(const EigenSystem& sys) {
    std::vector<double> w(sys.size());
    for (int i = 0; i < sys.size(); ++i) w[i] = mu_mass(sys, i);
    return merged_measure(sys, w, true);
}

LimitEstimate rn_derivative(const DiscreteMeasure& nu, const DiscreteMeasure& mu, double E,
                            RnMode mode, const EpsSchedule& sched) {
    if (mode == RnMode::borel_ratio) {
        // the Borel route needs mu mass near E as well
        bool any = false;
        for (int k = 0; k < sched.count; ++k) {
            if (mu.interval_mass(E, sched.eps(k)) != 0.0) any = true;
        }
        if (!any) throw UndefinedPointError("mu carries no mass near E");
        return poltoratskii_ratio(nu, mu, E, sched);
    }
    LimitEstimate est;
    bool any = false;
    for (int k = 0; k < sched.count; ++k) {
        const double eps = sched.eps(k);
        const double m = mu.interval_mass(E, eps);
        if (m == 0.0) continue;
        any = true;
        const double r = nu.interval_mass(E, eps) / m;
        est.trace.emplace_back(eps, Complex{r, 0.0});
    }
    if (!any) throw UndefinedPointError("mu carries no mass on any scheduled interval");
    est.limit = est.trace.back().second;
    if (est.trace.size() >= 2) {
        est.residual = std::abs(est.trace[est.trace.size() - 2].second - est.limit);
        est.converged = est.residual <= 1e-12 * (1.0 + std::abs(est.limit));
    } else {
        est.converged = false;
        est.residual = std::abs(est.limit);
    }
    return est;
}

Eigen::MatrixXd spectral_projector(const EigenSystem& sys, const std::vector<int>& atoms) {
    const long n = sys.window.size();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i : atoms) {
        if (i < 0 || i >= sys.size()) throw ValidationError("atom index out of range");
        p.noalias() += sys.vectors.col(i) * sys.vectors.col(i).transpose();
    }
    return p;
}

Eigen::MatrixXd novm_theta(const EigenSystem& sys, const WeightOperator& w,
                           const std::vector<int>& atoms) {
    const long n = sys.window.size();
    Eigen::VectorXd inv_sqrt_w(n);
    for (long p = 0; p < n; ++p) {
        inv_sqrt_w(p) = 1.0 / std::sqrt(w(sys.window.index_at(p)));
    }
    const Eigen::MatrixXd proj = spectral_projector(sys, atoms);
    return inv_sqrt_w.asDiagonal() * proj * inv_sqrt_w.asDiagonal();
}

double novm_trace_bound(const IndexWindow& window, const WeightOperator& w) {
    double s = 0.0;
    for (long n = window.lo; n <= window.hi; ++n) s += 1.0 / w(n);
    return s;
}

Eigen::MatrixXd singular_projection_composition(const EigenSystem& sys,
                                                const std::vector<int>& atoms) {
    return sys.matrix * spectral_projector(sys, atoms);
}

std::vector<int> all_atoms(const EigenSystem& sys) {
    std::vector<int> v(sys.size());
    std::iota(v.begin(), v.end(), 0);
    return v;
}

} // namespace jspec
