#include "jspec/expansion.hpp"

#include <cmath>

#include "jspec/errors.hpp"

namespace jspec {

SubordinateAmplitude subordinate_amplitude(const EigenSystem& sys, int atom) {
    if (atom < 0 || atom >= sys.size()) throw ValidationError("atom index out of range");
    const double mass = mu_mass(sys, atom);
    if (mass <= 1e-14) {
        throw DegeneracyError("boundary pair vanishes: atom carries no mu-mass");
    }
    SubordinateAmplitude u;
    u.energy = sys.energies(atom);
    u.window = sys.window;
    u.norm01 = mass;
    u.values = sys.vectors.col(atom) / std::sqrt(mass);
    const double u1 = u.values(sys.window.pos(1));
    const double u0 = u.values(sys.window.pos(0));
    if (u1 < 0.0 || (u1 == 0.0 && u0 < 0.0)) u.values *= -1.0;
    return u;
}

GammaMatrix gamma_estimate(const EigenSystem& sys, double E, long halfwidth,
                           const EpsSchedule& sched) {
    if (halfwidth < 1) throw ValidationError("gamma_estimate requires halfwidth >= 1");
    const IndexWindow gw{-halfwidth, halfwidth};
    if (!sys.window.contains(gw.lo) || !sys.window.contains(gw.hi)) {
        throw ValidationError("gamma window exceeds the eigensystem window");
    }
    const DiscreteMeasure mu = delta_pair_measure(sys);
    // accept E within the atom-merging tolerance
    const double tol = 1e-9 * std::max(1.0, sys.operator_norm());
    std::optional<size_t> atom;
    for (size_t i = 0; i < mu.size(); ++i) {
        if (std::abs(mu.positions[i] - E) <= tol) {
            atom = i;
            break;
        }
    }
    if (!atom.has_value()) {
        throw ValidationError("gamma_estimate: E is not an atom of mu");
    }
    const double E0 = mu.positions[*atom];

    const long m = gw.size();
    GammaMatrix g;
    g.energy = E0;
    g.window = gw;
    g.entries = Eigen::MatrixXd::Zero(m, m);

    std::vector<Complex> mu_values(sched.count);
    for (int t = 0; t < sched.count; ++t) {
        mu_values[t] = borel_transform(mu, Complex{E0, sched.eps(t)});
    }

    std::vector<Complex> ratios(sched.count);
    for (long pk = 0; pk < m; ++pk) {
        for (long pj = 0; pj < m; ++pj) {
            const DiscreteMeasure nu = joint_measure(sys, gw.index_at(pk), gw.index_at(pj));
            for (int t = 0; t < sched.count; ++t) {
                ratios[t] = borel_transform(nu, Complex{E0, sched.eps(t)}) / mu_values[t];
            }
            const Complex lim = richardson_extrapolate(ratios, sched.factor, 5);
            const Complex shorter = richardson_extrapolate(ratios, sched.factor, 4);
            g.entries(pk, pj) = lim.real();
            g.max_imag = std::max(g.max_imag, std::abs(lim.imag()));
            g.max_residual = std::max(g.max_residual, std::abs(lim - shorter));
        }
    }
    g.converged = g.max_imag <= 1e-6 && g.max_residual <= 1e-6;
    return g;
}

Eigen::VectorXd reconstruct_singular(const EigenSystem& sys, const std::vector<int>& atoms,
                                     const Eigen::VectorXd& psi,
                                     std::vector<int>* excluded) {
    if (psi.size() != sys.window.size()) {
        throw ValidationError("reconstruct_singular: psi does not match window");
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(psi.size());
    for (int i : atoms) {
        SubordinateAmplitude u;
        try {
            u = subordinate_amplitude(sys, i);
        } catch (const DegeneracyError&) {
            if (excluded) excluded->push_back(i);
            continue;
        }
        const double coeff = u.values.dot(psi) * u.norm01;
        out.noalias() += coeff * u.values;
    }
    return out;
}

double weighted_norm(const Eigen::VectorXd& psi, const IndexWindow& window,
                     const WeightOperator& w, WeightSign sign) {
    if (psi.size() != window.size()) {
        throw ValidationError("weighted_norm: psi does not match window");
    }
    double s = 0.0;
    for (long p = 0; p < window.size(); ++p) {
        const double wn = w(window.index_at(p));
        const double v = psi(p) * psi(p);
        s += sign == WeightSign::plus ? v / wn : v * wn;
    }
    return std::sqrt(s);
}

double phi_operator_norm(const SubordinateAmplitude& u, const WeightOperator& w) {
    double s = 0.0;
    for (long p = 0; p < u.window.size(); ++p) {
        s += u.values(p) * u.values(p) / w(u.window.index_at(p));
    }
    return s;
}

} // namespace jspec
