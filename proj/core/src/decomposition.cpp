#include "jspec/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jspec/errors.hpp"

namespace jspec {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kAngleTol = 1e-9;
} // namespace

BoundaryAngle theta_of_energy(const SubordinateAmplitude& u) {
    const double u0 = u.at(0);
    const double u1 = u.at(1);
    if (std::abs(u0 * u0 + u1 * u1 - 1.0) > 1e-10) {
        throw ValidationError("theta_of_energy requires a unit boundary pair");
    }
    double theta = std::atan2(-u0, u1);
    if (theta < 0.0) theta += kPi;
    // angles are line directions: the wrap at pi is identified with 0
    if (theta >= kPi - kAngleTol) theta = 0.0;
    return BoundaryAngle(theta);
}

AngleSet AngleSet::interval(double lo, double hi) {
    if (!(lo <= hi)) throw ValidationError("angle interval requires lo <= hi");
    AngleSet s;
    if (lo < hi) s.intervals_.emplace_back(lo, hi);
    return s;
}

AngleSet AngleSet::singleton(double theta) {
    AngleSet s;
    s.singletons_.push_back(theta);
    return s;
}

AngleSet AngleSet::full() { return interval(0.0, kPi); }

AngleSet AngleSet::unite(const AngleSet& other) const {
    AngleSet s = *this;
    s.intervals_.insert(s.intervals_.end(), other.intervals_.begin(), other.intervals_.end());
    s.singletons_.insert(s.singletons_.end(), other.singletons_.begin(),
                         other.singletons_.end());
    return s;
}

AngleSet AngleSet::intersect(const AngleSet& other) const {
    AngleSet s;
    for (const auto& [lo1, hi1] : intervals_) {
        for (const auto& [lo2, hi2] : other.intervals_) {
            const double lo = std::max(lo1, lo2);
            const double hi = std::min(hi1, hi2);
            if (lo < hi) s.intervals_.emplace_back(lo, hi);
        }
    }
    for (double t : singletons_) {
        if (other.contains(t)) s.singletons_.push_back(t);
    }
    for (double t : other.singletons_) {
        if (contains(t)) s.singletons_.push_back(t);
    }
    return s;
}

bool AngleSet::contains(double theta) const {
    for (const auto& [lo, hi] : intervals_) {
        if (theta >= lo && theta < hi) return true;
    }
    for (double t : singletons_) {
        if (std::abs(theta - t) <= kSingletonTol) return true;
    }
    return false;
}

QMeasure::QMeasure(EigenSystem sys, std::vector<AngleAtom> atoms, std::vector<int> excluded)
    : sys_(std::move(sys)), atoms_(std::move(atoms)), excluded_(std::move(excluded)) {}

Eigen::MatrixXd QMeasure::projector(const AngleSet& set) const {
    std::vector<int> selected;
    for (const auto& a : atoms_) {
        if (set.contains(a.theta)) {
            selected.insert(selected.end(), a.atom_indices.begin(), a.atom_indices.end());
        }
    }
    return spectral_projector(sys_, selected);
}

Eigen::VectorXd QMeasure::apply(const AngleSet& set, const Eigen::VectorXd& psi) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(psi.size());
    for (const auto& a : atoms_) {
        if (!set.contains(a.theta)) continue;
        for (int i : a.atom_indices) {
            out.noalias() += sys_.vectors.col(i).dot(psi) * sys_.vectors.col(i);
        }
    }
    return out;
}

double QMeasure::min_angle_gap() const {
    double gap = kPi;
    for (size_t i = 0; i + 1 < atoms_.size(); ++i) {
        gap = std::min(gap, atoms_[i + 1].theta - atoms_[i].theta);
    }
    return gap;
}

QMeasure build_q(const EigenSystem& sys) {
    std::vector<std::pair<double, int>> tagged;
    std::vector<int> excluded;
    for (int i = 0; i < sys.size(); ++i) {
        try {
            tagged.emplace_back(theta_of_energy(subordinate_amplitude(sys, i)).theta(), i);
        } catch (const DegeneracyError&) {
            excluded.push_back(i);
        }
    }
    std::sort(tagged.begin(), tagged.end());

    std::vector<AngleAtom> atoms;
    size_t i = 0;
    while (i < tagged.size()) {
        size_t j = i + 1;
        double sum = tagged[i].first;
        while (j < tagged.size() && tagged[j].first - tagged[j - 1].first <= kAngleTol) {
            sum += tagged[j].first;
            ++j;
        }
        AngleAtom a;
        a.theta = sum / static_cast<double>(j - i);
        if (std::abs(a.theta) <= kAngleTol) a.theta = 0.0;
        if (std::abs(a.theta - kHalfPi) <= kAngleTol) a.theta = kHalfPi;
        for (size_t k = i; k < j; ++k) a.atom_indices.push_back(tagged[k].second);
        atoms.push_back(std::move(a));
        i = j;
    }
    return QMeasure(sys, std::move(atoms), std::move(excluded));
}

FunctionSpec FunctionSpec::power(int n) {
    if (n < 1) throw ValidationError("power function requires n >= 1");
    FunctionSpec f;
    f.kind = Kind::power;
    f.n = n;
    return f;
}

FunctionSpec FunctionSpec::unitary(double t) {
    FunctionSpec f;
    f.kind = Kind::unitary;
    f.t = t;
    return f;
}

FunctionSpec FunctionSpec::resolvent(Complex z) {
    if (!(z.imag() > 0.0)) throw ValidationError("resolvent function requires Im z > 0");
    FunctionSpec f;
    f.kind = Kind::resolvent;
    f.z = z;
    return f;
}

Complex FunctionSpec::eval(double x) const {
    switch (kind) {
        case Kind::power: {
            double r = 1.0;
            for (int k = 0; k < n; ++k) r *= x;
            return Complex{r, 0.0};
        }
        case Kind::unitary:
            return std::exp(Complex{0.0, t * x});
        case Kind::resolvent:
            return 1.0 / (Complex{x, 0.0} - z);
    }
    return {};
}

std::string FunctionSpec::label() const {
    switch (kind) {
        case Kind::power:
            return "x^" + std::to_string(n);
        case Kind::unitary:
            return "exp(i*" + std::to_string(t) + "*x)";
        case Kind::resolvent:
            return "(x-(" + std::to_string(z.real()) + "+" + std::to_string(z.imag()) +
                   "i))^-1";
    }
    return {};
}

namespace {

Eigen::MatrixXcd function_from_eigensystem(const Eigen::VectorXd& energies,
                                           const Eigen::MatrixXd& vectors,
                                           const Eigen::MatrixXd& matrix,
                                           const FunctionSpec& F) {
    const Eigen::Index n = energies.size();
    Eigen::VectorXcd fe(n);
    for (Eigen::Index i = 0; i < n; ++i) fe(i) = F.eval(energies(i));
    Eigen::MatrixXcd out =
        vectors.cast<Complex>() * fe.asDiagonal() * vectors.transpose().cast<Complex>();
    if (F.kind == FunctionSpec::Kind::resolvent) {
        // cross-check against a direct linear solve on a probe vector
        Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(n);
        probe(n / 2) = 1.0;
        Eigen::MatrixXcd shifted = matrix.cast<Complex>();
        shifted.diagonal().array() -= F.z;
        const Eigen::VectorXcd direct = shifted.partialPivLu().solve(probe);
        const double err = (out * probe - direct).norm();
        if (err > 1e-8 * (1.0 + direct.norm())) {
            throw DegeneracyError("resolvent functional calculus disagrees with direct solve");
        }
    }
    return out;
}

} // namespace

Eigen::MatrixXcd apply_function(const EigenSystem& sys, const FunctionSpec& F) {
    return function_from_eigensystem(sys.energies, sys.vectors, sys.matrix, F);
}

Eigen::MatrixXcd apply_function_matrix(const Eigen::MatrixXd& m, IndexWindow window,
                                       const FunctionSpec& F) {
    const EigenSystem sys = eigendecompose_matrix(m, window);
    return function_from_eigensystem(sys.energies, sys.vectors, sys.matrix, F);
}

Eigen::MatrixXcd apply_function(const TruncatedOperator& op, const FunctionSpec& F) {
    return apply_function_matrix(op.dense(), op.window(), F);
}

DefectReport splitting_defect(const CoefficientModel& model, const EigenSystem& sys,
                              const FunctionSpec& F, double alpha, double beta,
                              const Eigen::VectorXd& psi) {
    const bool lower_branch = alpha > 0.0 && beta < kHalfPi;
    const bool upper_branch = alpha > kHalfPi && beta < kPi;
    if (!(alpha < beta) || (!lower_branch && !upper_branch)) {
        throw ValidationError(
            "splitting_defect requires 0 < alpha < beta < pi/2 or pi/2 < alpha < beta < pi");
    }
    const QMeasure q = build_q(sys);
    const AngleSet band = AngleSet::interval(alpha, beta);
    const Eigen::VectorXd q_psi = q.apply(band, psi);

    DefectReport report;
    report.function = F.label();
    report.alpha = alpha;
    report.beta = beta;
    report.q_psi_norm = q_psi.norm();
    report.rhs_base = (beta - alpha) * report.q_psi_norm;
    report.vacuous = report.q_psi_norm == 0.0;

    const Eigen::MatrixXcd f_j = apply_function(sys, F);
    const Eigen::VectorXcd f_j_q_psi = f_j * q_psi.cast<Complex>();

    const double thetas[3] = {alpha, 0.5 * (alpha + beta), std::nextafter(beta, alpha)};
    for (double theta : thetas) {
        const Eigen::MatrixXd j_theta =
            direct_sum_matrix(model, BoundaryAngle(theta), sys.window);
        const Eigen::MatrixXcd f_j_theta = apply_function_matrix(j_theta, sys.window, F);
        const double lhs = (f_j_theta * q_psi.cast<Complex>() - f_j_q_psi).norm();
        const double ratio = report.vacuous ? 0.0 : lhs / report.rhs_base;
        report.samples.push_back({theta, lhs, ratio});
        report.empirical_gamma = std::max(report.empirical_gamma, ratio);
    }
    return report;
}

double Partition::mesh() const {
    double m = 0.0;
    for (size_t j = 0; j + 1 < points.size(); ++j) m = std::max(m, points[j + 1] - points[j]);
    return m;
}

void Partition::validate() const {
    if (points.size() < 2 || tags.size() + 1 != points.size()) {
        throw ValidationError("partition needs m+1 points and m tags");
    }
    for (size_t j = 0; j + 1 < points.size(); ++j) {
        if (!(points[j] <= points[j + 1])) {
            throw ValidationError("partition points must be non-decreasing");
        }
        if (tags[j] < points[j] || tags[j] >= points[j + 1]) {
            throw ValidationError("partition tag outside its cell");
        }
    }
}

Partition uniform_partition(const QMeasure& q, double a, double b, int cells) {
    if (!(a < b) || cells < 1) throw ValidationError("uniform_partition: bad interval");
    Partition part;
    part.points.resize(cells + 1);
    for (int j = 0; j <= cells; ++j) {
        part.points[j] = a + (b - a) * static_cast<double>(j) / cells;
    }
    part.tags.resize(cells);
    for (int j = 0; j < cells; ++j) {
        const double lo = part.points[j];
        const double hi = part.points[j + 1];
        std::vector<double> inside;
        for (const auto& atom : q.atoms()) {
            if (atom.theta >= lo && atom.theta < hi) inside.push_back(atom.theta);
        }
        part.tags[j] = inside.size() == 1 ? inside.front() : 0.5 * (lo + hi);
    }
    return part;
}

Eigen::MatrixXcd rs_integral(const CoefficientModel& model, const QMeasure& q,
                             const FunctionSpec& F, const Partition& partition) {
    partition.validate();
    const auto& sys = q.sys();
    const long n = sys.window.size();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(n, n);
    for (size_t j = 0; j + 1 < partition.points.size(); ++j) {
        const AngleSet cell = AngleSet::interval(partition.points[j], partition.points[j + 1]);
        const Eigen::MatrixXd proj = q.projector(cell);
        if (proj.isZero(0.0)) continue; // empty cells contribute exactly zero
        const Eigen::MatrixXd j_theta =
            direct_sum_matrix(model, BoundaryAngle(partition.tags[j]), sys.window);
        sum.noalias() +=
            apply_function_matrix(j_theta, sys.window, F) * proj.cast<Complex>();
    }
    return sum;
}

double rs_defect(const CoefficientModel& model, const QMeasure& q, const FunctionSpec& F,
                 const Partition& partition) {
    const Eigen::MatrixXcd rs = rs_integral(model, q, F, partition);
    const AngleSet range =
        AngleSet::interval(partition.points.front(), partition.points.back());
    const Eigen::MatrixXcd target =
        apply_function(q.sys(), F) * q.projector(range).cast<Complex>();
    return (rs - target).norm();
}

} // namespace jspec
