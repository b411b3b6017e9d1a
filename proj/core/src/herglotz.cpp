#include "jspec/herglotz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "jspec/errors.hpp"

namespace jspec {

DiscreteMeasure DiscreteMeasure::make(std::vector<std::pair<double, double>> atoms,
                                      bool positive_flag) {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    DiscreteMeasure mu;
    mu.positive_flag = positive_flag;
    mu.positions.reserve(atoms.size());
    mu.weights.reserve(atoms.size());
    for (const auto& [E, w] : atoms) {
        if (!std::isfinite(E) || !std::isfinite(w)) {
            throw ValidationError("measure atoms must be finite");
        }
        if (!mu.positions.empty() && !(E > mu.positions.back())) {
            throw ValidationError("measure positions must be strictly increasing");
        }
        if (positive_flag && w < 0.0) {
            throw ValidationError("positive measure with negative weight");
        }
        mu.positions.push_back(E);
        mu.weights.push_back(w);
    }
    return mu;
}

double DiscreteMeasure::total_mass() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

std::optional<size_t> DiscreteMeasure::find_atom(double E) const {
    const auto it = std::lower_bound(positions.begin(), positions.end(), E);
    if (it != positions.end() && *it == E) {
        return static_cast<size_t>(it - positions.begin());
    }
    return std::nullopt;
}

double DiscreteMeasure::interval_mass(double E, double eps) const {
    const auto lo = std::upper_bound(positions.begin(), positions.end(), E - eps);
    const auto hi = std::lower_bound(positions.begin(), positions.end(), E + eps);
    double s = 0.0;
    for (auto it = lo; it != hi; ++it) s += weights[static_cast<size_t>(it - positions.begin())];
    return s;
}

nlohmann::json DiscreteMeasure::to_json() const {
    nlohmann::json atoms = nlohmann::json::array();
    for (size_t i = 0; i < positions.size(); ++i) {
        atoms.push_back({{"E", positions[i]}, {"w", weights[i]}});
    }
    return {{"atoms", atoms}, {"positive", positive_flag}};
}

DiscreteMeasure DiscreteMeasure::from_json(const nlohmann::json& j) {
    try {
        std::vector<std::pair<double, double>> atoms;
        for (const auto& a : j.at("atoms")) {
            atoms.emplace_back(a.at("E").get<double>(), a.at("w").get<double>());
        }
        return make(std::move(atoms), j.at("positive").get<bool>());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed measure: ") + e.what());
    }
}

EpsSchedule::EpsSchedule(double start, double f, int n)
    : eps_start(start), factor(f), count(n) {
    if (!(start > 0.0) || !(f > 0.0) || !(f < 1.0) || n < 1) {
        throw ValidationError("eps schedule requires start > 0, factor in (0,1), count >= 1");
    }
}

double EpsSchedule::eps(int k) const { return eps_start * std::pow(factor, k); }

std::vector<double> EpsSchedule::values() const {
    std::vector<double> v(count);
    for (int k = 0; k < count; ++k) v[k] = eps(k);
    return v;
}

Complex borel_transform(const DiscreteMeasure& mu, Complex z) {
    if (z.imag() < 0.0) throw ValidationError("Borel transform requires Im z >= 0");
    if (z.imag() == 0.0 && mu.find_atom(z.real()).has_value()) {
        throw PoleError("Borel transform evaluated at an atom");
    }
    const size_t n = mu.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::vector<double> dist(n);
    for (size_t i = 0; i < n; ++i) dist[i] = std::abs(mu.positions[i] - z);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t i, size_t j) { return dist[i] < dist[j]; });
    Complex sum{0.0, 0.0};
    for (size_t i : order) sum += mu.weights[i] / (mu.positions[i] - z);
    return sum;
}

HerglotzSample sample_borel(const DiscreteMeasure& mu, Complex z) {
    const Complex value = borel_transform(mu, z);
    if (mu.positive_flag && z.imag() > 0.0 && value.imag() <= -1e-14) {
        throw DegeneracyError("Herglotz property violated for a positive measure");
    }
    return HerglotzSample{z, value};
}

Complex richardson_extrapolate(const std::vector<Complex>& values, double factor,
                               int use_last) {
    if (values.empty()) throw ValidationError("extrapolation of an empty sequence");
    const int m = std::min<int>(use_last, static_cast<int>(values.size()));
    std::vector<Complex> t(values.end() - m, values.end());
    for (int level = 1; level < m; ++level) {
        const double r = std::pow(factor, level);
        // after this pass t[k] is the order-`level` estimate from samples k..k+level
        for (int k = 0; k + level < m; ++k) {
            t[k] = (t[k + 1] - r * t[k]) / (1.0 - r);
        }
    }
    return t[0];
}

LimitEstimate poltoratskii_ratio(const DiscreteMeasure& nu, const DiscreteMeasure& sigma,
                                 double E, const EpsSchedule& sched) {
    if (!sigma.positive_flag) {
        throw ValidationError("poltoratskii_ratio requires a positive denominator measure");
    }
    for (size_t i = 0; i < nu.size(); ++i) {
        if (nu.weights[i] != 0.0 && !sigma.find_atom(nu.positions[i]).has_value()) {
            throw ValidationError("nu is not absolutely continuous w.r.t. sigma on atoms");
        }
    }
    LimitEstimate est;
    std::vector<Complex> ratios;
    ratios.reserve(sched.count);
    for (int k = 0; k < sched.count; ++k) {
        const Complex z{E, sched.eps(k)};
        const Complex r = borel_transform(nu, z) / borel_transform(sigma, z);
        ratios.push_back(r);
        est.trace.emplace_back(sched.eps(k), r);
    }
    est.limit = richardson_extrapolate(ratios, sched.factor, 5);
    const Complex shorter = richardson_extrapolate(ratios, sched.factor, 4);
    est.residual = std::abs(est.limit - shorter);
    est.converged = est.residual <= 1e-8 * (1.0 + std::abs(est.limit));
    return est;
}

namespace {

struct Mobius {
    // m -> (a m + b) / (c m + d)
    Complex a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};

    Mobius then_inner(const Mobius& inner) const {
        // composition this(inner(m)) corresponds to matrix product this * inner
        return Mobius{a * inner.a + b * inner.c, a * inner.b + b * inner.d,
                      c * inner.a + d * inner.c, c * inner.b + d * inner.d};
    }
};

Mobius cf_step(double a_sq, Complex w) {
    // m_out = 1 / (w - a_sq * m_in)
    return Mobius{{0.0, 0.0}, {1.0, 0.0}, {-a_sq, 0.0}, w};
}

// Herglotz fixed point of the p-periodic continued-fraction map at seed index
// s. Exact for the tail region; p = 1 for a constant tail.
Complex tail_fixed_point(const CoefficientModel& model, long s, Side direction, Complex z) {
    int p = 1;
    if (const auto* per = std::get_if<PeriodicTail>(&model.tail())) p = per->period;
    Mobius M;
    for (int i = 0; i < p; ++i) {
        const long k = direction == Side::plus ? s + i : s - i;
        const double a = direction == Side::plus ? model.a(k) : model.a(k - 1);
        const Mobius step = cf_step(a * a, Complex{model.b(k), 0.0} - z);
        M = (i == 0) ? step : M.then_inner(step);
    }
    // fixed point of m = (A m + B)/(C m + D)
    const Complex A = M.a, B = M.b, C = M.c, D = M.d;
    if (std::abs(C) == 0.0) return B / (D - A);
    const Complex disc = std::sqrt((D - A) * (D - A) + 4.0 * C * B);
    const Complex r1 = (A - D + disc) / (2.0 * C);
    const Complex r2 = (A - D - disc) / (2.0 * C);
    return r1.imag() > r2.imag() ? r1 : r2;
}

} // namespace

Complex outward_m(const CoefficientModel& model, long boundary, Side direction, Complex z,
                  long depth) {
    if (!(z.imag() > 0.0)) throw ValidationError("m-function requires Im z > 0");
    if (depth < 1) throw ValidationError("continued fraction depth must be >= 1");
    if (direction == Side::plus) {
        const long s = boundary + depth + 1;
        Complex m = tail_fixed_point(model, s, Side::plus, z);
        for (long k = s - 1; k >= boundary; --k) {
            m = 1.0 / (model.b(k) - z - model.a(k) * model.a(k) * m);
        }
        return m;
    }
    const long s = boundary - depth - 1;
    Complex m = tail_fixed_point(model, s, Side::minus, z);
    for (long k = s + 1; k <= boundary; ++k) {
        m = 1.0 / (model.b(k) - z - model.a(k - 1) * model.a(k - 1) * m);
    }
    return m;
}

namespace {

Complex half_line_m_once(const CoefficientModel& model, Side side, BoundaryAngle theta,
                         Complex z, long depth) {
    if (side == Side::plus) {
        if (theta.is_half_pi()) {
            // footnote convention: operator of the shifted sequences
            return outward_m(model, 2, Side::plus, z, depth);
        }
        const Complex inner = outward_m(model, 2, Side::plus, z, depth);
        const double shift = theta.is_zero() ? 0.0 : theta.tan();
        return 1.0 / (model.b(1) - shift - z - model.a(1) * model.a(1) * inner);
    }
    if (theta.is_zero()) {
        return outward_m(model, -1, Side::minus, z, depth);
    }
    const Complex inner = outward_m(model, -1, Side::minus, z, depth);
    const double shift = theta.is_half_pi() ? 0.0 : theta.cot();
    return 1.0 / (model.b(0) - shift - z - model.a(-1) * model.a(-1) * inner);
}

} // namespace

Complex half_line_m(const CoefficientModel& model, Side side, BoundaryAngle theta,
                    Complex z, long depth, double tol) {
    if (!(z.imag() > 0.0)) throw ValidationError("m-function requires Im z > 0");
    if (depth < 1) throw ValidationError("half_line_m requires depth >= 1");
    const Complex shallow = half_line_m_once(model, side, theta, z, depth);
    const Complex deep = half_line_m_once(model, side, theta, z, 2 * depth);
    if (std::abs(shallow - deep) > tol) {
        throw ConvergenceError("half_line_m did not stabilize across depth doubling",
                               shallow, deep);
    }
    return deep;
}

Complex half_line_m_matrix(const CoefficientModel& model, Side side, BoundaryAngle theta,
                           Complex z, long n) {
    if (!(z.imag() > 0.0)) throw ValidationError("m-function requires Im z > 0");
    const TruncatedOperator op = build_half_line(model, side, theta, n);
    const long boundary = side == Side::plus ? op.window().lo : op.window().hi;
    return truncation_resolvent_entry(op, boundary, boundary, z);
}

Complex perturbation_formula(Complex m0, BoundaryAngle theta) {
    const double t = theta.tan(); // rejects theta == pi/2
    const Complex den = 1.0 - t * m0;
    if (std::abs(den) < 1e-300) {
        throw PoleError("perturbation formula denominator vanished");
    }
    return m0 / den;
}

Complex truncation_resolvent_entry(const TruncatedOperator& op, long k, long j, Complex z) {
    const auto& w = op.window();
    if (!w.contains(k) || !w.contains(j)) {
        throw ValidationError("resolvent entry indices outside window");
    }
    const long n = w.size();
    std::vector<Complex> diag(n), lower(n - 1), upper(n - 1), rhs(n, Complex{0.0, 0.0});
    for (long p = 0; p < n; ++p) diag[p] = op.effective_diag(p) - z;
    for (long p = 0; p + 1 < n; ++p) lower[p] = upper[p] = op.offdiag()[p];
    rhs[w.pos(j)] = 1.0;
    const auto x = detail::tridiag_solve(std::move(diag), std::move(lower),
                                         std::move(upper), std::move(rhs));
    return x[w.pos(k)];
}

Complex whole_line_resolvent_entry(const CoefficientModel& model, long k, long j,
                                   Complex z, long n, double tol) {
    if (!(z.imag() > 0.0)) throw ValidationError("resolvent entry requires Im z > 0");
    if (std::max(std::labs(k), std::labs(j)) > n) {
        throw ValidationError("indices must satisfy |k|,|j| <= n");
    }
    const Complex v = truncation_resolvent_entry(build_whole_line(model, n), k, j, z);
    const long n2 = n + std::max<long>(8, n / 2);
    const Complex v2 = truncation_resolvent_entry(build_whole_line(model, n2), k, j, z);
    if (std::abs(v - v2) > tol) {
        throw ConvergenceError("resolvent entry is truncation sensitive", v, v2);
    }
    return v;
}

namespace detail {

std::vector<Complex> tridiag_solve(std::vector<Complex> d, std::vector<Complex> dl,
                                   std::vector<Complex> du, std::vector<Complex> b) {
    const size_t n = d.size();
    if (n == 0 || dl.size() != n - 1 || du.size() != n - 1 || b.size() != n) {
        throw ValidationError("tridiag_solve: inconsistent band sizes");
    }
    std::vector<Complex> du2(n >= 2 ? n - 2 : 0, Complex{0.0, 0.0});
    for (size_t k = 0; k + 1 < n; ++k) {
        if (std::abs(d[k]) >= std::abs(dl[k])) {
            if (std::abs(d[k]) == 0.0) {
                throw ConditioningError("tridiag_solve: zero pivot");
            }
            const Complex mult = dl[k] / d[k];
            d[k + 1] -= mult * du[k];
            b[k + 1] -= mult * b[k];
            if (k + 2 < n) du2[k] = Complex{0.0, 0.0};
        } else {
            // swap rows k and k+1
            const Complex mult = d[k] / dl[k];
            d[k] = dl[k];
            const Complex old_d1 = d[k + 1];
            d[k + 1] = du[k] - mult * old_d1;
            if (k + 2 < n) {
                du2[k] = du[k + 1];
                du[k + 1] = -mult * du2[k];
            }
            du[k] = old_d1;
            const Complex old_bk = b[k];
            b[k] = b[k + 1];
            b[k + 1] = old_bk - mult * b[k + 1];
        }
    }
    if (std::abs(d[n - 1]) == 0.0) throw ConditioningError("tridiag_solve: zero pivot");
    std::vector<Complex> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    if (n >= 2) x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    for (size_t k = n; k-- > 2;) {
        const size_t i = k - 2;
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    return x;
}

} // namespace detail

} // namespace jspec
