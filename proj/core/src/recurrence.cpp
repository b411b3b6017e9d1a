#include "jspec/recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace jspec {

namespace {

constexpr double kRescaleThreshold = 1e150;

void rescale_all(std::vector<double>& values, double& u_prev, double& u_next,
                 double& log_scale) {
    const double mx = std::max(std::abs(u_prev), std::abs(u_next));
    u_prev /= mx;
    u_next /= mx;
    for (double& v : values) v /= mx;
    log_scale += std::log(mx);
}

} // namespace

SolutionSample solve(const CoefficientModel& model, double E, Side side, double u_prev,
                     double u_next, long L_max) {
    if (L_max < 2) throw ValidationError("solve requires L_max >= 2");
    SolutionSample s;
    s.side = side;
    s.energy = E;
    s.identically_zero = (u_prev == 0.0 && u_next == 0.0);

    if (side == Side::plus) {
        s.first_index = 0;
        s.values.reserve(L_max + 2);
        s.values.push_back(u_prev); // u(0)
        s.values.push_back(u_next); // u(1)
        double um = u_prev, u = u_next;
        for (long n = 1; n <= L_max; ++n) {
            const double up = ((E - model.b(n)) * u - model.a(n - 1) * um) / model.a(n);
            um = u;
            u = up;
            s.values.push_back(u);
            if (std::abs(u) > kRescaleThreshold) {
                rescale_all(s.values, um, u, s.log_scale);
            }
        }
        return s;
    }

    // side minus: data (u(1), u(0)), values filled downward then reversed
    s.values.reserve(L_max + 2);
    s.values.push_back(u_prev); // u(1)
    s.values.push_back(u_next); // u(0)
    double up = u_prev, u = u_next;
    for (long n = 0; n > -L_max; --n) {
        const double um = ((E - model.b(n)) * u - model.a(n) * up) / model.a(n - 1);
        up = u;
        u = um;
        s.values.push_back(u);
        if (std::abs(u) > kRescaleThreshold) {
            rescale_all(s.values, up, u, s.log_scale);
        }
    }
    std::reverse(s.values.begin(), s.values.end());
    s.first_index = -L_max;
    return s;
}

namespace {

// Lattice index of the j-th site from the boundary (j = 1, 2, ...).
long site_from_boundary(Side side, long j) { return side == Side::plus ? j : 1 - j; }

} // namespace

double norm_interval(const SolutionSample& u, double L) {
    if (!(L > 1.0)) throw ValidationError("interval norm requires L > 1");
    const long whole = static_cast<long>(std::floor(L));
    const double frac = L - static_cast<double>(whole);
    const long last_site = site_from_boundary(u.side, whole + 1);
    if (!u.has_index(last_site) || !u.has_index(site_from_boundary(u.side, 1))) {
        throw ValidationError("solution sample too short for requested L");
    }
    // scaled summation so that rescaled hyperbolic samples cannot overflow
    double mx = 0.0;
    for (long j = 1; j <= whole + 1; ++j) {
        mx = std::max(mx, std::abs(u.at(site_from_boundary(u.side, j))));
    }
    if (mx == 0.0) return 0.0;
    double sum = 0.0;
    for (long j = 1; j <= whole; ++j) {
        const double v = u.at(site_from_boundary(u.side, j)) / mx;
        sum += v * v;
    }
    const double tail = u.at(last_site) / mx;
    sum += frac * tail * tail;
    return mx * std::sqrt(sum);
}

double log_norm_interval(const SolutionSample& u, double L) {
    const double n = norm_interval(u, L);
    return std::log(n) + u.log_scale;
}

SolutionSample boundary_solution(const CoefficientModel& model, BoundaryAngle theta,
                                 double E, Side side, long L_max) {
    const double u0 = -std::sin(theta.theta());
    const double u1 = std::cos(theta.theta());
    if (side == Side::plus) return solve(model, E, side, u0, u1, L_max);
    return solve(model, E, side, u1, u0, L_max);
}

namespace {

// Log interval norms of the boundary solution at integer checkpoints,
// computed in one pass without storing the whole solution.
std::vector<double> checkpoint_log_norms(const CoefficientModel& model, Side side,
                                         double E, double theta,
                                         const std::vector<long>& Ls) {
    double u0 = -std::sin(theta);
    double u1 = std::cos(theta);
    double um, u;
    if (side == Side::plus) {
        um = u0;
        u = u1;
    } else {
        um = u1;
        u = u0;
    }
    std::vector<double> out;
    out.reserve(Ls.size());
    double ssum = 0.0;
    double log_scale = 0.0;
    size_t next = 0;
    const long L_max = Ls.back();
    for (long j = 1; j <= L_max && next < Ls.size(); ++j) {
        // u currently holds the value at the j-th site from the boundary
        ssum += u * u;
        if (j == Ls[next]) {
            out.push_back(0.5 * std::log(ssum) + log_scale);
            ++next;
        }
        const long n = site_from_boundary(side, j);
        double step;
        if (side == Side::plus) {
            step = ((E - model.b(n)) * u - model.a(n - 1) * um) / model.a(n);
        } else {
            step = ((E - model.b(n)) * u - model.a(n) * um) / model.a(n - 1);
        }
        um = u;
        u = step;
        if (std::abs(u) > kRescaleThreshold) {
            const double mx = std::max(std::abs(um), std::abs(u));
            um /= mx;
            u /= mx;
            ssum /= mx * mx;
            log_scale += std::log(mx);
        }
    }
    return out;
}

double fold_angle(double theta) {
    theta = std::fmod(theta, std::numbers::pi);
    if (theta < 0.0) theta += std::numbers::pi;
    return theta;
}

} // namespace

SubordinacyVerdict detect_subordinate(const CoefficientModel& model, Side side, double E,
                                      long L_max, double threshold) {
    std::vector<long> Ls;
    for (long L = L_max; L >= 8; L /= 2) Ls.push_back(L);
    std::reverse(Ls.begin(), Ls.end());
    if (Ls.size() < 6) {
        throw ValidationError("L_max too small for six geometric checkpoints");
    }

    const auto log_ratio_at = [&](double theta) {
        const std::vector<long> only{L_max};
        const double lu = checkpoint_log_norms(model, side, E, theta, only)[0];
        const double lv =
            checkpoint_log_norms(model, side, E, fold_angle(theta + std::numbers::pi / 2), only)[0];
        return lu - lv;
    };

    // coarse scan, then golden-section refinement around the grid minimizer;
    // the subordinate angle, when it exists, is unique
    constexpr int kGrid = 64;
    double best = 0.0, best_val = 0.0;
    std::vector<double> grid_vals(kGrid);
    for (int k = 0; k < kGrid; ++k) {
        const double th = std::numbers::pi * k / kGrid;
        grid_vals[k] = log_ratio_at(th);
        if (k == 0 || grid_vals[k] < best_val) {
            best_val = grid_vals[k];
            best = th;
        }
    }
    const double step = std::numbers::pi / kGrid;
    double a = best - step, b = best + step;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = log_ratio_at(fold_angle(c)), fd = log_ratio_at(fold_angle(d));
    for (int it = 0; it < 72; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = log_ratio_at(fold_angle(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = log_ratio_at(fold_angle(d));
        }
    }
    const double theta_hat = fold_angle(0.5 * (a + b));

    SubordinacyVerdict v;
    v.L_max = L_max;
    v.threshold = threshold;

    const auto lu = checkpoint_log_norms(model, side, E, theta_hat, Ls);
    const auto lv = checkpoint_log_norms(model, side, E,
                                         fold_angle(theta_hat + std::numbers::pi / 2), Ls);
    for (size_t k = 0; k < Ls.size(); ++k) {
        v.ratio_trace.push_back({static_cast<double>(Ls[k]), std::exp(lu[k] - lv[k])});
    }
    v.final_ratio = v.ratio_trace.back().ratio;

    bool monotone = true;
    const size_t tail = std::min<size_t>(6, v.ratio_trace.size());
    for (size_t k = v.ratio_trace.size() - tail; k + 1 < v.ratio_trace.size(); ++k) {
        if (v.ratio_trace[k + 1].ratio > v.ratio_trace[k].ratio * (1.0 + 1e-6)) {
            monotone = false;
        }
    }

    if (v.final_ratio < threshold && monotone) {
        v.status = SubordinacyStatus::subordinate_angle;
        v.theta = theta_hat;
    } else if (v.final_ratio < threshold) {
        v.status = SubordinacyStatus::inconclusive;
        v.theta = theta_hat;
    } else {
        v.status = SubordinacyStatus::none_detected;
    }
    return v;
}

double wronskian(const CoefficientModel& model, const SolutionSample& u,
                 const SolutionSample& v, long n) {
    return model.a(n) * (u.at(n + 1) * v.at(n) - u.at(n) * v.at(n + 1));
}

double recurrence_residual(const CoefficientModel& model, const SolutionSample& u) {
    double worst = 0.0;
    for (long n = u.first_index + 1; n < u.last_index(); ++n) {
        const double lhs = model.a(n - 1) * u.at(n - 1) + model.a(n) * u.at(n + 1) +
                           model.b(n) * u.at(n);
        const double rhs = u.energy * u.at(n);
        const double scale = std::abs(lhs) + std::abs(rhs) + std::abs(u.at(n)) + 1e-300;
        worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
    return worst;
}

} // namespace jspec
