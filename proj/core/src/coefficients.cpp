#include "jspec/coefficients.hpp"

#include <cmath>

#include "jspec/errors.hpp"

namespace jspec {

namespace {

long mod_floor(long n, long p) {
    long r = n % p;
    return r < 0 ? r + p : r;
}

} // namespace

CoefficientModel::CoefficientModel(long window_start, std::vector<double> a_window,
                                   std::vector<double> b_window, TailRule tail)
    : window_start_(window_start),
      a_(std::move(a_window)),
      b_(std::move(b_window)),
      tail_(tail) {
    if (a_.empty() || a_.size() != b_.size()) {
        throw ValidationError("coefficient windows must be non-empty and of equal length");
    }
    for (double v : a_) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ValidationError("off-diagonal coefficients must be strictly positive and finite");
        }
    }
    for (double v : b_) {
        if (!std::isfinite(v)) {
            throw ValidationError("diagonal coefficients must be finite");
        }
    }
    if (const auto* c = std::get_if<ConstantTail>(&tail_)) {
        if (!(c->a_inf > 0.0) || !std::isfinite(c->a_inf) || !std::isfinite(c->b_inf)) {
            throw ValidationError("constant tail requires a_inf > 0 and finite values");
        }
    } else {
        const auto& p = std::get<PeriodicTail>(tail_);
        if (p.period < 1 || static_cast<size_t>(p.period) > a_.size()) {
            throw ValidationError("periodic tail period must lie in [1, window length]");
        }
    }
}

double CoefficientModel::a(long n) const {
    const long off = n - window_start_;
    if (off >= 0 && off < static_cast<long>(a_.size())) return a_[off];
    if (const auto* c = std::get_if<ConstantTail>(&tail_)) return c->a_inf;
    const auto& p = std::get<PeriodicTail>(tail_);
    return a_[mod_floor(off, p.period)];
}

double CoefficientModel::b(long n) const {
    const long off = n - window_start_;
    if (off >= 0 && off < static_cast<long>(b_.size())) return b_[off];
    if (const auto* c = std::get_if<ConstantTail>(&tail_)) return c->b_inf;
    const auto& p = std::get<PeriodicTail>(tail_);
    return b_[mod_floor(off, p.period)];
}

CoefficientModel CoefficientModel::free_model() {
    return CoefficientModel(0, {1.0}, {0.0}, ConstantTail{1.0, 0.0});
}

nlohmann::json CoefficientModel::to_json() const {
    nlohmann::json tail;
    if (const auto* c = std::get_if<ConstantTail>(&tail_)) {
        tail = {{"kind", "constant"}, {"a_inf", c->a_inf}, {"b_inf", c->b_inf}};
    } else {
        tail = {{"kind", "periodic"}, {"period", std::get<PeriodicTail>(tail_).period}};
    }
    return {{"window_start", window_start_}, {"a", a_}, {"b", b_}, {"tail", tail}};
}

CoefficientModel CoefficientModel::from_json(const nlohmann::json& j) {
    try {
        const auto& tail_j = j.at("tail");
        const auto kind = tail_j.at("kind").get<std::string>();
        TailRule tail;
        if (kind == "constant") {
            tail = ConstantTail{tail_j.at("a_inf").get<double>(), tail_j.at("b_inf").get<double>()};
        } else if (kind == "periodic") {
            tail = PeriodicTail{tail_j.at("period").get<int>()};
        } else {
            throw ValidationError("unknown tail kind: " + kind);
        }
        return CoefficientModel(j.at("window_start").get<long>(),
                                j.at("a").get<std::vector<double>>(),
                                j.at("b").get<std::vector<double>>(), tail);
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed coefficient model: ") + e.what());
    }
}

bool CoefficientModel::operator==(const CoefficientModel& other) const {
    return to_json() == other.to_json();
}

} // namespace jspec
