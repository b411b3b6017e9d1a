#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace jspec {

/// Outside the explicit window the sequences continue with fixed values.
struct ConstantTail {
    double a_inf = 1.0;
    double b_inf = 0.0;
};

/// Outside the window, index n maps to window slot (n - window_start) mod period.
struct PeriodicTail {
    int period = 1;
};

using TailRule = std::variant<ConstantTail, PeriodicTail>;

/// A two-sided Jacobi coefficient pair (a_n), (b_n): a finite explicit window
/// plus a tail rule. Evaluation is total over the integers and deterministic,
/// all a_n are strictly positive, and both sequences are bounded by
/// construction. This is the single source of truth for an operator.
class CoefficientModel {
public:
    CoefficientModel(long window_start, std::vector<double> a_window,
                     std::vector<double> b_window, TailRule tail);

    /// Off-diagonal coefficient a_n (couples sites n and n+1).
    double a(long n) const;
    /// Diagonal coefficient b_n.
    double b(long n) const;

    long window_start() const { return window_start_; }
    long window_end() const { return window_start_ + static_cast<long>(a_.size()) - 1; }
    const std::vector<double>& a_window() const { return a_; }
    const std::vector<double>& b_window() const { return b_; }
    const TailRule& tail() const { return tail_; }

    /// a == 1, b == 0 everywhere.
    static CoefficientModel free_model();

    nlohmann::json to_json() const;
    static CoefficientModel from_json(const nlohmann::json& j);

    bool operator==(const CoefficientModel& other) const;

private:
    long window_start_;
    std::vector<double> a_;
    std::vector<double> b_;
    TailRule tail_;
};

} // namespace jspec
