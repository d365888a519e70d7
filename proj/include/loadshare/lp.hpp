// lp.hpp: self-contained dense linear-programming solver. Sized for the
// nucleolus iteration: a few thousand rows at most, always minimization.

#pragma once

#include <vector>

namespace loadshare::lp {

inline constexpr double kFeasTol = 1e-7;
inline constexpr double kPivotTol = 1e-9;

// minimize objective . x
// subject to ineq_a . x <= ineq_b, eq_a . x = eq_b, lower <= x <= upper.
// Empty bound vectors mean all variables free; +-infinity entries allowed.
struct Problem {
    std::vector<double> objective;
    std::vector<std::vector<double>> ineq_a;
    std::vector<double> ineq_b;
    std::vector<std::vector<double>> eq_a;
    std::vector<double> eq_b;
    std::vector<double> lower;
    std::vector<double> upper;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
    Status status = Status::infeasible;
    std::vector<double> x;
    double objective_value = 0.0;
    // User inequality rows satisfied with equality (within kFeasTol) at the
    // optimum. Only populated when status == optimal.
    std::vector<int> active_rows;
};

// Two-phase tableau simplex. Deterministic: identical problems give
// bit-identical solutions. Throws std::invalid_argument on malformed input
// and std::runtime_error if the pivot cap is exhausted.
Solution solve(const Problem& p);

}  // namespace loadshare::lp
