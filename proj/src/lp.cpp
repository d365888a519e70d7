#include "loadshare/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace loadshare::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr long kPivotCap = 1'000'000;
// Consecutive non-improving pivots tolerated under Dantzig pricing before
// switching to Bland's rule for the rest of the solve.
constexpr int kStallWindow = 200;

void validate(const Problem& p) {
    const std::size_t n = p.objective.size();
    auto check_rows = [&](const std::vector<std::vector<double>>& a,
                          const std::vector<double>& b, const char* what) {
        if (a.size() != b.size()) {
            throw std::invalid_argument(std::string(what) +
                                        " row/rhs count mismatch");
        }
        for (const auto& row : a) {
            if (row.size() != n) {
                throw std::invalid_argument(std::string(what) +
                                            " row width != variable count");
            }
            for (double v : row) {
                if (!std::isfinite(v)) {
                    throw std::invalid_argument(std::string(what) +
                                                " coefficient not finite");
                }
            }
        }
        for (double v : b) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument(std::string(what) +
                                            " rhs not finite");
            }
        }
    };
    for (double v : p.objective) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("objective coefficient not finite");
        }
    }
    check_rows(p.ineq_a, p.ineq_b, "inequality");
    check_rows(p.eq_a, p.eq_b, "equality");
    if (!p.lower.empty() && p.lower.size() != n) {
        throw std::invalid_argument("lower bound count != variable count");
    }
    if (!p.upper.empty() && p.upper.size() != n) {
        throw std::invalid_argument("upper bound count != variable count");
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = p.lower.empty() ? -kInf : p.lower[j];
        const double hi = p.upper.empty() ? kInf : p.upper[j];
        if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf) {
            throw std::invalid_argument("malformed bound on variable " +
                                        std::to_string(j));
        }
        if (lo > hi) {
            throw std::invalid_argument("crossed bounds on variable " +
                                        std::to_string(j));
        }
    }
}

// Original variable -> nonnegative standard-form column(s).
struct VarMap {
    enum class Kind { shifted, flipped, split } kind = Kind::split;
    int col0 = -1;
    int col1 = -1;      // split only
    double offset = 0;  // shifted: x = offset + y; flipped: x = offset - y
};

// One standard-form row before slacks: coeffs . y (<= | =) rhs.
struct StdRow {
    std::vector<double> coeffs;
    double rhs = 0.0;
    bool is_eq = false;
    int user_row = -1;  // index into p.ineq_a, or -1 for internal rows
};

struct Tableau {
    int rows = 0;
    int cols = 0;  // excludes rhs column
    std::vector<double> a;
    std::vector<int> basis;

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * (cols + 1) + c]; }
    double at(int r, int c) const { return a[static_cast<std::size_t>(r) * (cols + 1) + c]; }
    double& rhs(int r) { return at(r, cols); }
    double rhs(int r) const { return at(r, cols); }

    void pivot(int pr, int pc) {
        const double pv = at(pr, pc);
        for (int c = 0; c <= cols; ++c) at(pr, c) /= pv;
        at(pr, pc) = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c <= cols; ++c) at(r, c) -= f * at(pr, c);
            at(r, pc) = 0.0;
        }
        basis[static_cast<std::size_t>(pr)] = pc;
    }
};

// Reduced-cost row for the current basis: cost - sum(cost[basis[r]] * row_r).
// rhs slot carries the negated objective of the basic solution.
std::vector<double> price_out(const Tableau& t, const std::vector<double>& cost) {
    std::vector<double> row(static_cast<std::size_t>(t.cols) + 1, 0.0);
    for (int c = 0; c < t.cols; ++c) row[static_cast<std::size_t>(c)] = cost[static_cast<std::size_t>(c)];
    for (int r = 0; r < t.rows; ++r) {
        const double cb = cost[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(r)])];
        if (cb == 0.0) continue;
        for (int c = 0; c <= t.cols; ++c) {
            row[static_cast<std::size_t>(c)] -= cb * t.at(r, c);
        }
    }
    return row;
}

void pivot_cost_row(std::vector<double>& cost_row, const Tableau& t, int pr,
                    int pc) {
    const double f = cost_row[static_cast<std::size_t>(pc)];
    if (f == 0.0) return;
    for (int c = 0; c <= t.cols; ++c) {
        cost_row[static_cast<std::size_t>(c)] -= f * t.at(pr, c);
    }
    cost_row[static_cast<std::size_t>(pc)] = 0.0;
}

enum class RunResult { optimal, unbounded };

// Minimizes cost_row over the tableau. `allowed[c]` gates entering columns
// (artificials are barred in phase 2). Dantzig pricing until kStallWindow
// consecutive degenerate pivots, then Bland's rule, which cannot cycle.
RunResult run_simplex(Tableau& t, std::vector<double>& cost_row,
                      std::vector<char>& allowed, long& pivots_left,
                      bool& bland_mode) {
    int stall = 0;
    while (true) {
        int entering = -1;
        if (bland_mode) {
            for (int c = 0; c < t.cols; ++c) {
                if (allowed[static_cast<std::size_t>(c)] &&
                    cost_row[static_cast<std::size_t>(c)] < -kPivotTol) {
                    entering = c;
                    break;
                }
            }
        } else {
            double best = -kPivotTol;
            for (int c = 0; c < t.cols; ++c) {
                if (allowed[static_cast<std::size_t>(c)] &&
                    cost_row[static_cast<std::size_t>(c)] < best) {
                    best = cost_row[static_cast<std::size_t>(c)];
                    entering = c;
                }
            }
        }
        if (entering < 0) return RunResult::optimal;

        int leaving = -1;
        double best_ratio = kInf;
        for (int r = 0; r < t.rows; ++r) {
            const double a = t.at(r, entering);
            if (a <= kPivotTol) continue;
            const double ratio = t.rhs(r) / a;
            if (ratio < best_ratio - kPivotTol ||
                (leaving >= 0 && ratio < best_ratio + kPivotTol &&
                 t.basis[static_cast<std::size_t>(r)] <
                     t.basis[static_cast<std::size_t>(leaving)])) {
                best_ratio = ratio;
                leaving = r;
            }
        }
        if (leaving < 0) return RunResult::unbounded;

        if (--pivots_left < 0) {
            throw std::runtime_error("lp solver stalled: pivot cap exhausted");
        }
        const double before = cost_row[static_cast<std::size_t>(t.cols)];
        t.pivot(leaving, entering);
        pivot_cost_row(cost_row, t, leaving, entering);
        const double after = cost_row[static_cast<std::size_t>(t.cols)];
        if (!bland_mode) {
            // Objective of the basic solution is -cost_row rhs; improvement
            // means that rhs grows.
            if (after > before + 1e-12) {
                stall = 0;
            } else if (++stall >= kStallWindow) {
                bland_mode = true;
            }
        }
    }
}

}  // namespace

Solution solve(const Problem& p) {
    validate(p);
    const int n = static_cast<int>(p.objective.size());

    // Map variables onto nonnegative columns.
    std::vector<VarMap> vmap(static_cast<std::size_t>(n));
    int n_y = 0;
    std::vector<StdRow> extra_rows;  // finite-interval upper bounds
    for (int j = 0; j < n; ++j) {
        const double lo = p.lower.empty() ? -kInf : p.lower[static_cast<std::size_t>(j)];
        const double hi = p.upper.empty() ? kInf : p.upper[static_cast<std::size_t>(j)];
        VarMap& m = vmap[static_cast<std::size_t>(j)];
        if (lo > -kInf) {
            m.kind = VarMap::Kind::shifted;
            m.offset = lo;
            m.col0 = n_y++;
            if (hi < kInf) {
                StdRow r;
                r.coeffs.assign(static_cast<std::size_t>(n_y), 0.0);
                r.coeffs[static_cast<std::size_t>(m.col0)] = 1.0;
                r.rhs = hi - lo;
                extra_rows.push_back(std::move(r));
            }
        } else if (hi < kInf) {
            m.kind = VarMap::Kind::flipped;
            m.offset = hi;
            m.col0 = n_y++;
        } else {
            m.kind = VarMap::Kind::split;
            m.col0 = n_y++;
            m.col1 = n_y++;
        }
    }

    auto to_std = [&](const std::vector<double>& row, double b, bool is_eq,
                      int user_row) {
        StdRow r;
        r.coeffs.assign(static_cast<std::size_t>(n_y), 0.0);
        r.rhs = b;
        r.is_eq = is_eq;
        r.user_row = user_row;
        for (int j = 0; j < n; ++j) {
            const double a = row[static_cast<std::size_t>(j)];
            if (a == 0.0) continue;
            const VarMap& m = vmap[static_cast<std::size_t>(j)];
            switch (m.kind) {
                case VarMap::Kind::shifted:
                    r.coeffs[static_cast<std::size_t>(m.col0)] += a;
                    r.rhs -= a * m.offset;
                    break;
                case VarMap::Kind::flipped:
                    r.coeffs[static_cast<std::size_t>(m.col0)] -= a;
                    r.rhs -= a * m.offset;
                    break;
                case VarMap::Kind::split:
                    r.coeffs[static_cast<std::size_t>(m.col0)] += a;
                    r.coeffs[static_cast<std::size_t>(m.col1)] -= a;
                    break;
            }
        }
        return r;
    };

    std::vector<StdRow> rows;
    rows.reserve(p.ineq_a.size() + p.eq_a.size() + extra_rows.size());
    for (std::size_t i = 0; i < p.ineq_a.size(); ++i) {
        rows.push_back(to_std(p.ineq_a[i], p.ineq_b[i], false,
                              static_cast<int>(i)));
    }
    for (std::size_t i = 0; i < p.eq_a.size(); ++i) {
        rows.push_back(to_std(p.eq_a[i], p.eq_b[i], true, -1));
    }
    for (auto& r : extra_rows) {
        r.coeffs.resize(static_cast<std::size_t>(n_y), 0.0);
        rows.push_back(std::move(r));
    }

    const int m = static_cast<int>(rows.size());
    const int n_slack = static_cast<int>(
        std::count_if(rows.begin(), rows.end(),
                      [](const StdRow& r) { return !r.is_eq; }));

    // Slack columns first, then one artificial per row that needs one.
    // Count artificials: equality rows always; inequality rows whose rhs is
    // negative (slack enters with -1 after row negation).
    int n_art = 0;
    for (const auto& r : rows) {
        if (r.is_eq || r.rhs < 0.0) ++n_art;
    }
    const int cols = n_y + n_slack + n_art;
    const std::size_t cells =
        static_cast<std::size_t>(m) * (static_cast<std::size_t>(cols) + 1);
    if (cells > (std::size_t{1} << 25)) {
        throw std::invalid_argument("lp problem exceeds the dense size guard");
    }

    Tableau t;
    t.rows = m;
    t.cols = cols;
    t.a.assign(cells, 0.0);
    t.basis.assign(static_cast<std::size_t>(m), -1);

    int slack_next = n_y;
    int art_next = n_y + n_slack;
    std::vector<int> art_cols;
    for (int r = 0; r < m; ++r) {
        const StdRow& row = rows[static_cast<std::size_t>(r)];
        const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
        for (int c = 0; c < n_y; ++c) {
            t.at(r, c) = sign * row.coeffs[static_cast<std::size_t>(c)];
        }
        t.rhs(r) = sign * row.rhs;
        if (!row.is_eq) {
            t.at(r, slack_next) = sign;
            if (sign > 0.0) t.basis[static_cast<std::size_t>(r)] = slack_next;
            ++slack_next;
        }
        if (t.basis[static_cast<std::size_t>(r)] < 0) {
            t.at(r, art_next) = 1.0;
            t.basis[static_cast<std::size_t>(r)] = art_next;
            art_cols.push_back(art_next);
            ++art_next;
        }
    }

    std::vector<char> allowed(static_cast<std::size_t>(cols), 1);
    long pivots_left = kPivotCap;
    bool bland_mode = false;

    // Phase 1: minimize the sum of artificials.
    if (!art_cols.empty()) {
        std::vector<double> art_cost(static_cast<std::size_t>(cols), 0.0);
        for (int c : art_cols) art_cost[static_cast<std::size_t>(c)] = 1.0;
        std::vector<double> cost_row = price_out(t, art_cost);
        const RunResult res =
            run_simplex(t, cost_row, allowed, pivots_left, bland_mode);
        if (res == RunResult::unbounded) {
            throw std::runtime_error("phase-1 objective unbounded");
        }
        const double art_sum = -cost_row[static_cast<std::size_t>(cols)];
        if (art_sum > kFeasTol) {
            Solution s;
            s.status = Status::infeasible;
            return s;
        }
        // Drive leftover artificials out of the basis; rows that cannot
        // pivot on a structural column are redundant and get dropped.
        for (int c : art_cols) allowed[static_cast<std::size_t>(c)] = 0;
        std::vector<char> keep(static_cast<std::size_t>(m), 1);
        for (int r = 0; r < t.rows; ++r) {
            const int b = t.basis[static_cast<std::size_t>(r)];
            if (allowed[static_cast<std::size_t>(b)]) continue;
            int pc = -1;
            double best = kPivotTol;
            for (int c = 0; c < cols; ++c) {
                if (allowed[static_cast<std::size_t>(c)] &&
                    std::fabs(t.at(r, c)) > best) {
                    best = std::fabs(t.at(r, c));
                    pc = c;
                }
            }
            if (pc >= 0) {
                t.pivot(r, pc);
            } else {
                keep[static_cast<std::size_t>(r)] = 0;
            }
        }
        int w = 0;
        for (int r = 0; r < t.rows; ++r) {
            if (!keep[static_cast<std::size_t>(r)]) continue;
            if (w != r) {
                for (int c = 0; c <= cols; ++c) t.at(w, c) = t.at(r, c);
                t.basis[static_cast<std::size_t>(w)] =
                    t.basis[static_cast<std::size_t>(r)];
            }
            ++w;
        }
        t.rows = w;
        t.basis.resize(static_cast<std::size_t>(w));
    }

    // Phase 2: the real objective over the y columns.
    std::vector<double> real_cost(static_cast<std::size_t>(cols), 0.0);
    for (int j = 0; j < n; ++j) {
        const double c = p.objective[static_cast<std::size_t>(j)];
        if (c == 0.0) continue;
        const VarMap& vm = vmap[static_cast<std::size_t>(j)];
        switch (vm.kind) {
            case VarMap::Kind::shifted:
                real_cost[static_cast<std::size_t>(vm.col0)] += c;
                break;
            case VarMap::Kind::flipped:
                real_cost[static_cast<std::size_t>(vm.col0)] -= c;
                break;
            case VarMap::Kind::split:
                real_cost[static_cast<std::size_t>(vm.col0)] += c;
                real_cost[static_cast<std::size_t>(vm.col1)] -= c;
                break;
        }
    }
    std::vector<double> cost_row = price_out(t, real_cost);
    const RunResult res =
        run_simplex(t, cost_row, allowed, pivots_left, bland_mode);
    if (res == RunResult::unbounded) {
        Solution s;
        s.status = Status::unbounded;
        return s;
    }

    std::vector<double> y(static_cast<std::size_t>(cols), 0.0);
    for (int r = 0; r < t.rows; ++r) {
        y[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(r)])] =
            t.rhs(r);
    }
    Solution s;
    s.status = Status::optimal;
    s.x.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const VarMap& vm = vmap[static_cast<std::size_t>(j)];
        switch (vm.kind) {
            case VarMap::Kind::shifted:
                s.x[static_cast<std::size_t>(j)] =
                    vm.offset + y[static_cast<std::size_t>(vm.col0)];
                break;
            case VarMap::Kind::flipped:
                s.x[static_cast<std::size_t>(j)] =
                    vm.offset - y[static_cast<std::size_t>(vm.col0)];
                break;
            case VarMap::Kind::split:
                s.x[static_cast<std::size_t>(j)] =
                    y[static_cast<std::size_t>(vm.col0)] -
                    y[static_cast<std::size_t>(vm.col1)];
                break;
        }
    }
    double obj = 0.0;
    for (int j = 0; j < n; ++j) {
        obj += p.objective[static_cast<std::size_t>(j)] *
               s.x[static_cast<std::size_t>(j)];
    }
    s.objective_value = obj;
    for (std::size_t i = 0; i < p.ineq_a.size(); ++i) {
        double lhs = 0.0;
        for (int j = 0; j < n; ++j) {
            lhs += p.ineq_a[i][static_cast<std::size_t>(j)] *
                   s.x[static_cast<std::size_t>(j)];
        }
        if (std::fabs(lhs - p.ineq_b[i]) <= kFeasTol) {
            s.active_rows.push_back(static_cast<int>(i));
        }
    }
    return s;
}

}  // namespace loadshare::lp
