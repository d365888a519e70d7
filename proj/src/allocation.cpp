#include "loadshare/allocation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

#include "loadshare/lp.hpp"

namespace loadshare {

namespace {

// The nucleolus pipeline runs on a table normalized to max |v| = 1, so these
// thresholds are relative to the game's scale.
constexpr double kTightTol = 1e-8;  // stage-optimum equality detection
constexpr double kViolTol = 1e-9;   // row-generation violation threshold
// Lower bound on the stage epsilon variable. Complement pairs bound every
// true stage optimum by (v(T) + v(N\T) - v(N))/2 >= -3/2 on a normalized
// table; the bound only protects relaxations that have not generated the
// complement row yet.
constexpr double kEpsBound = 16.0;
constexpr int kMaxNucleolusPlayers = 12;

void require_complete(const ValueTable& table) {
    if (!table.complete()) {
        throw std::invalid_argument("value table is incomplete");
    }
}

// sums[mask] = sum of x_i over players in mask, for every mask.
std::vector<double> mask_sums(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> sums(std::size_t{1} << n, 0.0);
    for (std::uint32_t mask = 1; mask < sums.size(); ++mask) {
        sums[mask] = sums[mask & (mask - 1)] +
                     x[static_cast<std::size_t>(std::countr_zero(mask))];
    }
    return sums;
}

Allocation finish(std::vector<double> x, AllocationMethod method,
                  const ValueTable& table) {
    Allocation a;
    a.x = std::move(x);
    a.method = method;
    double total = 0.0;
    for (double v : a.x) total += v;
    const double grand = table.grand_value();
    a.efficiency_gap = total - grand;
    if (std::fabs(a.efficiency_gap) > 1e-7 * std::max(1.0, std::fabs(grand))) {
        throw std::logic_error("allocation violates efficiency, gap " +
                               std::to_string(a.efficiency_gap));
    }
    for (std::size_t i = 0; i < a.x.size(); ++i) {
        if (a.x[i] < 0.0) a.negative_players.push_back(static_cast<int>(i));
    }
    return a;
}

// Row-echelon basis of player-indicator vectors. Tracks which coalition sums
// the accumulated equality constraints already determine.
class IndicatorSpan {
public:
    explicit IndicatorSpan(int n) : n_(n) {}

    int rank() const { return static_cast<int>(rows_.size()); }

    bool contains(const std::vector<double>& v) const {
        std::vector<double> r = v;
        return pivot_of(reduce(r)) < 0;
    }

    // Returns true when the vector enlarged the span.
    bool add(const std::vector<double>& v) {
        std::vector<double> r = v;
        reduce(r);
        const int p = pivot_of(r);
        if (p < 0) return false;
        const double inv = 1.0 / r[static_cast<std::size_t>(p)];
        for (double& e : r) e *= inv;
        rows_.push_back(std::move(r));
        lead_.push_back(p);
        return true;
    }

private:
    std::vector<double>& reduce(std::vector<double>& v) const {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const double f = v[static_cast<std::size_t>(lead_[k])];
            if (f == 0.0) continue;
            for (int j = 0; j < n_; ++j) {
                v[static_cast<std::size_t>(j)] -=
                    f * rows_[k][static_cast<std::size_t>(j)];
            }
        }
        return v;
    }

    int pivot_of(const std::vector<double>& v) const {
        for (int j = 0; j < n_; ++j) {
            if (std::fabs(v[static_cast<std::size_t>(j)]) > 1e-9) return j;
        }
        return -1;
    }

    int n_;
    std::vector<std::vector<double>> rows_;
    std::vector<int> lead_;
};

std::vector<double> indicator(std::uint32_t mask, int n) {
    std::vector<double> v(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        if ((mask >> i) & 1u) v[static_cast<std::size_t>(i)] = 1.0;
    }
    return v;
}

struct FixedRow {
    std::uint32_t mask;
    double excess;
};

// Shared scaffolding for the stage LP and the confirmation LP: equality rows
// are the efficiency constraint plus every fixed coalition.
void append_equalities(lp::Problem& prob, const ValueTable& table, int n,
                       int n_vars, const std::vector<FixedRow>& fixed) {
    std::vector<double> eff(static_cast<std::size_t>(n_vars), 0.0);
    for (int i = 0; i < n; ++i) eff[static_cast<std::size_t>(i)] = 1.0;
    prob.eq_a.push_back(std::move(eff));
    prob.eq_b.push_back(table.grand_value());
    for (const FixedRow& f : fixed) {
        std::vector<double> row(static_cast<std::size_t>(n_vars), 0.0);
        for (int i = 0; i < n; ++i) {
            if ((f.mask >> i) & 1u) row[static_cast<std::size_t>(i)] = 1.0;
        }
        prob.eq_a.push_back(std::move(row));
        prob.eq_b.push_back(table.value(Coalition(f.mask)) - f.excess);
    }
}

// Adds the most violated unfixed rows (at most `limit`) to the working set.
// Returns the number added.
int add_violated(const std::vector<double>& x, double eps,
                 const ValueTable& table, const std::vector<char>& unfixed,
                 std::vector<char>& in_working,
                 std::vector<std::uint32_t>& working, int limit) {
    const std::vector<double> sums = mask_sums(x);
    std::vector<std::pair<double, std::uint32_t>> violated;
    for (std::uint32_t mask = 1; mask + 1 < sums.size(); ++mask) {
        if (!unfixed[mask] || in_working[mask]) continue;
        const double e = table.value(Coalition(mask)) - sums[mask];
        if (e > eps + kViolTol) violated.emplace_back(e, mask);
    }
    std::sort(violated.begin(), violated.end(),
              [](const auto& a, const auto& b) {
                  if (a.first != b.first) return a.first > b.first;
                  return a.second < b.second;
              });
    const int n_add = std::min<int>(limit, static_cast<int>(violated.size()));
    for (int k = 0; k < n_add; ++k) {
        const std::uint32_t mask = violated[static_cast<std::size_t>(k)].second;
        in_working[mask] = 1;
        working.push_back(mask);
    }
    return n_add;
}

struct StageResult {
    std::vector<double> x;
    double eps = 0.0;
};

// Minimizes the maximum excess over all unfixed coalitions, generating rows
// lazily from the working set. Epsilon carries an explicit lower bound so a
// relaxation that is still missing its binding rows cannot be unbounded.
StageResult solve_stage(const ValueTable& table, int n,
                        const std::vector<FixedRow>& fixed,
                        const std::vector<char>& unfixed,
                        std::vector<char>& in_working,
                        std::vector<std::uint32_t>& working) {
    const int n_vars = n + 1;  // payoffs then epsilon
    constexpr double kInf = std::numeric_limits<double>::infinity();
    for (int iter = 0;; ++iter) {
        if (iter > (1 << (n + 1))) {
            throw std::runtime_error("nucleolus row generation failed to settle");
        }
        lp::Problem prob;
        prob.objective.assign(static_cast<std::size_t>(n_vars), 0.0);
        prob.objective[static_cast<std::size_t>(n)] = 1.0;
        prob.lower.assign(static_cast<std::size_t>(n_vars), -kInf);
        prob.lower[static_cast<std::size_t>(n)] = -kEpsBound;
        prob.upper.assign(static_cast<std::size_t>(n_vars), kInf);
        for (std::uint32_t mask : working) {
            std::vector<double> row(static_cast<std::size_t>(n_vars), 0.0);
            for (int i = 0; i < n; ++i) {
                if ((mask >> i) & 1u) row[static_cast<std::size_t>(i)] = -1.0;
            }
            row[static_cast<std::size_t>(n)] = -1.0;
            prob.ineq_a.push_back(std::move(row));
            prob.ineq_b.push_back(-table.value(Coalition(mask)));
        }
        append_equalities(prob, table, n, n_vars, fixed);

        const lp::Solution sol = lp::solve(prob);
        if (sol.status != lp::Status::optimal) {
            throw std::runtime_error("nucleolus stage LP not optimal");
        }
        std::vector<double> x(sol.x.begin(), sol.x.begin() + n);
        const double eps = sol.x[static_cast<std::size_t>(n)];
        if (add_violated(x, eps, table, unfixed, in_working, working, 8) == 0) {
            if (eps <= -kEpsBound + 1e-6) {
                throw std::runtime_error("nucleolus stage rode its eps bound");
            }
            return {std::move(x), eps};
        }
    }
}

// Minimum the candidate's excess can reach over the stage-optimal set. A
// minimum still at eps_star means the coalition is tight in every optimum.
double forced_min_excess(std::uint32_t candidate, double eps_star,
                         const ValueTable& table, int n,
                         const std::vector<FixedRow>& fixed,
                         const std::vector<char>& unfixed,
                         std::vector<char>& in_working,
                         std::vector<std::uint32_t>& working) {
    if (!in_working[candidate]) {
        in_working[candidate] = 1;
        working.push_back(candidate);
    }
    for (int iter = 0;; ++iter) {
        if (iter > (1 << (n + 1))) {
            throw std::runtime_error("nucleolus confirmation failed to settle");
        }
        lp::Problem prob;
        prob.objective.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            if ((candidate >> i) & 1u) prob.objective[static_cast<std::size_t>(i)] = -1.0;
        }
        for (std::uint32_t mask : working) {
            std::vector<double> row(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < n; ++i) {
                if ((mask >> i) & 1u) row[static_cast<std::size_t>(i)] = -1.0;
            }
            prob.ineq_a.push_back(std::move(row));
            prob.ineq_b.push_back(eps_star - table.value(Coalition(mask)));
        }
        {
            // e(candidate, x) >= eps_star - 1: pushing the excess any lower
            // than that already disproves fixing; the cap keeps the LP bounded.
            std::vector<double> row(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < n; ++i) {
                if ((candidate >> i) & 1u) row[static_cast<std::size_t>(i)] = 1.0;
            }
            prob.ineq_a.push_back(std::move(row));
            prob.ineq_b.push_back(table.value(Coalition(candidate)) - eps_star +
                                  1.0);
        }
        append_equalities(prob, table, n, n, fixed);

        const lp::Solution sol = lp::solve(prob);
        if (sol.status != lp::Status::optimal) {
            throw std::runtime_error("nucleolus confirmation LP not optimal");
        }
        if (add_violated(sol.x, eps_star, table, unfixed, in_working, working,
                         8) > 0) {
            continue;
        }
        return table.value(Coalition(candidate)) + sol.objective_value;
    }
}

}  // namespace

const char* to_string(AllocationMethod m) {
    switch (m) {
        case AllocationMethod::shapley: return "shapley";
        case AllocationMethod::nucleolus: return "nucleolus";
    }
    return "unknown";
}

Allocation shapley(const ValueTable& table) {
    require_complete(table);
    const int n = table.player_count();
    // weights[s] = (s-1)!(n-s)!/n!, computed in log space.
    std::vector<double> weights(static_cast<std::size_t>(n) + 1, 0.0);
    for (int s = 1; s <= n; ++s) {
        weights[static_cast<std::size_t>(s)] =
            std::exp(std::lgamma(s) + std::lgamma(n - s + 1) -
                     std::lgamma(n + 1));
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    const std::uint32_t size = 1u << n;
    for (std::uint32_t mask = 1; mask < size; ++mask) {
        const double v = table.value(Coalition(mask));
        const double w = weights[static_cast<std::size_t>(std::popcount(mask))];
        for (int i = 0; i < n; ++i) {
            if (!((mask >> i) & 1u)) continue;
            const double v_without = table.value(Coalition(mask & ~(1u << i)));
            x[static_cast<std::size_t>(i)] += w * (v - v_without);
        }
    }
    return finish(std::move(x), AllocationMethod::shapley, table);
}

Allocation nucleolus(const ValueTable& table) {
    require_complete(table);
    const int n = table.player_count();
    if (n > kMaxNucleolusPlayers) {
        throw std::invalid_argument(
            "nucleolus LP formulation supports at most " +
            std::to_string(kMaxNucleolusPlayers) + " players, got " +
            std::to_string(n));
    }
    if (n == 1) {
        return finish({table.grand_value()}, AllocationMethod::nucleolus,
                      table);
    }

    // Work on a normalized copy (max |v| = 1): real tables can sit many
    // orders of magnitude away from 1 and the tolerances above assume unit
    // scale. The nucleolus is positively homogeneous, so rescaling at the
    // end is exact.
    const std::uint32_t size = 1u << n;
    double scale = 0.0;
    for (std::uint32_t mask = 1; mask < size; ++mask) {
        scale = std::max(scale, std::fabs(table.value(Coalition(mask))));
    }
    if (scale == 0.0) {
        return finish(std::vector<double>(static_cast<std::size_t>(n), 0.0),
                      AllocationMethod::nucleolus, table);
    }
    ValueTable game(n);
    for (std::uint32_t mask = 1; mask < size; ++mask) {
        const Coalition t(mask);
        if (t.has_retailer()) game.set_value(t, table.value(t) / scale);
    }

    std::vector<char> unfixed(size, 0);
    for (std::uint32_t mask = 1; mask + 1 < size; ++mask) unfixed[mask] = 1;
    std::size_t n_unfixed = size - 2;

    // Working set seeded with the singletons: their excesses sum to a
    // constant under efficiency, which bounds the first stage LP from below.
    std::vector<char> in_working(size, 0);
    std::vector<std::uint32_t> working;
    for (int i = 0; i < n; ++i) {
        in_working[1u << i] = 1;
        working.push_back(1u << i);
    }

    std::vector<FixedRow> fixed;
    IndicatorSpan span(n);
    span.add(indicator(size - 1, n));  // efficiency row

    // Fixing marks the coalition determined; the equality row is only added
    // when its indicator enlarges the span. Dependent rows would be redundant
    // at best and, under roundoff, inconsistent at worst.
    const auto apply_fix = [&](std::uint32_t mask, double excess) {
        unfixed[mask] = 0;
        --n_unfixed;
        if (span.add(indicator(mask, n))) fixed.push_back({mask, excess});
    };

    std::vector<double> x;
    for (int stage = 0;; ++stage) {
        if (stage > n + 1) {
            throw std::runtime_error("nucleolus exceeded its stage bound");
        }
        StageResult res =
            solve_stage(game, n, fixed, unfixed, in_working, working);
        x = std::move(res.x);
        const double eps_star = res.eps;

        // Tight candidates at this optimum; a lone candidate is necessarily
        // the forcing row, anything more gets a confirming re-solve.
        const std::vector<double> sums = mask_sums(x);
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t mask = 1; mask + 1 < size; ++mask) {
            if (!unfixed[mask]) continue;
            const double e = game.value(Coalition(mask)) - sums[mask];
            if (e >= eps_star - kTightTol) candidates.push_back(mask);
        }
        if (candidates.empty()) {
            throw std::runtime_error("nucleolus stage has no tight coalition");
        }
        if (candidates.size() == 1) {
            apply_fix(candidates.front(), eps_star);
        } else {
            std::vector<std::uint32_t> to_fix;
            double best_min = -std::numeric_limits<double>::infinity();
            std::uint32_t best_mask = candidates.front();
            for (std::uint32_t c : candidates) {
                const double min_e = forced_min_excess(
                    c, eps_star, game, n, fixed, unfixed, in_working, working);
                if (min_e >= eps_star - kTightTol) {
                    to_fix.push_back(c);
                } else if (min_e > best_min) {
                    best_min = min_e;
                    best_mask = c;
                }
            }
            // Every optimum has a forced coalition; if the tolerance hid it,
            // take the candidate that came closest so the stage progresses.
            if (to_fix.empty()) to_fix.push_back(best_mask);
            for (std::uint32_t mask : to_fix) apply_fix(mask, eps_star);
        }
        // Coalitions whose sum the equalities now pin can never drive a
        // later stage; drop them from the unfixed pool.
        for (std::uint32_t mask = 1; mask + 1 < size; ++mask) {
            if (!unfixed[mask]) continue;
            if (span.contains(indicator(mask, n))) {
                unfixed[mask] = 0;
                --n_unfixed;
            }
        }
        // Stale working rows for fixed/determined coalitions do not belong in
        // later stages: their excesses legitimately exceed the shrinking
        // epsilon, so as inequalities they would contradict it.
        std::vector<std::uint32_t> keep;
        keep.reserve(working.size());
        for (std::uint32_t mask : working) {
            if (unfixed[mask]) {
                keep.push_back(mask);
            } else {
                in_working[mask] = 0;
            }
        }
        working = std::move(keep);

        if (span.rank() >= n || n_unfixed == 0) break;
    }
    for (double& xi : x) xi *= scale;
    return finish(std::move(x), AllocationMethod::nucleolus, table);
}

ExcessProfile excess_profile(const ValueTable& table, const Allocation& a) {
    require_complete(table);
    const int n = table.player_count();
    if (static_cast<int>(a.x.size()) != n) {
        throw std::invalid_argument("allocation size does not match table");
    }
    const std::vector<double> sums = mask_sums(a.x);
    ExcessProfile profile;
    profile.reserve((std::size_t{1} << n) - 2);
    for (std::uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
        profile.push_back(table.value(Coalition(mask)) - sums[mask]);
    }
    std::sort(profile.begin(), profile.end(), std::greater<double>());
    return profile;
}

std::vector<int> check_individual_rationality(const Allocation& a,
                                              const ValueTable& table) {
    std::vector<int> violators;
    const int n = std::min<int>(static_cast<int>(a.x.size()),
                                table.player_count());
    for (int i = 0; i < n; ++i) {
        const double vi = table.value(Coalition::of({i}));
        if (a.x[static_cast<std::size_t>(i)] < vi - 1e-9) {
            violators.push_back(i);
        }
    }
    return violators;
}

}  // namespace loadshare
