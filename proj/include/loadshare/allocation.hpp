// allocation.hpp: payoff allocation over a characteristic-function table:
// exact Shapley value and the nucleolus (lexicographic minimization of sorted
// coalition excesses) via iterated linear programs.

#pragma once

#include <vector>

#include "loadshare/coalition.hpp"

namespace loadshare {

enum class AllocationMethod { shapley, nucleolus };

const char* to_string(AllocationMethod m);

struct Allocation {
    std::vector<double> x;  // payoff per player 0..M
    AllocationMethod method = AllocationMethod::shapley;
    double efficiency_gap = 0.0;     // sum(x) - v(grand)
    std::vector<int> negative_players;
};

// Sorted (descending) excesses e(T,x) = v(T) - sum_{i in T} x_i over all
// proper nonempty coalitions; length 2^(M+1) - 2.
using ExcessProfile = std::vector<double>;

// phi_i = sum over coalitions containing i of
// (|T|-1)!(n-|T|)!/n! * (v(T) - v(T\{i})). Weights are built in log space so
// the formula stays exact to rounding for every supported player count.
Allocation shapley(const ValueTable& table);

// Iterated LP scheme: each stage minimizes the worst unfixed excess, then
// coalitions whose excess is forced to the stage optimum in every optimal
// solution (confirmed by a re-solve) become equality constraints. Terminates
// once the equalities pin x. Requires at most 12 players.
Allocation nucleolus(const ValueTable& table);

ExcessProfile excess_profile(const ValueTable& table, const Allocation& a);

// Players with x_i < v({i}) - 1e-9. Violations are reported, never repaired.
std::vector<int> check_individual_rationality(const Allocation& a,
                                              const ValueTable& table);

}  // namespace loadshare
