// coalition.hpp: player subsets as bitmasks and the characteristic value
// table of the data-sharing game. Player 0 is the retailer, players 1..M the
// customers.

#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace loadshare {

class Coalition {
public:
    // Retailer plus at most 24 customers; keeps 2^(M+1) enumeration sane.
    static constexpr int kMaxPlayers = 25;

    constexpr Coalition() = default;
    constexpr explicit Coalition(std::uint32_t mask) : mask_(mask) {}

    static constexpr Coalition empty() { return Coalition(0); }
    static Coalition grand(int player_count);
    static Coalition of(std::initializer_list<int> players);

    constexpr std::uint32_t mask() const { return mask_; }
    constexpr bool contains(int player) const { return (mask_ >> player) & 1u; }
    constexpr bool has_retailer() const { return contains(0); }
    constexpr bool is_empty() const { return mask_ == 0; }
    constexpr int size() const { return std::popcount(mask_); }

    constexpr Coalition with(int player) const {
        return Coalition(mask_ | (1u << player));
    }
    constexpr Coalition without(int player) const {
        return Coalition(mask_ & ~(1u << player));
    }
    // Customer part of the coalition (retailer bit cleared).
    constexpr Coalition customers() const { return without(0); }

    constexpr bool is_subset_of(Coalition other) const {
        return (mask_ & ~other.mask_) == 0;
    }

    std::vector<int> members() const;

    friend constexpr bool operator==(Coalition a, Coalition b) = default;

private:
    std::uint32_t mask_ = 0;
};

// Characteristic function v over all 2^(M+1) coalitions. Construction
// pre-sets the structural zeros of the game: v(empty) = 0 and v(T) = 0
// whenever the retailer is absent; those entries reject any other value.
class ValueTable {
public:
    explicit ValueTable(int player_count);

    int player_count() const { return player_count_; }
    std::size_t size() const { return values_.size(); }

    double value(Coalition t) const;
    void set_value(Coalition t, double v);

    double grand_value() const;
    // True once every retailer-containing coalition has been assigned.
    bool complete() const;

    // Number of cover pairs (T, T u {i}) whose value decreases when i joins.
    // The game is not guaranteed monotone; this is a diagnostic, not an error.
    int monotonicity_violations() const;

private:
    int player_count_ = 0;
    std::vector<double> values_;
    std::vector<char> assigned_;
};

}  // namespace loadshare
