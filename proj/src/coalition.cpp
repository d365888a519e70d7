#include "loadshare/coalition.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loadshare {

Coalition Coalition::grand(int player_count) {
    if (player_count < 1 || player_count > kMaxPlayers) {
        throw std::invalid_argument("player count out of range: " +
                                    std::to_string(player_count));
    }
    return Coalition((1u << player_count) - 1u);
}

Coalition Coalition::of(std::initializer_list<int> players) {
    std::uint32_t mask = 0;
    for (int p : players) {
        if (p < 0 || p >= kMaxPlayers) {
            throw std::invalid_argument("player index out of range: " +
                                        std::to_string(p));
        }
        mask |= 1u << p;
    }
    return Coalition(mask);
}

std::vector<int> Coalition::members() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int p = 0; p < kMaxPlayers; ++p) {
        if (contains(p)) out.push_back(p);
    }
    return out;
}

ValueTable::ValueTable(int player_count) : player_count_(player_count) {
    if (player_count < 1 || player_count > Coalition::kMaxPlayers) {
        throw std::invalid_argument("player count out of range: " +
                                    std::to_string(player_count));
    }
    const std::size_t n = std::size_t{1} << player_count;
    values_.assign(n, 0.0);
    assigned_.assign(n, 0);
    // Retailerless coalitions have no purchase decision to improve, so their
    // value is fixed at zero up front (even-indexed masks lack bit 0).
    for (std::size_t mask = 0; mask < n; mask += 2) assigned_[mask] = 1;
}

double ValueTable::value(Coalition t) const {
    const std::uint32_t mask = t.mask();
    if (mask >= values_.size()) {
        throw std::out_of_range("coalition mask beyond table");
    }
    if (!assigned_[mask]) {
        throw std::logic_error("coalition value read before assignment, mask " +
                               std::to_string(mask));
    }
    return values_[mask];
}

void ValueTable::set_value(Coalition t, double v) {
    const std::uint32_t mask = t.mask();
    if (mask >= values_.size()) {
        throw std::out_of_range("coalition mask beyond table");
    }
    if (!std::isfinite(v)) {
        throw std::invalid_argument("coalition value must be finite");
    }
    if (!t.has_retailer()) {
        if (v != 0.0) {
            throw std::invalid_argument(
                "coalition without the retailer must have value 0");
        }
        return;
    }
    values_[mask] = v;
    assigned_[mask] = 1;
}

double ValueTable::grand_value() const {
    return value(Coalition::grand(player_count_));
}

bool ValueTable::complete() const {
    for (std::size_t mask = 1; mask < values_.size(); mask += 2) {
        if (!assigned_[mask]) return false;
    }
    return true;
}

int ValueTable::monotonicity_violations() const {
    int count = 0;
    const std::size_t n = values_.size();
    for (std::size_t mask = 0; mask < n; ++mask) {
        if (!assigned_[mask]) continue;
        for (int p = 0; p < player_count_; ++p) {
            const std::uint32_t up = static_cast<std::uint32_t>(mask) | (1u << p);
            if (up == mask || !assigned_[up]) continue;
            const double tol = 1e-9 * std::max(1.0, std::fabs(values_[mask]));
            if (values_[up] < values_[mask] - tol) ++count;
        }
    }
    return count;
}

}  // namespace loadshare
