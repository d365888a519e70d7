#include "loadshare/load_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace loadshare {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

}  // namespace

TimestepLoadSet::TimestepLoadSet(int timestep,
                                 std::vector<CustomerLoadComponent> components,
                                 std::vector<DisclosedLoad> disclosures)
    : timestep_(timestep), components_(std::move(components)) {
    const int m = static_cast<int>(components_.size());
    if (m > Coalition::kMaxPlayers - 1) {
        throw std::invalid_argument("too many customers: " + std::to_string(m));
    }
    std::vector<char> seen(static_cast<std::size_t>(m), 0);
    for (const auto& c : components_) {
        if (c.customer_id < 1 || c.customer_id > m) {
            throw std::invalid_argument("customer ids must cover 1.." +
                                        std::to_string(m) + " exactly, got " +
                                        std::to_string(c.customer_id));
        }
        if (seen[static_cast<std::size_t>(c.customer_id - 1)]) {
            throw std::invalid_argument("duplicate component for customer " +
                                        std::to_string(c.customer_id));
        }
        seen[static_cast<std::size_t>(c.customer_id - 1)] = 1;
        if (c.sigma_s < 0.0 || c.sigma_u < 0.0) {
            throw std::invalid_argument("negative sigma for customer " +
                                        std::to_string(c.customer_id));
        }
    }
    // Keep lookup by id O(1): reorder so index = customer_id - 1.
    std::vector<CustomerLoadComponent> ordered(components_.size());
    for (const auto& c : components_) {
        ordered[static_cast<std::size_t>(c.customer_id - 1)] = c;
    }
    components_ = std::move(ordered);

    disclosed_values_.assign(static_cast<std::size_t>(m), 0.0);
    disclosed_present_.assign(static_cast<std::size_t>(m), 0);
    for (const auto& d : disclosures) {
        if (d.customer_id < 1 || d.customer_id > m) {
            throw std::invalid_argument("disclosure for unknown customer " +
                                        std::to_string(d.customer_id));
        }
        const auto idx = static_cast<std::size_t>(d.customer_id - 1);
        if (disclosed_present_[idx]) {
            throw std::invalid_argument("duplicate disclosure for customer " +
                                        std::to_string(d.customer_id));
        }
        require_finite(d.l_s, "disclosed load");
        disclosed_values_[idx] = d.l_s;
        disclosed_present_[idx] = 1;
    }
}

const CustomerLoadComponent& TimestepLoadSet::component(int customer_id) const {
    if (customer_id < 1 || customer_id > customer_count()) {
        throw std::out_of_range("no customer " + std::to_string(customer_id));
    }
    return components_[static_cast<std::size_t>(customer_id - 1)];
}

bool TimestepLoadSet::has_disclosure(int customer_id) const {
    if (customer_id < 1 || customer_id > customer_count()) return false;
    return disclosed_present_[static_cast<std::size_t>(customer_id - 1)] != 0;
}

double TimestepLoadSet::disclosed(int customer_id) const {
    if (!has_disclosure(customer_id)) {
        throw std::invalid_argument("no disclosure for customer " +
                                    std::to_string(customer_id));
    }
    return disclosed_values_[static_cast<std::size_t>(customer_id - 1)];
}

CustomerLoadComponent split_load(int customer_id, double mu_total,
                                 double alpha, double beta_s, double beta_u) {
    require_finite(mu_total, "mu_total");
    require_finite(alpha, "alpha");
    require_finite(beta_s, "beta_s");
    require_finite(beta_u, "beta_u");
    if (customer_id < 1) {
        throw std::invalid_argument("customer_id must be >= 1");
    }
    if (mu_total < 0.0) {
        throw std::invalid_argument("mu_total must be nonnegative");
    }
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("alpha must lie in [0,1]");
    }
    if (beta_s < 0.0 || beta_u < 0.0) {
        throw std::invalid_argument("beta factors must be nonnegative");
    }
    CustomerLoadComponent c;
    c.customer_id = customer_id;
    c.mu_s = alpha * mu_total;
    c.mu_u = (1.0 - alpha) * mu_total;
    c.sigma_s = beta_s * c.mu_s;
    c.sigma_u = beta_u * c.mu_u;
    return c;
}

GaussianDist conditional_forecast(const TimestepLoadSet& loads,
                                  Coalition disclosing) {
    if (disclosing.has_retailer()) {
        throw std::invalid_argument(
            "disclosing coalition must contain customer indices only");
    }
    const int m = loads.customer_count();
    double mean = 0.0;
    double variance = 0.0;
    for (int i = 1; i <= m; ++i) {
        const auto& c = loads.component(i);
        if (disclosing.contains(i)) {
            mean += loads.disclosed(i);
        } else {
            mean += c.mu_s;
            variance += c.sigma_s * c.sigma_s;
        }
        mean += c.mu_u;
        variance += c.sigma_u * c.sigma_u;
    }
    for (int p = m + 1; p < Coalition::kMaxPlayers; ++p) {
        if (disclosing.contains(p)) {
            throw std::invalid_argument("disclosing coalition names customer " +
                                        std::to_string(p) +
                                        " beyond the load set");
        }
    }
    return GaussianDist(mean, variance);
}

GaussianDist realized_demand_dist(const TimestepLoadSet& loads) {
    std::uint32_t mask = 0;
    for (int i = 1; i <= loads.customer_count(); ++i) mask |= 1u << i;
    return conditional_forecast(loads, Coalition(mask));
}

}  // namespace loadshare
