// load_model.hpp: customer load decomposition into schedulable and
// unschedulable parts, and demand forecasts conditioned on which customers
// have disclosed their schedulable load.

#pragma once

#include <vector>

#include "loadshare/coalition.hpp"
#include "loadshare/gaussian.hpp"

namespace loadshare {

// Per-customer, per-timestep Gaussian split of measured load:
// total = L_s + L_u with L_s ~ N(mu_s, sigma_s^2), L_u ~ N(mu_u, sigma_u^2).
struct CustomerLoadComponent {
    int customer_id = 0;  // 1-based; matches the player bit in Coalition
    double mu_s = 0.0;
    double sigma_s = 0.0;
    double mu_u = 0.0;
    double sigma_u = 0.0;
};

// Realized schedulable load a customer can reveal for one timestep.
struct DisclosedLoad {
    int customer_id = 0;
    double l_s = 0.0;
};

// Everything the retailer could know about one timestep: the Gaussian
// components for customers 1..M plus their disclosed realizations. The game
// masks disclosure subsets; the set itself carries all of them. Simulator
// runs always populate a disclosure per customer, but the container accepts
// partial sets so forecasts can reject missing data explicitly.
class TimestepLoadSet {
public:
    TimestepLoadSet(int timestep,
                    std::vector<CustomerLoadComponent> components,
                    std::vector<DisclosedLoad> disclosures);

    int timestep() const { return timestep_; }
    int customer_count() const { return static_cast<int>(components_.size()); }

    const CustomerLoadComponent& component(int customer_id) const;
    bool has_disclosure(int customer_id) const;
    double disclosed(int customer_id) const;

    const std::vector<CustomerLoadComponent>& components() const {
        return components_;
    }

private:
    int timestep_ = 0;
    std::vector<CustomerLoadComponent> components_;  // index = customer_id - 1
    std::vector<double> disclosed_values_;
    std::vector<char> disclosed_present_;
};

// Decomposes a measured total load: mu_s = alpha*mu_total,
// mu_u = (1-alpha)*mu_total, sigma_s = beta_s*mu_s, sigma_u = beta_u*mu_u.
CustomerLoadComponent split_load(int customer_id, double mu_total,
                                 double alpha, double beta_s, double beta_u);

// Retailer's demand forecast when exactly the customers in `disclosing` have
// revealed their schedulable loads. Disclosed terms contribute their realized
// value and no variance; everything else contributes its prior.
GaussianDist conditional_forecast(const TimestepLoadSet& loads,
                                  Coalition disclosing);

// Distribution of realized total demand once every schedulable load is known:
// only unschedulable variance remains.
GaussianDist realized_demand_dist(const TimestepLoadSet& loads);

}  // namespace loadshare
