// gaussian.hpp: Gaussian distribution mathematics used throughout the
// retailer model: PDF, CDF, quantile, the partial expectation E[max(D-q,0)],
// and inverse-transform sampling.

#pragma once

#include "loadshare/rng.hpp"

namespace loadshare {

// A demand forecast. variance == 0 denotes a point mass; every operation
// accepts it.
struct GaussianDist {
    double mean = 0.0;      // kWh
    double variance = 0.0;  // kWh^2

    GaussianDist() = default;
    GaussianDist(double mean, double variance);  // throws on variance < 0 or non-finite

    double stddev() const;
};

// Standard normal density.
double std_pdf(double z);

// Standard normal CDF, absolute error below 1e-12 over the full range.
// Throws std::domain_error on non-finite input.
double std_cdf(double z);

// Inverse standard normal CDF for p in (0,1).
// Throws std::domain_error for p outside the open interval.
double std_quantile(double p);

// E[max(D - q, 0)] for D ~ dist. For a point mass this is max(mean - q, 0).
double partial_expectation_above(const GaussianDist& dist, double q);

// One variate by inverse transform; consumes exactly one uniform draw,
// also when the distribution is degenerate.
double sample(const GaussianDist& dist, Rng& rng);

}  // namespace loadshare
