#include "loadshare/gaussian.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace loadshare {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477562869;
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

// erfc split point: |z| = 3 for the normal argument, i.e. x = 3/sqrt(2).
constexpr double kErfcSplit = 3.0 * kInvSqrt2;

// MacLaurin series for erf(x); used below the split where it converges in a
// few dozen terms with no cancellation trouble.
double erf_series(double x) {
    const double xx = x * x;
    double term = x;  // (-1)^n x^(2n+1) / n!
    double sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -xx / n;
        const double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-18 * std::fabs(sum)) break;
    }
    return 2.0 * kInvSqrtPi * sum;
}

// Continued fraction for the upper incomplete gamma Q(1/2, x^2) = erfc(x),
// evaluated with the modified Lentz algorithm. Converges quickly for
// x >= kErfcSplit.
double erfc_continued_fraction(double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kA = 0.5;  // gamma parameter
    const double xx = x * x;

    double b = xx + 1.0 - kA;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 400; ++i) {
        const double an = -i * (i - kA);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-17) break;
    }
    return std::exp(-xx) * x * kInvSqrtPi * h;
}

// erfc(x) for x >= 0.
double erfc_positive(double x) {
    if (x < kErfcSplit) return 1.0 - erf_series(x);
    return erfc_continued_fraction(x);
}

// Upper tail P(Z > z), computed without the 1-CDF cancellation for z > 0.
double std_upper_tail(double z) {
    if (z >= 0.0) return 0.5 * erfc_positive(z * kInvSqrt2);
    return 1.0 - 0.5 * erfc_positive(-z * kInvSqrt2);
}

// Rational minimax approximation to the normal quantile (Acklam), accurate
// to ~1.2e-9 relative before refinement.
double quantile_minimax(double p) {
    static constexpr double a[6] = {
        -3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
        1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[5] = {
        -5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
        6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[6] = {
        -7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
        -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[4] = {
        7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
        3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

GaussianDist::GaussianDist(double mean_in, double variance_in)
    : mean(mean_in), variance(variance_in) {
    if (!std::isfinite(mean) || !std::isfinite(variance)) {
        throw std::invalid_argument("GaussianDist: parameters must be finite");
    }
    if (variance < 0.0) {
        throw std::invalid_argument("GaussianDist: variance must be >= 0");
    }
}

double GaussianDist::stddev() const { return std::sqrt(variance); }

double std_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double std_cdf(double z) {
    if (!std::isfinite(z)) throw std::domain_error("std_cdf: non-finite input");
    if (z < 0.0) return 0.5 * erfc_positive(-z * kInvSqrt2);
    return 1.0 - 0.5 * erfc_positive(z * kInvSqrt2);
}

double std_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("std_quantile: p must lie in (0,1)");
    }
    double x = quantile_minimax(p);
    // One Newton step on the CDF; saturates double precision since the
    // starting point is already within ~1e-9. The residual Phi(x) - p is
    // formed tail-side to avoid cancellation (1-p is exact for p >= 0.5).
    const double density = std_pdf(x);
    if (density > 1e-240) {
        const double residual = (x >= 0.0) ? ((1.0 - p) - std_upper_tail(x))
                                           : (std_cdf(x) - p);
        x -= residual / density;
    }
    return x;
}

double partial_expectation_above(const GaussianDist& dist, double q) {
    if (!std::isfinite(q)) {
        throw std::domain_error("partial_expectation_above: non-finite quantile");
    }
    const double floor_value = std::max(dist.mean - q, 0.0);
    if (dist.variance == 0.0) return floor_value;
    const double sigma = dist.stddev();
    const double z = (q - dist.mean) / sigma;
    const double value = sigma * (std_pdf(z) - z * std_upper_tail(z));
    return std::max(value, floor_value);
}

double sample(const GaussianDist& dist, Rng& rng) {
    const double u = rng.next_unit();
    if (dist.variance == 0.0) return dist.mean;
    return dist.mean + dist.stddev() * std_quantile(u);
}

}  // namespace loadshare
