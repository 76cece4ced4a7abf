#include "hyperbeta/quantiles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hyperbeta/core.hpp"

namespace hyperbeta {

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Acklam's rational approximation, relative error about 1.15e-9.
double normal_quantile_initial(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("normal_quantile: p must lie in (0, 1)");
    }
    if (p == 0.5) {
        return 0.0;
    }
    // Work in the lower tail so that the antisymmetry holds exactly.
    const bool upper = p > 0.5;
    const double tail = upper ? 1.0 - p : p;
    double x = normal_quantile_initial(tail);
    // One Halley step against erfc brings the error to machine precision.
    const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - tail;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return upper ? -x : x;
}

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0) {
        throw DomainError("regularized_gamma_p: requires a > 0 and x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    const double log_prefix = a * std::log(x) - x - std::lgamma(a);
    constexpr double eps = 1e-16;
    constexpr int max_terms = 10000;
    if (x < a + 1.0) {
        // series: sum x^k / (a (a+1) ... (a+k))
        double term = 1.0 / a;
        double sum = term;
        for (int k = 1; k < max_terms; ++k) {
            term *= x / (a + k);
            sum += term;
            if (std::abs(term) < std::abs(sum) * eps) {
                break;
            }
        }
        return std::min(1.0, sum * std::exp(log_prefix));
    }
    // Lentz continued fraction for Q(a, x)
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < max_terms; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < eps) {
            break;
        }
    }
    return std::max(0.0, 1.0 - std::exp(log_prefix) * h);
}

double chisq_cdf(double x, int dof) {
    if (dof < 1) {
        throw DomainError("chisq_cdf: dof must be at least 1");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

double chisq_quantile(double p, int dof) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("chisq_quantile: p must lie in (0, 1)");
    }
    if (dof < 1) {
        throw DomainError("chisq_quantile: dof must be at least 1, got " + std::to_string(dof));
    }
    double lo = 0.0;
    double hi = std::max(1.0, static_cast<double>(dof));
    while (chisq_cdf(hi, dof) < p) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (chisq_cdf(mid, dof) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace hyperbeta
