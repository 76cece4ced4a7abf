#pragma once

namespace hyperbeta {

double normal_cdf(double x);

/// Inverse standard normal CDF. Throws DomainError unless 0 < p < 1.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

double chisq_cdf(double x, int dof);

/// Inverse chi-squared CDF by bisection on regularized_gamma_p.
/// Throws DomainError unless 0 < p < 1 and dof >= 1.
double chisq_quantile(double p, int dof);

}  // namespace hyperbeta
