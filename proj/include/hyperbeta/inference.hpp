#pragma once

#include <map>
#include <optional>
#include <vector>

#include "hyperbeta/core.hpp"
#include "hyperbeta/estimator.hpp"

namespace hyperbeta {

/// sigma_hat_s(v): square root of the plug-in degree variance at beta_hat.
Vector plugin_sigma(const Vector& beta_hat, int n, int s);

/// Fills fit.stderr_diag with 1 / sigma_hat_s(v).
void attach_standard_errors(FitResult& fit);

enum class SigmaSource { Plugin, Oracle };

const char* to_string(SigmaSource src);

struct Standardized {
    Vector z;  // sigma_s(v) (beta_hat_v - beta_v)
    SigmaSource source;
};

/// Throws NumericalError on a non-converged fit.
Standardized standardize(const FitResult& fit, const Vector& true_beta,
                         SigmaSource source = SigmaSource::Plugin);

struct Interval {
    int layer;
    int vertex;  // 0-based
    double estimate;
    double low;
    double high;
};

struct ConfidenceReport {
    std::map<int, std::vector<int>> layer_indices;
    double alpha = 0.05;
    int dof = 0;
    double threshold = 0.0;  // chi-squared (1 - alpha) quantile with dof = sum |J_s|
    std::optional<double> statistic;  // needs reference parameters
    std::optional<bool> covered;
    std::vector<Interval> intervals;  // layers queried with a single vertex
};

/// Joint chi-squared confidence set
///   sum_s sum_{v in J_s} sigma_hat_s(v)^2 (beta_hat_{s,v} - beta_{s,v})^2 <= chi2_{sum |J_s|, 1 - alpha}.
/// The statistic and coverage are reported when true_beta is supplied. A layer
/// queried at one vertex also gets beta_hat_v +- z_{alpha/2} / sigma_hat_s(v).
ConfidenceReport confidence_set(const std::map<int, FitResult>& fits,
                                const std::map<int, std::vector<int>>& queries, double alpha,
                                const std::optional<std::map<int, Vector>>& true_beta = std::nullopt);

}  // namespace hyperbeta
