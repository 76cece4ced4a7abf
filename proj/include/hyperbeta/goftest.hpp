#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hyperbeta/core.hpp"
#include "hyperbeta/estimator.hpp"

namespace hyperbeta {

enum class TestMethod { LR, Linf };

const char* to_string(TestMethod m);

struct TestReport {
    int layer = 0;
    int n = 0;
    TestMethod method = TestMethod::LR;
    double log_lr = 0.0;  // l(gamma) - l(beta_hat)
    double lambda = 0.0;  // (2 log_lr - n) / sqrt(2 n)
    double linf_distance = 0.0;  // |beta_hat - gamma|_inf
    double alpha = 0.0;
    std::optional<double> p_value;
    std::optional<bool> reject;
    std::optional<double> cutoff;  // L-infinity test threshold
    std::optional<double> linf_constant;  // C in 2 C sqrt(log n / n^(s-1))
    std::vector<std::string> warnings;
};

/// Normalised LR statistic (2 log_lr - n) / sqrt(2 n).
double normalized_lambda(double log_lr, int n);

/// LR statistic for H0: beta_s = gamma. Negative values within numerical
/// tolerance are clamped to zero with a warning.
TestReport lr_statistic(const LayerSample& sample, const Vector& gamma, const FitResult& fit);

/// Two-sided level-alpha decision: reject iff |lambda| > z_{alpha/2} (strict).
TestReport lr_test(TestReport report, double alpha);

/// C supplied directly; cutoff = 2 C sqrt(log n / n^(s-1)).
struct AnalyticConstant {
    double C;
};

/// Cutoff = empirical (1 - alpha) quantile of |beta_hat - gamma|_inf over
/// `replicates` samples drawn under the null.
struct MonteCarloCalibration {
    int replicates = 200;
    std::uint64_t seed = 0;
    FitConfig fit_config{};
    unsigned threads = 1;
};

using LinfCalibration = std::variant<AnalyticConstant, MonteCarloCalibration>;

struct LinfCutoff {
    double cutoff;
    double constant;  // equivalent C
    std::vector<double> null_statistics;  // sorted; empty for analytic
};

LinfCutoff calibrate_linf(const Vector& gamma, int n, int s, double alpha,
                          const LinfCalibration& calibration);

/// Rejects iff |beta_hat - gamma|_inf >= cutoff.
TestReport linf_test(const LayerSample& sample, const Vector& gamma, const FitResult& fit,
                     double alpha, const LinfCalibration& calibration);

/// Same decision with a cutoff computed beforehand.
TestReport linf_test(const LayerSample& sample, const Vector& gamma, const FitResult& fit,
                     double alpha, const LinfCutoff& cutoff);

struct SignalReport {
    double tau_hat = 0.0;  // n^((2s-3)/4) |gamma' - gamma|_2
    double eta_hat = 0.0;  // (gamma' - gamma)' Cov_gamma[d_s] (gamma' - gamma) / sqrt(n)
    double alpha = 0.05;
    double predicted_power = 0.0;  // P(|N(-eta/sqrt 2, 1)| > z_{alpha/2})
};

/// P(|N(-eta/sqrt 2, 1)| > z_{alpha/2}).
double predicted_power(double eta, double alpha);

SignalReport effective_signal(const Vector& gamma, const Vector& gamma_prime, int n, int s,
                              double alpha = 0.05);

}  // namespace hyperbeta
