#include "hyperbeta/goftest.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperbeta/combinatorics.hpp"
#include "hyperbeta/likelihood.hpp"
#include "hyperbeta/parallel.hpp"
#include "hyperbeta/quantiles.hpp"
#include "hyperbeta/sampler.hpp"

namespace hyperbeta {

const char* to_string(TestMethod m) {
    return m == TestMethod::LR ? "LR" : "Linf";
}

double normalized_lambda(double log_lr, int n) {
    return (2.0 * log_lr - n) / std::sqrt(2.0 * n);
}

namespace {

void check_test_inputs(const LayerSample& sample, const Vector& gamma, const FitResult& fit) {
    if (!fit.converged) {
        throw NumericalError("test requires a converged fit");
    }
    if (fit.n != sample.n || fit.s != sample.s) {
        throw ArgumentError("fit does not belong to this sample");
    }
    if (gamma.size() != sample.n) {
        throw ArgumentError("null vector has length " + std::to_string(gamma.size()) +
                            ", expected " + std::to_string(sample.n));
    }
    if (!gamma.allFinite()) {
        throw ArgumentError("null vector has non-finite entries");
    }
}

// l(gamma) - l(beta_hat) accumulated edge by edge so the two large partition
// sums cancel term-wise instead of after summation.
double log_lr_difference(const LayerSample& sample, const Vector& gamma, const Vector& beta_hat) {
    double partition = 0.0;
    double carry = 0.0;
    for_each_subset_sum(sample.n, sample.s, beta_hat, [&](std::span<const int> members, double sum_hat) {
        double sum_null = 0.0;
        for (int v : members) {
            sum_null += gamma[v];
        }
        const double term = log1p_exp(sum_null) - log1p_exp(sum_hat);
        const double t = partition + term;
        carry += std::abs(partition) >= std::abs(term) ? (partition - t) + term : (term - t) + partition;
        partition = t;
    });
    double linear = 0.0;
    for (int v = 0; v < sample.n; ++v) {
        linear += (gamma[v] - beta_hat[v]) * static_cast<double>(sample.degrees[v]);
    }
    return (partition + carry) - linear;
}

double two_sided_p(double lambda) {
    return std::erfc(std::abs(lambda) / std::numbers::sqrt2);
}

}  // namespace

TestReport lr_statistic(const LayerSample& sample, const Vector& gamma, const FitResult& fit) {
    check_test_inputs(sample, gamma, fit);
    TestReport report;
    report.layer = sample.s;
    report.n = sample.n;
    report.method = TestMethod::LR;
    report.linf_distance = max_abs(fit.beta_hat - gamma);

    double log_lr = log_lr_difference(sample, gamma, fit.beta_hat);
    if (!std::isfinite(log_lr)) {
        throw ArgumentError("log-likelihood at the null vector is not finite");
    }
    if (log_lr < 0.0) {
        // The gradient at beta_hat is at most fit.tolerance per coordinate, so
        // l(gamma) - l(beta_hat) >= -n tol |gamma - beta_hat|_inf to first order.
        const double partition_scale =
            binomial_real(sample.n, sample.s) * (1.0 + std::abs(gamma.sum())) * DBL_EPSILON;
        const double eps_num =
            10.0 * (sample.n * fit.tolerance * report.linf_distance + partition_scale);
        if (log_lr < -eps_num) {
            std::ostringstream os;
            os << "log LR statistic " << log_lr << " is negative beyond numerical tolerance "
               << eps_num << "; the fit is not a minimiser";
            throw NumericalError(os.str());
        }
        std::ostringstream os;
        os << "log LR statistic " << log_lr << " clamped to 0";
        report.warnings.push_back(os.str());
        log_lr = 0.0;
    }
    report.log_lr = log_lr;
    report.lambda = normalized_lambda(log_lr, sample.n);
    return report;
}

TestReport lr_test(TestReport report, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    report.alpha = alpha;
    const double z = normal_quantile(1.0 - alpha / 2.0);
    report.reject = std::abs(report.lambda) > z;
    report.p_value = two_sided_p(report.lambda);
    return report;
}

LinfCutoff calibrate_linf(const Vector& gamma, int n, int s, double alpha,
                          const LinfCalibration& calibration) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    const double rate = std::sqrt(std::log(static_cast<double>(n)) / std::pow(static_cast<double>(n), s - 1));
    if (const auto* analytic = std::get_if<AnalyticConstant>(&calibration)) {
        if (!(analytic->C > 0.0)) {
            throw ArgumentError("L-infinity constant C must be positive");
        }
        return {2.0 * analytic->C * rate, analytic->C, {}};
    }
    const auto& mc = std::get<MonteCarloCalibration>(calibration);
    if (mc.replicates < 1) {
        throw ArgumentError("calibration needs at least one replicate");
    }
    LayeredParams null_params;
    null_params.n = n;
    null_params.r = s;
    null_params.layers[s] = gamma;
    null_params.validate();

    std::vector<double> stats(mc.replicates, 0.0);
    std::vector<char> failed(mc.replicates, 0);
    parallel_for(mc.replicates, mc.threads, [&](int i) {
        Rng rng = derive_stream_seed(mc.seed, static_cast<std::uint64_t>(i));
        const LayerSample sample = sample_layer(null_params, s, rng);
        try {
            const FitResult fit = fit_layer(sample, mc.fit_config);
            if (!fit.converged) {
                failed[i] = 1;
                return;
            }
            stats[i] = max_abs(fit.beta_hat - gamma);
        } catch (const NumericalError&) {
            failed[i] = 1;
        }
    });
    const auto n_failed = std::count(failed.begin(), failed.end(), 1);
    if (n_failed > 0) {
        throw NumericalError("L-infinity calibration: " + std::to_string(n_failed) + " of " +
                             std::to_string(mc.replicates) + " null replicates failed to fit");
    }
    std::sort(stats.begin(), stats.end());
    const int m = mc.replicates;
    const int k = std::clamp(static_cast<int>(std::ceil((1.0 - alpha) * m)), 1, m);
    const double cutoff = stats[k - 1];
    return {cutoff, cutoff / (2.0 * rate), std::move(stats)};
}

TestReport linf_test(const LayerSample& sample, const Vector& gamma, const FitResult& fit,
                     double alpha, const LinfCutoff& cutoff) {
    check_test_inputs(sample, gamma, fit);
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    TestReport report;
    report.layer = sample.s;
    report.n = sample.n;
    report.method = TestMethod::Linf;
    report.alpha = alpha;
    report.linf_distance = max_abs(fit.beta_hat - gamma);
    report.cutoff = cutoff.cutoff;
    report.linf_constant = cutoff.constant;
    report.reject = report.linf_distance >= cutoff.cutoff && report.linf_distance > 0.0;
    if (!cutoff.null_statistics.empty()) {
        const auto& null = cutoff.null_statistics;
        const auto at_least = null.end() - std::lower_bound(null.begin(), null.end(), report.linf_distance);
        report.p_value = (1.0 + static_cast<double>(at_least)) / (1.0 + static_cast<double>(null.size()));
    }
    return report;
}

TestReport linf_test(const LayerSample& sample, const Vector& gamma, const FitResult& fit,
                     double alpha, const LinfCalibration& calibration) {
    check_test_inputs(sample, gamma, fit);
    return linf_test(sample, gamma, fit, alpha,
                     calibrate_linf(gamma, sample.n, sample.s, alpha, calibration));
}

double predicted_power(double eta, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double mean = -eta / std::numbers::sqrt2;
    // P(X > z) + P(X < -z) for X ~ N(mean, 1)
    return normal_cdf(mean - z) + normal_cdf(-z - mean);
}

SignalReport effective_signal(const Vector& gamma, const Vector& gamma_prime, int n, int s,
                              double alpha) {
    if (gamma.size() != n || gamma_prime.size() != n) {
        throw ArgumentError("effective_signal: vectors must have length n");
    }
    const Vector diff = gamma_prime - gamma;
    SignalReport report;
    report.alpha = alpha;
    report.tau_hat = std::pow(static_cast<double>(n), (2.0 * s - 3.0) / 4.0) * diff.norm();
    const double quad = covariance_quadratic_form(gamma, n, s, diff);
    report.eta_hat = std::max(0.0, quad) / std::sqrt(static_cast<double>(n));
    report.predicted_power = predicted_power(report.eta_hat, alpha);
    return report;
}

}  // namespace hyperbeta
