#include "hyperbeta/inference.hpp"

#include <set>
#include <string>

#include "hyperbeta/likelihood.hpp"
#include "hyperbeta/quantiles.hpp"

namespace hyperbeta {

Vector plugin_sigma(const Vector& beta_hat, int n, int s) {
    const Vector var = degree_variances(beta_hat, n, s);
    for (int v = 0; v < n; ++v) {
        if (!(var[v] > 0.0)) {
            throw NumericalError("plug-in degree variance vanished at vertex " + std::to_string(v + 1));
        }
    }
    return var.cwiseSqrt();
}

void attach_standard_errors(FitResult& fit) {
    fit.stderr_diag = plugin_sigma(fit.beta_hat, fit.n, fit.s).cwiseInverse();
}

const char* to_string(SigmaSource src) {
    return src == SigmaSource::Plugin ? "plugin" : "oracle";
}

Standardized standardize(const FitResult& fit, const Vector& true_beta, SigmaSource source) {
    if (!fit.converged) {
        throw NumericalError("cannot standardize a non-converged fit");
    }
    if (true_beta.size() != fit.n) {
        throw ArgumentError("true beta has wrong length");
    }
    const Vector sigma = source == SigmaSource::Plugin ? plugin_sigma(fit.beta_hat, fit.n, fit.s)
                                                       : plugin_sigma(true_beta, fit.n, fit.s);
    return {sigma.cwiseProduct(fit.beta_hat - true_beta), source};
}

ConfidenceReport confidence_set(const std::map<int, FitResult>& fits,
                                const std::map<int, std::vector<int>>& queries, double alpha,
                                const std::optional<std::map<int, Vector>>& true_beta) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    ConfidenceReport report;
    report.alpha = alpha;
    report.layer_indices = queries;

    const double z = normal_quantile(1.0 - alpha / 2.0);
    double statistic = 0.0;
    int dof = 0;
    for (const auto& [s, vertices] : queries) {
        auto it = fits.find(s);
        if (it == fits.end()) {
            throw ArgumentError("no fit for queried layer " + std::to_string(s));
        }
        const FitResult& fit = it->second;
        if (!fit.converged) {
            throw NumericalError("layer " + std::to_string(s) + " fit did not converge");
        }
        std::set<int> unique(vertices.begin(), vertices.end());
        if (unique.size() != vertices.size()) {
            throw ArgumentError("duplicate vertex in query for layer " + std::to_string(s));
        }
        for (int v : vertices) {
            if (v < 0 || v >= fit.n) {
                throw ArgumentError("queried vertex " + std::to_string(v + 1) + " outside 1.." +
                                    std::to_string(fit.n) + " in layer " + std::to_string(s));
            }
        }
        dof += static_cast<int>(vertices.size());

        const Vector sigma = plugin_sigma(fit.beta_hat, fit.n, fit.s);
        if (true_beta) {
            auto tb = true_beta->find(s);
            if (tb == true_beta->end() || tb->second.size() != fit.n) {
                throw ArgumentError("reference beta missing or wrong length for layer " +
                                    std::to_string(s));
            }
            for (int v : vertices) {
                const double diff = fit.beta_hat[v] - tb->second[v];
                statistic += sigma[v] * sigma[v] * diff * diff;
            }
        }
        if (vertices.size() == 1) {
            const int v = vertices.front();
            const double half = z / sigma[v];
            report.intervals.push_back({s, v, fit.beta_hat[v], fit.beta_hat[v] - half,
                                        fit.beta_hat[v] + half});
        }
    }
    if (dof < 1) {
        throw ArgumentError("confidence set needs at least one queried coordinate");
    }
    report.dof = dof;
    report.threshold = chisq_quantile(1.0 - alpha, dof);
    if (true_beta) {
        report.statistic = statistic;
        report.covered = statistic <= report.threshold;
    }
    return report;
}

}  // namespace hyperbeta
