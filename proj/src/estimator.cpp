#include "hyperbeta/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperbeta/likelihood.hpp"

namespace hyperbeta {

void FitConfig::validate() const {
    if (!(tol_grad > 0.0)) {
        throw ArgumentError("tol_grad must be positive");
    }
    if (!(damping > 0.0 && damping <= 1.0)) {
        throw ArgumentError("damping must lie in (0, 1]");
    }
    if (max_iters < 1 || newton_switch_iters < 0) {
        throw ArgumentError("max_iters must be positive and newton_switch_iters non-negative");
    }
    if (bound_M && !(*bound_M > 0.0)) {
        throw ArgumentError("bound_M must be positive");
    }
}

const char* to_string(FitMethod m) {
    switch (m) {
        case FitMethod::FixedPoint: return "fixed-point";
        case FitMethod::Newton: return "newton";
        case FitMethod::Hybrid: return "hybrid";
    }
    return "unknown";
}

const char* to_string(Existence e) {
    switch (e) {
        case Existence::Interior: return "interior";
        case Existence::Boundary: return "boundary";
        case Existence::Suspect: return "suspect";
    }
    return "unknown";
}

namespace {

void check_fit_shape(const LayerSample& sample) {
    sample.validate();
    if (sample.n <= sample.s) {
        throw ArgumentError("fitting requires n > s (n = " + std::to_string(sample.n) +
                            ", s = " + std::to_string(sample.s) + ")");
    }
}

std::optional<std::string> boundary_message(const LayerSample& sample) {
    const std::int64_t cap = sample.max_degree();
    for (int v = 0; v < sample.n; ++v) {
        const std::int64_t d = sample.degrees[v];
        if (d == 0 || d == cap) {
            std::ostringstream os;
            os << "vertex " << (v + 1) << " has " << (d == 0 ? "zero" : "maximal") << " "
               << sample.s << "-degree " << d << "; the MLE does not exist";
            return os.str();
        }
    }
    return std::nullopt;
}

struct FitTrace {
    FitResult result;
    bool exceeded_bound = false;
};

// Relative slack on likelihood comparisons; values are accurate to roughly
// machine epsilon times the magnitude of the sum.
double ascent_slack(double value) {
    return 1e-12 * std::max(1.0, std::abs(value));
}

FitTrace run_fit(const LayerSample& sample, const FitConfig& config) {
    config.validate();
    check_fit_shape(sample);
    if (auto msg = boundary_message(sample)) {
        throw BoundaryDegreeError("boundary degree: " + *msg, *msg);
    }

    const int n = sample.n;
    const int s = sample.s;
    LikelihoodWorkspace ws(sample);
    Vector log_degrees(n);
    for (int v = 0; v < n; ++v) {
        log_degrees[v] = std::log(static_cast<double>(sample.degrees[v]));
    }

    FitTrace trace;
    FitResult& out = trace.result;
    out.n = n;
    out.s = s;
    out.tolerance = config.tol_grad * std::pow(static_cast<double>(n), s - 1);

    Vector beta = initial_beta(sample);
    double value = ws.value(beta);
    double damping = config.damping;
    int fixed_point_steps = 0;
    int newton_steps = 0;
    bool stalled_fixed_point = false;

    int iter = 0;
    for (;; ++iter) {
        const Vector grad = ws.gradient(beta);
        out.final_grad_norm = max_abs(grad);
        if (max_abs(beta) > kSuspectBetaBound) {
            trace.exceeded_bound = true;
        }
        if (out.final_grad_norm <= out.tolerance) {
            out.converged = true;
            break;
        }
        if (iter >= config.max_iters || !beta.allFinite()) {
            break;
        }

        const bool use_newton = stalled_fixed_point || fixed_point_steps >= config.newton_switch_iters;
        if (!use_newton) {
            const Vector step = log_degrees - ws.expected_degrees(beta).array().log().matrix();
            Vector candidate = beta + damping * step;
            double cand_value = ws.value(candidate);
            while (!(cand_value <= value + ascent_slack(value))) {
                damping *= 0.5;
                if (damping < 1e-10) {
                    stalled_fixed_point = true;
                    break;
                }
                candidate = beta + damping * step;
                cand_value = ws.value(candidate);
            }
            if (stalled_fixed_point) {
                continue;
            }
            beta = std::move(candidate);
            value = cand_value;
            ++fixed_point_steps;
        } else {
            const DegreeCovariance cov = degree_covariance(beta, n, s);
            Eigen::LDLT<Matrix> ldlt(cov.sigma);
            if (ldlt.info() != Eigen::Success) {
                break;
            }
            const Vector direction = ldlt.solve(-grad);
            double t = 1.0;
            Vector candidate = beta + direction;
            double cand_value = ws.value(candidate);
            while (!(cand_value <= value + ascent_slack(value)) && t > 1e-12) {
                t *= 0.5;
                candidate = beta + t * direction;
                cand_value = ws.value(candidate);
            }
            if (!(cand_value <= value + ascent_slack(value))) {
                break;
            }
            beta = std::move(candidate);
            value = cand_value;
            ++newton_steps;
        }
    }

    out.iters = iter;
    out.beta_hat = std::move(beta);
    if (newton_steps == 0) {
        out.method_used = FitMethod::FixedPoint;
    } else if (fixed_point_steps == 0) {
        out.method_used = FitMethod::Newton;
    } else {
        out.method_used = FitMethod::Hybrid;
    }

    std::vector<std::string> warnings;
    if (trace.exceeded_bound) {
        warnings.push_back("iterates exceeded |beta|_inf > 30; the MLE may not exist");
    }
    if (config.bound_M && out.beta_hat.allFinite() && max_abs(out.beta_hat) > *config.bound_M) {
        std::ostringstream os;
        os << "|beta_hat|_inf = " << max_abs(out.beta_hat) << " exceeds declared bound M = "
           << *config.bound_M;
        warnings.push_back(os.str());
    }
    if (!warnings.empty()) {
        std::string joined = warnings.front();
        for (std::size_t i = 1; i < warnings.size(); ++i) {
            joined += "; " + warnings[i];
        }
        out.existence_warning = joined;
    }
    return trace;
}

}  // namespace

Vector initial_beta(const LayerSample& sample) {
    const double cap = static_cast<double>(sample.max_degree());
    const double eps = 1.0 / (2.0 * cap);
    Vector beta(sample.n);
    for (int v = 0; v < sample.n; ++v) {
        const double p = std::clamp(static_cast<double>(sample.degrees[v]) / cap, eps, 1.0 - eps);
        beta[v] = std::log(p / (1.0 - p)) / sample.s;
    }
    return beta;
}

FitResult fit_layer(const LayerSample& sample, const FitConfig& config) {
    return run_fit(sample, config).result;
}

std::map<int, LayerFitOutcome> fit_all_layers(const std::map<int, LayerSample>& samples,
                                              const FitConfig& config) {
    std::map<int, LayerFitOutcome> out;
    for (const auto& [s, sample] : samples) {
        try {
            out.emplace(s, fit_layer(sample, config));
        } catch (const BoundaryDegreeError& e) {
            out.emplace(s, LayerFitError{e.what(), e.existence_warning});
        } catch (const std::exception& e) {
            out.emplace(s, LayerFitError{e.what(), std::nullopt});
        }
    }
    return out;
}

Existence existence_diagnostic(const LayerSample& sample, const FitConfig& config) {
    sample.validate();
    if (boundary_message(sample)) {
        return Existence::Boundary;
    }
    const FitTrace trace = run_fit(sample, config);
    if (trace.exceeded_bound) {
        return Existence::Suspect;
    }
    return Existence::Interior;
}

}  // namespace hyperbeta
