#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>

#include "hyperbeta/core.hpp"

namespace hyperbeta {

struct FitConfig {
    double tol_grad = 1e-8;       // stop when |grad|_inf <= tol_grad * n^(s-1)
    int max_iters = 5000;
    double damping = 1.0;         // initial fixed-point damping, halved on ascent
    int newton_switch_iters = 200;
    std::optional<double> bound_M;

    void validate() const;
};

enum class FitMethod { FixedPoint, Newton, Hybrid };

const char* to_string(FitMethod m);

struct FitResult {
    int n = 0;
    int s = 0;
    Vector beta_hat;
    bool converged = false;
    int iters = 0;
    double final_grad_norm = 0.0;
    double tolerance = 0.0;  // tol_grad * n^(s-1)
    FitMethod method_used = FitMethod::FixedPoint;
    std::optional<std::string> existence_warning;
    Vector stderr_diag;  // 1 / sigma_hat_s(v); filled by attach_standard_errors
};

/// Degree sequence with a vertex at 0 or C(n-1, s-1): the MLE does not exist.
struct BoundaryDegreeError : NumericalError {
    BoundaryDegreeError(const std::string& what, std::string warning)
        : NumericalError(what), existence_warning(std::move(warning)) {}
    std::string existence_warning;
};

/// Starting point (1/s) logit(clamp(d / C(n-1,s-1), eps, 1 - eps)), eps = 1 / (2 C(n-1,s-1)).
Vector initial_beta(const LayerSample& sample);

/// Maximum-likelihood fit of one layer.
///
/// The main loop is the damped fixed-point map
///   beta_v <- beta_v + damping * log(d_s(v) / E_beta[d_s(v)]),
/// which is the classical beta-model iteration
///   beta_v <- log d_s(v) - log sum_{e'} e^{S(e')} / (1 + e^{beta_v + S(e')})
/// written in terms of the expected degree. A step that raises the negative
/// log-likelihood is rejected and the damping halved. After
/// newton_switch_iters fixed-point steps without convergence the solver
/// switches to Newton on the dense degree covariance with step halving.
///
/// Throws BoundaryDegreeError if any degree is 0 or maximal. Non-convergence
/// is reported through FitResult::converged, not thrown.
FitResult fit_layer(const LayerSample& sample, const FitConfig& config = {});

struct LayerFitError {
    std::string message;
    std::optional<std::string> existence_warning;
};

using LayerFitOutcome = std::variant<FitResult, LayerFitError>;

/// Fits every layer independently; a failing layer does not stop the others.
std::map<int, LayerFitOutcome> fit_all_layers(const std::map<int, LayerSample>& samples,
                                              const FitConfig& config = {});

enum class Existence { Interior, Boundary, Suspect };

const char* to_string(Existence e);

/// boundary: some degree is 0 or maximal; suspect: the iteration drives
/// |beta|_inf above 30 before converging; otherwise interior.
Existence existence_diagnostic(const LayerSample& sample, const FitConfig& config = {});

/// |beta|_inf threshold used by existence_diagnostic.
inline constexpr double kSuspectBetaBound = 30.0;

}  // namespace hyperbeta
