#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hyperbeta {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using DegreeVector = std::vector<std::int64_t>;
using Edge = std::vector<int>;

// Error taxonomy. The CLI maps these onto exit codes.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Stable logistic link e^x / (1 + e^x).
inline double logistic(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// log(1 + e^x) without overflow; for large x this is x + log1p(e^{-x}).
inline double log1p_exp(double x) {
    if (x > 0.0) {
        return x + std::log1p(std::exp(-x));
    }
    return std::log1p(std::exp(x));
}

/// Logistic value and log1p_exp from a single exponential.
struct LinkValues {
    double prob;
    double log_partition;
};

inline LinkValues link_values(double x) {
    const double e = std::exp(-std::abs(x));
    const double lp = std::log1p(e);
    if (x >= 0.0) {
        return {1.0 / (1.0 + e), x + lp};
    }
    return {e / (1.0 + e), lp};
}

/// Binomial coefficient C(n, k) as a 64-bit count. Throws ArgumentError on overflow.
std::int64_t binomial(std::int64_t n, std::int64_t k);

/// Binomial coefficient as a double; exact for every value that fits in 53 bits.
double binomial_real(std::int64_t n, std::int64_t k);

/// Parameter bundle B = (beta_2, ..., beta_r) of the layered model.
struct LayeredParams {
    int n = 0;
    int r = 0;
    std::map<int, Vector> layers;
    std::optional<double> bound_M;

    const Vector& layer(int s) const;
    bool has_layer(int s) const { return layers.count(s) != 0; }

    /// Throws ArgumentError if any invariant is violated.
    void validate() const;

    /// Every layer s = 2..r set to the constant vector c.
    static LayeredParams constant(int n, int r, double c);
    static LayeredParams constant(int n, const std::vector<int>& layer_sizes, double c);
};

/// Sufficient statistic of one layer, optionally with the realised edge list.
struct LayerSample {
    int n = 0;
    int s = 0;
    DegreeVector degrees;
    std::optional<std::vector<Edge>> edges;

    std::int64_t max_degree() const { return binomial(n - 1, s - 1); }

    /// Degree bounds, handshake identity, and edge-incidence consistency.
    void validate() const;
};

/// Degrees from an explicit list of s-subsets.
DegreeVector degrees_from_edges(int n, const std::vector<Edge>& edges);

/// Covariance of the s-degree vector and its diagonal surrogate.
struct DegreeCovariance {
    int n = 0;
    int s = 0;
    Matrix sigma;
    Vector gamma_diag;
};

double max_abs(const Vector& v);

}  // namespace hyperbeta
