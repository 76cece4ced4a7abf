#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "hyperbeta/core.hpp"

namespace hyperbeta {

/// Negative log-likelihood of one layer and its first derivatives, evaluated
/// by streaming over all s-subsets of the vertex set.
///
/// The workspace caches the most recent evaluation, keyed by a hash of beta
/// and confirmed by exact comparison, so a line search that re-requests the
/// same point does not repeat the O(C(n, s) s) pass. One writer per workspace.
class LikelihoodWorkspace {
public:
    explicit LikelihoodWorkspace(const LayerSample& sample);

    int n() const { return n_; }
    int s() const { return s_; }
    const DegreeVector& degrees() const { return degrees_; }

    double value(const Vector& beta);
    /// E_beta[d_s] - d_s.
    Vector gradient(const Vector& beta);
    const Vector& expected_degrees(const Vector& beta);

    /// Number of full passes over the edge set performed so far.
    std::int64_t passes() const { return passes_; }

private:
    void refresh(const Vector& beta);

    int n_;
    int s_;
    DegreeVector degrees_;
    Vector degrees_real_;

    bool cache_valid_ = false;
    std::size_t cache_hash_ = 0;
    Vector cache_beta_;
    Vector cache_expected_;
    double cache_value_ = 0.0;
    std::int64_t passes_ = 0;
};

std::size_t hash_vector(const Vector& v);

double neg_log_likelihood(const Vector& beta, const LayerSample& sample);
Vector gradient(const Vector& beta, const LayerSample& sample);

/// E_beta[d_s(v)] for every v.
Vector expected_degrees(const Vector& beta, int n, int s);

/// Var_beta[d_s(v)] for every v: the diagonal of the degree covariance.
Vector degree_variances(const Vector& beta, int n, int s);

/// Dense covariance of the degree vector, which is also the Hessian of the
/// negative log-likelihood. Requires n > s.
DegreeCovariance degree_covariance(const Vector& beta, int n, int s);

/// x' Cov_beta[d_s] x evaluated edge by edge as sum_e psi(1-psi) (sum_{v in e} x_v)^2.
double covariance_quadratic_form(const Vector& beta, int n, int s, const Vector& x);

/// Diagonal surrogate with entries 1 / sigma_s(u)^2. Throws NumericalError on a zero variance.
Eigen::DiagonalMatrix<double, Eigen::Dynamic> gamma_surrogate(const DegreeCovariance& cov);

/// max-norm distance between the diagonal surrogate and the exact inverse covariance.
double gamma_inverse_gap(const Vector& beta, int n, int s);

struct EigenBounds {
    double min_eig;
    double max_eig;
};

/// Extreme eigenvalues of the degree covariance.
EigenBounds hessian_eigen_bounds(const Vector& beta, int n, int s);

/// Guaranteed eigenvalue envelope: the lower bound
/// (1/4) exp(-s (M + |beta - beta_ref|_2)) (C(n-1,s-1) - C(n-2,s-2)) for
/// |beta_ref|_inf <= M, and the upper bound C(n-1,s-1) - C(n-2,s-2) + n C(n-2,s-2).
EigenBounds hessian_eigen_envelope(int n, int s, double bound_M, double dist_to_ref);

}  // namespace hyperbeta
