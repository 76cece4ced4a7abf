#include "hyperbeta/likelihood.hpp"

#include <bit>
#include <cstring>
#include <string>

#include <Eigen/Eigenvalues>

#include "hyperbeta/combinatorics.hpp"

namespace hyperbeta {

namespace {

void check_shape(const Vector& beta, int n, int s) {
    if (beta.size() != n) {
        throw ArgumentError("beta has length " + std::to_string(beta.size()) + ", expected " +
                            std::to_string(n));
    }
    if (s < 2 || n < s) {
        throw ArgumentError("invalid layer shape n = " + std::to_string(n) +
                            ", s = " + std::to_string(s));
    }
    (void)binomial(n, s);
}

void check_covariance_shape(const Vector& beta, int n, int s) {
    check_shape(beta, n, s);
    if (n <= s) {
        throw ArgumentError("degree covariance requires n > s (n = " + std::to_string(n) +
                            ", s = " + std::to_string(s) + ")");
    }
}

// Neumaier compensated accumulator.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    double total() const { return sum + carry; }
};

}  // namespace

std::size_t hash_vector(const Vector& v) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        h ^= std::bit_cast<std::uint64_t>(v[i]);
        h *= 0x100000001b3ULL;
        h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
}

LikelihoodWorkspace::LikelihoodWorkspace(const LayerSample& sample)
    : n_(sample.n), s_(sample.s), degrees_(sample.degrees) {
    if (static_cast<int>(degrees_.size()) != n_) {
        throw ArgumentError("degree vector length does not match n");
    }
    degrees_real_.resize(n_);
    for (int v = 0; v < n_; ++v) {
        degrees_real_[v] = static_cast<double>(degrees_[v]);
    }
}

void LikelihoodWorkspace::refresh(const Vector& beta) {
    check_shape(beta, n_, s_);
    const std::size_t h = hash_vector(beta);
    if (cache_valid_ && h == cache_hash_ && cache_beta_ == beta) {
        return;
    }
    cache_expected_.setZero(n_);
    CompensatedSum partition;
    for_each_subset_sum(n_, s_, beta, [&](std::span<const int> members, double sum) {
        const LinkValues lv = link_values(sum);
        partition.add(lv.log_partition);
        for (int v : members) {
            cache_expected_[v] += lv.prob;
        }
    });
    cache_value_ = partition.total() - beta.dot(degrees_real_);
    cache_beta_ = beta;
    cache_hash_ = h;
    cache_valid_ = true;
    ++passes_;
}

double LikelihoodWorkspace::value(const Vector& beta) {
    refresh(beta);
    return cache_value_;
}

const Vector& LikelihoodWorkspace::expected_degrees(const Vector& beta) {
    refresh(beta);
    return cache_expected_;
}

Vector LikelihoodWorkspace::gradient(const Vector& beta) {
    refresh(beta);
    return cache_expected_ - degrees_real_;
}

double neg_log_likelihood(const Vector& beta, const LayerSample& sample) {
    LikelihoodWorkspace ws(sample);
    return ws.value(beta);
}

Vector gradient(const Vector& beta, const LayerSample& sample) {
    LikelihoodWorkspace ws(sample);
    return ws.gradient(beta);
}

Vector expected_degrees(const Vector& beta, int n, int s) {
    check_shape(beta, n, s);
    Vector e = Vector::Zero(n);
    for_each_subset_sum(n, s, beta, [&](std::span<const int> members, double sum) {
        const double p = logistic(sum);
        for (int v : members) {
            e[v] += p;
        }
    });
    return e;
}

Vector degree_variances(const Vector& beta, int n, int s) {
    check_shape(beta, n, s);
    Vector var = Vector::Zero(n);
    for_each_subset_sum(n, s, beta, [&](std::span<const int> members, double sum) {
        const double p = logistic(sum);
        const double w = p * (1.0 - p);
        for (int v : members) {
            var[v] += w;
        }
    });
    return var;
}

DegreeCovariance degree_covariance(const Vector& beta, int n, int s) {
    check_covariance_shape(beta, n, s);
    DegreeCovariance cov;
    cov.n = n;
    cov.s = s;
    cov.sigma.setZero(n, n);
    // Upper triangle only; mirrored afterwards.
    for_each_subset_sum(n, s, beta, [&](std::span<const int> members, double sum) {
        const double p = logistic(sum);
        const double w = p * (1.0 - p);
        for (std::size_t a = 0; a < members.size(); ++a) {
            const int u = members[a];
            cov.sigma(u, u) += w;
            for (std::size_t b = a + 1; b < members.size(); ++b) {
                cov.sigma(u, members[b]) += w;
            }
        }
    });
    cov.sigma.triangularView<Eigen::StrictlyLower>() = cov.sigma.transpose();
    cov.gamma_diag = cov.sigma.diagonal().cwiseInverse();
    return cov;
}

double covariance_quadratic_form(const Vector& beta, int n, int s, const Vector& x) {
    check_shape(beta, n, s);
    if (x.size() != n) {
        throw ArgumentError("direction vector has wrong length");
    }
    CompensatedSum acc;
    for_each_subset_sum(n, s, beta, [&](std::span<const int> members, double sum) {
        const double p = logistic(sum);
        double proj = 0.0;
        for (int v : members) {
            proj += x[v];
        }
        acc.add(p * (1.0 - p) * proj * proj);
    });
    return acc.total();
}

Eigen::DiagonalMatrix<double, Eigen::Dynamic> gamma_surrogate(const DegreeCovariance& cov) {
    const Vector diag = cov.sigma.diagonal();
    for (Eigen::Index v = 0; v < diag.size(); ++v) {
        if (!(diag[v] > 0.0)) {
            throw NumericalError("degenerate model: zero degree variance at vertex " +
                                 std::to_string(v + 1));
        }
    }
    return Eigen::DiagonalMatrix<double, Eigen::Dynamic>(diag.cwiseInverse());
}

double gamma_inverse_gap(const Vector& beta, int n, int s) {
    const DegreeCovariance cov = degree_covariance(beta, n, s);
    const auto gamma = gamma_surrogate(cov);
    Eigen::LLT<Matrix> llt(cov.sigma);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(cov.sigma, Eigen::EigenvaluesOnly);
        const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
        throw NumericalError("degree covariance is not positive definite (condition estimate " +
                             std::to_string(cond) + ")");
    }
    const Matrix inverse = llt.solve(Matrix::Identity(n, n));
    Matrix diff = -inverse;
    diff.diagonal() += gamma.diagonal();
    return diff.cwiseAbs().maxCoeff();
}

EigenBounds hessian_eigen_bounds(const Vector& beta, int n, int s) {
    const DegreeCovariance cov = degree_covariance(beta, n, s);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov.sigma, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw NumericalError("eigen-solve of degree covariance failed");
    }
    return {es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff()};
}

EigenBounds hessian_eigen_envelope(int n, int s, double bound_M, double dist_to_ref) {
    const double c1 = binomial_real(n - 1, s - 1);
    const double c2 = binomial_real(n - 2, s - 2);
    const double lower = 0.25 * std::exp(-s * (bound_M + dist_to_ref)) * (c1 - c2);
    const double upper = 0.25 * (c1 - c2 + n * c2);
    return {lower, upper};
}

}  // namespace hyperbeta
