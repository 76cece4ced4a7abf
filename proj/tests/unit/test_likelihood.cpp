#include <cmath>

#include "doctest.h"
#include "hyperbeta/likelihood.hpp"
#include "hyperbeta/sampler.hpp"
#include "oracle.hpp"

using namespace hyperbeta;

namespace {

Vector random_beta(Rng& rng, int n, double scale) {
    Vector b(n);
    for (int v = 0; v < n; ++v) {
        b[v] = scale * (2.0 * rng.uniform() - 1.0);
    }
    return b;
}

LayerSample draw(int n, int s, const Vector& beta, std::uint64_t seed) {
    LayeredParams p;
    p.n = n;
    p.r = s;
    p.layers[s] = beta;
    Rng rng(seed);
    return sample_layer(p, s, rng);
}

}  // namespace

TEST_CASE("negative log-likelihood at beta = 0") {
    const LayerSample a{5, 3, {3, 3, 3, 3, 3}, std::nullopt};
    CHECK(neg_log_likelihood(Vector::Zero(5), a) == doctest::Approx(10.0 * std::log(2.0)).epsilon(1e-14));
    const LayerSample b{4, 2, {0, 3, 1, 2}, std::nullopt};
    CHECK(neg_log_likelihood(Vector::Zero(4), b) == doctest::Approx(6.0 * std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(neg_log_likelihood(Vector::Zero(3), b), ArgumentError);
}

TEST_CASE("negative log-likelihood agrees with the oracle") {
    Rng rng(8);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + trial % 3;
        const int s = 2 + trial % 2;
        const Vector beta = random_beta(rng, n, 1.5);
        const auto sample = draw(n, s, beta, trial);
        const Vector at = random_beta(rng, n, 1.0);
        CHECK(neg_log_likelihood(at, sample) ==
              doctest::Approx(oracle::neg_log_likelihood(at, s, sample.degrees)).epsilon(1e-13));
    }
}

TEST_CASE("gradient") {
    const LayerSample sym{5, 3, {3, 3, 3, 3, 3}, std::nullopt};
    CHECK(max_abs(gradient(Vector::Zero(5), sym)) < 1e-14);

    const LayerSample b{6, 3, {1, 4, 9, 10, 5, 0}, std::nullopt};
    const Vector g = gradient(Vector::Zero(6), b);
    for (int v = 0; v < 6; ++v) {
        CHECK(g[v] == doctest::Approx(5.0 - static_cast<double>(b.degrees[v])));
    }

    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector beta = random_beta(rng, 5, 1.0);
        const auto sample = draw(5, 2, beta, 100 + trial);
        const Vector at = random_beta(rng, 5, 1.0);
        const Vector fd = oracle::fd_gradient(at, sample, 1e-5);
        CHECK((gradient(at, sample) - fd).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("workspace caches and matches the free functions") {
    Rng rng(4);
    const Vector beta = random_beta(rng, 9, 0.5);
    const auto sample = draw(9, 3, beta, 1);
    LikelihoodWorkspace ws(sample);
    const Vector at = random_beta(rng, 9, 0.5);
    const double v = ws.value(at);
    const Vector g = ws.gradient(at);
    CHECK(ws.passes() == 1);
    CHECK(v == doctest::Approx(neg_log_likelihood(at, sample)).epsilon(1e-14));
    CHECK((g - gradient(at, sample)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ws.expected_degrees(at) - expected_degrees(at, 9, 3)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ws.passes() == 1);
    Vector moved = at;
    moved[2] += 1e-3;
    ws.value(moved);
    CHECK(ws.passes() == 2);
}

TEST_CASE("degree covariance") {
    const auto cov = degree_covariance(Vector::Zero(5), 5, 3);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            CHECK(cov.sigma(i, j) == doctest::Approx(i == j ? 1.5 : 0.75).epsilon(1e-15));
        }
        CHECK(cov.gamma_diag[i] == doctest::Approx(1.0 / 1.5).epsilon(1e-15));
    }
    CHECK(cov.sigma.isApprox(cov.sigma.transpose(), 0.0));

    Rng rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const Vector beta = random_beta(rng, 5, 1.0);
        const auto sample = draw(5, 2, beta, 200 + trial);
        const Vector at = random_beta(rng, 5, 1.0);
        const Matrix fd = oracle::fd_hessian(at, sample, 1e-4);
        CHECK((degree_covariance(at, 5, 2).sigma - fd).cwiseAbs().maxCoeff() < 1e-5);
    }

    const Vector var = degree_variances(Vector::Constant(7, 0.3), 7, 3);
    const auto full = degree_covariance(Vector::Constant(7, 0.3), 7, 3);
    CHECK((var - full.sigma.diagonal()).cwiseAbs().maxCoeff() < 1e-13);

    CHECK_THROWS_AS(degree_covariance(Vector::Zero(3), 3, 3), ArgumentError);
}

TEST_CASE("streaming quadratic form matches the dense covariance") {
    Rng rng(31);
    for (int s = 2; s <= 4; ++s) {
        const Vector beta = random_beta(rng, 8, 0.8);
        const Vector x = random_beta(rng, 8, 1.0);
        const auto cov = degree_covariance(beta, 8, s);
        CHECK(covariance_quadratic_form(beta, 8, s, x) ==
              doctest::Approx(x.dot(cov.sigma * x)).epsilon(1e-12));
    }
}

TEST_CASE("gamma surrogate and inverse gap") {
    const auto cov = degree_covariance(Vector::Zero(5), 5, 3);
    const auto gamma = gamma_surrogate(cov);
    CHECK(gamma.diagonal()[0] == doctest::Approx(2.0 / 3.0));

    DegreeCovariance bad = cov;
    bad.sigma(2, 2) = 0.0;
    CHECK_THROWS_AS(gamma_surrogate(bad), NumericalError);

    CHECK(gamma_inverse_gap(Vector::Zero(10), 10, 3) < gamma_inverse_gap(Vector::Zero(10), 10, 2));
    double prev = 1e300;
    for (int n : {8, 12, 16, 24}) {
        const double gap = gamma_inverse_gap(Vector::Zero(n), n, 2);
        CHECK(gap < prev);
        prev = gap;
    }
    CHECK_THROWS_AS(gamma_inverse_gap(Vector::Zero(3), 3, 3), ArgumentError);
}

TEST_CASE("Hessian eigenvalue bounds") {
    const auto b42 = hessian_eigen_bounds(Vector::Zero(4), 4, 2);
    CHECK(b42.min_eig == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(b42.max_eig == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(hessian_eigen_bounds(Vector::Zero(6), 6, 3).min_eig == doctest::Approx(1.5).epsilon(1e-12));

    Rng rng(44);
    for (int trial = 0; trial < 5; ++trial) {
        const double M = 1.0;
        const Vector beta = random_beta(rng, 7, M);
        const auto exact = hessian_eigen_bounds(beta, 7, 3);
        const auto env = hessian_eigen_envelope(7, 3, M, 0.0);
        CHECK(exact.min_eig >= env.min_eig);
        CHECK(exact.max_eig <= env.max_eig + 1e-12);
    }
}
