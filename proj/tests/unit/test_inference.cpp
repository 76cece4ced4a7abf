#include <cmath>

#include "doctest.h"
#include "hyperbeta/estimator.hpp"
#include "hyperbeta/inference.hpp"
#include "hyperbeta/likelihood.hpp"
#include "hyperbeta/quantiles.hpp"
#include "hyperbeta/sampler.hpp"
#include "oracle.hpp"

using namespace hyperbeta;

namespace {

FitResult fit_at(const Vector& beta, int s) {
    FitResult f;
    f.n = static_cast<int>(beta.size());
    f.s = s;
    f.beta_hat = beta;
    f.converged = true;
    return f;
}

}  // namespace

TEST_CASE("plug-in variances") {
    const Vector v5 = plugin_sigma(Vector::Zero(5), 5, 3);
    for (int v = 0; v < 5; ++v) CHECK(v5[v] * v5[v] == doctest::Approx(1.5).epsilon(1e-14));

    const Vector v400 = plugin_sigma(Vector::Zero(400), 400, 3);
    CHECK(v400[17] * v400[17] == doctest::Approx(19850.25).epsilon(1e-13));

    // Direct re-summation over all edges containing each vertex.
    Vector beta(6);
    beta << 0.3, -0.8, 1.1, 0.0, -0.2, 0.5;
    const Vector sig = plugin_sigma(beta, 6, 2);
    for (int v = 0; v < 6; ++v) {
        double var = 0.0;
        for (const auto& e : oracle::all_edges(6, 2)) {
            if (e[0] != v && e[1] != v) continue;
            const double p = 1.0 / (1.0 + std::exp(-(beta[e[0]] + beta[e[1]])));
            var += p * (1.0 - p);
        }
        CHECK(sig[v] * sig[v] == doctest::Approx(var).epsilon(1e-13));
        CHECK(sig[v] * sig[v] == doctest::Approx(degree_covariance(beta, 6, 2).sigma(v, v)).epsilon(1e-13));
    }

    FitResult f = fit_at(beta, 2);
    attach_standard_errors(f);
    CHECK(f.stderr_diag[2] == doctest::Approx(1.0 / sig[2]));
}

TEST_CASE("standardize") {
    Vector beta(6);
    beta << 0.3, -0.8, 1.1, 0.0, -0.2, 0.5;
    const FitResult f = fit_at(beta, 2);
    CHECK(max_abs(standardize(f, beta).z) == 0.0);

    Vector truth = beta;
    truth[0] -= 0.1;
    const auto z = standardize(f, truth, SigmaSource::Oracle);
    CHECK(z.source == SigmaSource::Oracle);
    CHECK(z.z[0] == doctest::Approx(0.1 * plugin_sigma(truth, 6, 2)[0]));

    FitResult bad = f;
    bad.converged = false;
    CHECK_THROWS_AS(standardize(bad, beta), NumericalError);
    CHECK_THROWS_AS(standardize(f, Vector::Zero(4)), ArgumentError);
}

TEST_CASE("confidence sets") {
    std::map<int, FitResult> fits;
    fits[2] = fit_at(Vector::Constant(8, 0.2), 2);
    fits[3] = fit_at(Vector::Constant(8, -0.1), 3);

    const auto single = confidence_set(fits, {{2, {1}}}, 0.05, std::map<int, Vector>{{2, Vector::Constant(8, 0.2)}});
    CHECK(single.dof == 1);
    CHECK(single.threshold == doctest::Approx(chisq_quantile(0.95, 1)));
    REQUIRE(single.statistic.has_value());
    CHECK(*single.statistic == 0.0);
    CHECK(*single.covered);
    REQUIRE(single.intervals.size() == 1);
    const auto& iv = single.intervals[0];
    const double half = normal_quantile(0.975) / plugin_sigma(Vector::Constant(8, 0.2), 8, 2)[1];
    CHECK(iv.low == doctest::Approx(0.2 - half));
    CHECK(iv.high == doctest::Approx(0.2 + half));

    const auto joint = confidence_set(fits, {{2, {0, 4}}, {3, {7}}}, 0.05);
    CHECK(joint.dof == 3);
    CHECK(joint.threshold == doctest::Approx(7.8147).epsilon(1e-5));
    CHECK_FALSE(joint.statistic.has_value());
    CHECK(joint.intervals.size() == 1);

    // Wider level, narrower set.
    const auto loose = confidence_set(fits, {{2, {1}}}, 0.5);
    CHECK(loose.intervals[0].high - loose.intervals[0].low < iv.high - iv.low);

    CHECK_THROWS_AS(confidence_set(fits, {{4, {0}}}, 0.05), ArgumentError);
    CHECK_THROWS_AS(confidence_set(fits, {{2, {8}}}, 0.05), ArgumentError);
    CHECK_THROWS_AS(confidence_set(fits, {{2, {1, 1}}}, 0.05), ArgumentError);
    CHECK_THROWS_AS(confidence_set(fits, {{2, {1}}}, 1.5), ArgumentError);
}

TEST_CASE("a far-off truth is not covered") {
    std::map<int, FitResult> fits;
    fits[3] = fit_at(Vector::Zero(10), 3);
    const auto rep = confidence_set(fits, {{3, {0, 1}}}, 0.05, std::map<int, Vector>{{3, Vector::Constant(10, 2.0)}});
    CHECK_FALSE(*rep.covered);
    CHECK(*rep.statistic > rep.threshold);
}

TEST_CASE("standardized estimates are roughly standard normal") {
    const int n = 40, s = 3, reps = 150;
    const auto params = LayeredParams::constant(n, s, 0.0);
    std::vector<double> z;
    for (int i = 0; i < reps; ++i) {
        Rng rng(derive_seed(31, i));
        const auto fit = fit_layer(sample_layer(params, s, rng));
        z.push_back(standardize(fit, Vector::Zero(n)).z[0]);
    }
    double m = 0.0, v = 0.0;
    for (double x : z) m += x;
    m /= reps;
    for (double x : z) v += (x - m) * (x - m);
    v /= reps - 1;
    CHECK(std::abs(m) < 0.3);
    CHECK(v > 0.7);
    CHECK(v < 1.4);
}
