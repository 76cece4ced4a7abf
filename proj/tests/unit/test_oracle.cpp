#include <cmath>

#include "doctest.h"
#include "oracle.hpp"

using namespace hyperbeta;

TEST_CASE("edge enumeration") {
    CHECK(oracle::all_edges(6, 3).size() == 20);
    CHECK(oracle::all_edges(4, 2).front() == Edge{0, 1});
}

TEST_CASE("exact degree law at beta = 0") {
    const auto law3 = oracle::exact_degree_distribution(LayeredParams::constant(3, 2, 0.0), 2);
    double total = 0.0;
    for (const auto& [d, p] : law3) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(law3.at(DegreeVector{2, 2, 2}) == doctest::Approx(0.125).epsilon(1e-14));

    const auto law4 = oracle::exact_degree_distribution(LayeredParams::constant(4, 2, 0.0), 2);
    double low = 0.0;
    for (const auto& [d, p] : law4) {
        if (*std::max_element(d.begin(), d.end()) <= 1) low += p;
    }
    CHECK(low == doctest::Approx(10.0 / 64.0).epsilon(1e-14));

    CHECK_THROWS(oracle::exact_degree_distribution(LayeredParams::constant(7, 2, 0.0), 2));
}

TEST_CASE("brute-force minimizer") {
    const LayerSample half{5, 3, {3, 3, 3, 3, 3}, std::nullopt};
    CHECK(oracle::brute_force_mle(half).cwiseAbs().maxCoeff() < 1e-6);

    const LayerSample two{4, 2, {2, 2, 2, 2}, std::nullopt};
    const Vector b = oracle::brute_force_mle(two);
    for (int v = 0; v < 4; ++v) {
        CHECK(std::abs(b[v] - std::log(2.0) / 2.0) < 1e-4);
    }

    CHECK_THROWS(oracle::brute_force_mle(LayerSample{4, 2, {3, 1, 1, 1}, std::nullopt}));
    CHECK_THROWS(oracle::brute_force_mle(LayerSample{7, 2, DegreeVector(7, 3), std::nullopt}));
}

TEST_CASE("finite differences at the symmetric point") {
    const LayerSample s{6, 3, {1, 4, 9, 10, 5, 2}, std::nullopt};
    const Vector g = oracle::fd_gradient(Vector::Zero(6), s, 1e-5);
    for (int v = 0; v < 6; ++v) {
        CHECK(std::abs(g[v] - (5.0 - static_cast<double>(s.degrees[v]))) < 1e-6);
    }
    const Matrix h = oracle::fd_hessian(Vector::Zero(6), s, 1e-4);
    CHECK(std::abs(h(0, 0) - 2.5) < 1e-4);
    CHECK(std::abs(h(0, 1) - 1.0) < 1e-4);
}
