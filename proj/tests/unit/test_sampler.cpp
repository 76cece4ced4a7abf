#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hyperbeta/sampler.hpp"
#include "oracle.hpp"

using namespace hyperbeta;

TEST_CASE("edge probability") {
    const auto zero = LayeredParams::constant(6, 3, 0.0);
    CHECK(edge_probability(zero, 3, Edge{0, 2, 5}) == 0.5);
    CHECK(edge_probability(zero, 2, Edge{1, 4}) == 0.5);

    auto p = LayeredParams::constant(4, 2, 0.0);
    p.layers[2][0] = std::log(3.0) / 2.0;
    p.layers[2][1] = std::log(3.0) / 2.0;
    CHECK(edge_probability(p, 2, Edge{0, 1}) == doctest::Approx(0.75).epsilon(1e-15));

    const auto neg = LayeredParams::constant(5, 3, -20.0);
    CHECK(edge_probability(neg, 3, Edge{0, 1, 2}) < 1e-25);

    CHECK_THROWS_AS(edge_probability(zero, 3, Edge{0, 1}), ArgumentError);
    CHECK_THROWS_AS(edge_probability(zero, 4, Edge{0, 1, 2, 3}), ArgumentError);
    CHECK_THROWS_AS(edge_probability(zero, 2, Edge{0, 9}), ArgumentError);
}

TEST_CASE("sample_layer handshake identity and edges") {
    const auto params = LayeredParams::constant(9, 4, 0.3);
    for (int s = 2; s <= 4; ++s) {
        Rng rng(derive_seed(5, s));
        const auto sample = sample_layer(params, s, rng, true);
        REQUIRE(sample.edges.has_value());
        const auto total = std::accumulate(sample.degrees.begin(), sample.degrees.end(), std::int64_t{0});
        CHECK(total == static_cast<std::int64_t>(s * sample.edges->size()));
        CHECK(degrees_from_edges(9, *sample.edges) == sample.degrees);
        for (const auto& e : *sample.edges) {
            CHECK(static_cast<int>(e.size()) == s);
            CHECK(std::is_sorted(e.begin(), e.end()));
        }
        CHECK_NOTHROW(sample.validate());
    }
}

TEST_CASE("large beta gives the complete hypergraph") {
    const auto params = LayeredParams::constant(6, 3, 20.0);
    Rng rng(1);
    const auto sample = sample_layer(params, 3, rng, true);
    CHECK(sample.edges->size() == 20);
    for (auto d : sample.degrees) {
        CHECK(d == 10);
    }
}

TEST_CASE("n < s is rejected") {
    auto params = LayeredParams::constant(2, 2, 0.0);
    params.layers[3] = Vector::Zero(2);
    params.r = 3;
    Rng rng(1);
    CHECK_THROWS_WITH_AS(sample_layer(params, 3, rng), doctest::Contains("n < s"), ArgumentError);
}

TEST_CASE("layered sampling uses independent layer streams") {
    const auto params = LayeredParams::constant(7, 4, 0.1);
    const auto all = sample_layered(params, 99);
    CHECK(all.size() == 3);
    for (int s = 2; s <= 4; ++s) {
        Rng rng = layer_stream(99, s);
        const auto alone = sample_layer(params, s, rng);
        CHECK(alone.degrees == all.at(s).degrees);
    }
    CHECK(sample_layered(params, 99).at(3).degrees == all.at(3).degrees);
    CHECK(sample_layered(params, 100).at(3).degrees != all.at(3).degrees);

    const auto r2 = LayeredParams::constant(7, 2, 0.1);
    const auto single = sample_layered(r2, 99);
    CHECK(single.size() == 1);
    CHECK(single.at(2).degrees == all.at(2).degrees);
}

TEST_CASE("layered sampling means at beta = 0") {
    const auto params = LayeredParams::constant(5, 3, 0.0);
    const int reps = 10000;
    std::map<int, double> mean;
    std::map<int, double> sq;
    for (int i = 0; i < reps; ++i) {
        const auto draw = sample_layered(params, derive_seed(3, i));
        for (const auto& [s, sample] : draw) {
            const double d = static_cast<double>(sample.degrees[0]);
            mean[s] += d;
            sq[s] += d * d;
        }
    }
    const std::map<int, double> expected{{2, 2.0}, {3, 3.0}};
    for (const auto& [s, e] : expected) {
        const double m = mean[s] / reps;
        const double var = sq[s] / reps - m * m;
        CHECK(std::abs(m - e) < 3.0 * std::sqrt(var / reps));
    }
}

TEST_CASE("sampler matches the exact degree law on a small instance") {
    auto params = LayeredParams::constant(4, 2, 0.0);
    params.layers[2] << 0.4, -0.3, 0.9, -1.1;
    const auto law = oracle::exact_degree_distribution(params, 2);
    const int reps = 100000;
    std::map<DegreeVector, double> freq;
    Rng rng(2024);
    for (int i = 0; i < reps; ++i) {
        freq[sample_layer(params, 2, rng).degrees] += 1.0 / reps;
    }
    double tv = 0.0;
    for (const auto& [d, p] : law) {
        const auto it = freq.find(d);
        tv += std::abs(p - (it == freq.end() ? 0.0 : it->second));
    }
    for (const auto& [d, f] : freq) {
        CHECK(law.count(d) == 1);
    }
    CHECK(0.5 * tv < 4.0 / std::sqrt(reps));
}
