#include <cmath>
#include <sstream>

#include "doctest.h"
#include "hyperbeta/experiments.hpp"
#include "hyperbeta/quantiles.hpp"

using namespace hyperbeta;

namespace {

ExperimentSpec small(ExperimentKind kind) {
    ExperimentSpec spec;
    spec.kind = kind;
    spec.n_values = {30};
    spec.layers = {3};
    spec.replicates = 40;
    spec.master_seed = 5;
    spec.threads = 1;
    return spec;
}

std::string csv_of(const ExperimentSpec& spec) {
    std::ostringstream out;
    run_experiment(spec, out);
    return out.str();
}

}  // namespace

TEST_CASE("statistics helpers") {
    CHECK(mean_of({1.0, 2.0, 3.0}) == 2.0);
    CHECK(variance_of({1.0, 2.0, 3.0}) == 1.0);
    CHECK(median_of({5.0, 1.0, 3.0}) == 3.0);
    CHECK(median_of({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK(linspace(0.0, 1.0, 5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(linspace(0.3, 0.9, 1) == std::vector<double>{0.3});

    std::vector<double> exact;
    for (int i = 1; i <= 100; ++i) exact.push_back(normal_quantile((i - 0.5) / 100.0));
    CHECK(ks_distance_normal(exact) == doctest::Approx(0.005).epsilon(1e-9));
    CHECK(ks_distance_normal({10.0, 11.0}) > 0.99);
}

TEST_CASE("spec parsing") {
    std::istringstream in(
        "# comment\n"
        "kind = power\n"
        "n = 120\n"
        "layers = 2,3\n"
        "replicates = 17\n"
        "seed = 99\n"
        "grid_points = 4\n"
        "direction = fixed\n"
        "vertex = 2\n"
        "sigma = oracle\n"
        "tol_grad = 1e-9\n"
        "threads = 2\n");
    const auto spec = parse_experiment_spec(in);
    CHECK(spec.kind == ExperimentKind::Power);
    CHECK(spec.n() == 120);
    CHECK(spec.layers == std::vector<int>{2, 3});
    CHECK(spec.replicates == 17);
    CHECK(spec.master_seed == 99);
    CHECK(spec.signal_grid.size() == 4);
    CHECK_FALSE(spec.redraw_direction);
    CHECK(spec.vertex == 1);
    CHECK(spec.sigma_source == SigmaSource::Oracle);
    CHECK(spec.fit.tol_grad == 1e-9);
    CHECK(spec.threads == 2);

    std::istringstream unknown("kind = qq\nbogus = 1\n");
    CHECK_THROWS_AS(parse_experiment_spec(unknown), ArgumentError);
    std::istringstream nokind("n = 10\n");
    CHECK_THROWS_AS(parse_experiment_spec(nokind), ArgumentError);
    std::istringstream badnum("kind = qq\nn = ten\n");
    CHECK_THROWS_AS(parse_experiment_spec(badnum), ArgumentError);
    CHECK_THROWS_AS(parse_experiment_kind("histogram"), ArgumentError);
    CHECK_THROWS_AS(load_experiment_spec("/nonexistent/spec.txt"), IoError);

    auto bad = small(ExperimentKind::QQ);
    bad.n_values = {3};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = small(ExperimentKind::Power);
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad.signal_grid = {0.5, 1.5};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("qq experiment") {
    auto spec = small(ExperimentKind::QQ);
    spec.layers = {2};
    const auto r = run_qq(spec);
    CHECK(r.completed + r.excluded == spec.replicates);
    CHECK(r.rows.size() == static_cast<std::size_t>(r.completed));
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].empirical_quantile >= r.rows[i - 1].empirical_quantile);
        CHECK(r.rows[i].normal_quantile > r.rows[i - 1].normal_quantile);
    }
    CHECK(r.rows.front().plotting_position == doctest::Approx(0.5 / r.completed));

    auto doubled = spec;
    doubled.replicates = 80;
    const auto r2 = run_qq(doubled);
    const double gap1 = r.rows[1].plotting_position - r.rows[0].plotting_position;
    const double gap2 = r2.rows[1].plotting_position - r2.rows[0].plotting_position;
    if (r.excluded == 0 && r2.excluded == 0) {
        CHECK(gap2 == doctest::Approx(gap1 / 2.0));
    }
    CHECK(r.ks_distance < 0.3);
}

TEST_CASE("coverage experiment") {
    auto spec = small(ExperimentKind::Coverage);
    spec.replicates = 100;
    const auto r = run_coverage(spec);
    CHECK(r.completed == 100);
    CHECK(r.coverage >= 0.85);

    spec.alpha = 0.5;
    spec.replicates = 200;
    const auto half = run_coverage(spec);
    CHECK(std::abs(half.coverage - 0.5) <= 0.15);
    CHECK(half.rows[0].high - half.rows[0].low < r.rows[0].high - r.rows[0].low);
}

TEST_CASE("failed fits are excluded and counted") {
    auto spec = small(ExperimentKind::Coverage);
    spec.n_values = {5};
    spec.layers = {2};
    spec.beta_const = 1.5;
    spec.replicates = 50;
    CHECK_THROWS_AS(run_coverage(spec), NumericalError);
    spec.max_failure_fraction = 1.0;
    const auto r = run_coverage(spec);
    CHECK(r.excluded > 0);
    CHECK(r.excluded == static_cast<int>(r.excluded_replicates.size()));
    CHECK(r.completed + r.excluded == 50);
}

TEST_CASE("power experiment") {
    auto spec = small(ExperimentKind::Power);
    spec.n_values = {40};
    spec.layers = {2, 3};
    spec.signal_grid = {0.0, 1.0};
    spec.replicates = 30;
    const auto r = run_power(spec);
    REQUIRE(r.rows.size() == 4);
    for (const auto& row : r.rows) {
        CHECK(row.replicates + row.excluded == 30);
        if (row.alpha_signal == 0.0) {
            CHECK(row.predicted_power == doctest::Approx(0.05));
        }
    }
    CHECK(r.rows[3].empirical_power >= 0.9);
}

TEST_CASE("rate experiment") {
    auto spec = small(ExperimentKind::Rate);
    spec.n_values = {20, 40};
    spec.replicates = 20;
    const auto r = run_rate(spec);
    REQUIRE(r.rows.size() == 2);
    CHECK(r.rows[1].median_linf < r.rows[0].median_linf);
    for (const auto& row : r.rows) {
        const double n = row.n;
        CHECK(row.scaled_linf == doctest::Approx(row.median_linf * std::sqrt(n * n / std::log(n))));
        CHECK(row.scaled_l2 == doctest::Approx(row.median_l2 * std::sqrt(n)));
    }
}

TEST_CASE("gamma gap experiment") {
    auto spec = small(ExperimentKind::GammaGap);
    spec.n_values = {8, 12, 16, 24, 32};
    spec.layers = {2};
    const auto r = run_gamma_gap(spec);
    REQUIRE(r.rows.size() == 5);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].gap < r.rows[i - 1].gap);
    }
    CHECK(r.loglog_slope < -1.5);
    CHECK(r.loglog_slope > -2.6);
}

TEST_CASE("null calibration experiment") {
    auto spec = small(ExperimentKind::NullCalibration);
    spec.layers = {2};
    spec.n_values = {60};
    spec.replicates = 100;
    const auto r = run_null_calibration(spec);
    CHECK(r.completed == 100);
    CHECK(std::abs(r.lambda_mean) < 0.5);
    CHECK(r.empirical_size <= 0.15);
}

TEST_CASE("outputs are reproducible and thread-count independent") {
    for (auto kind : {ExperimentKind::QQ, ExperimentKind::Coverage, ExperimentKind::Power, ExperimentKind::Rate,
                      ExperimentKind::GammaGap, ExperimentKind::NullCalibration}) {
        auto spec = small(kind);
        spec.replicates = 12;
        if (kind == ExperimentKind::Power) spec.signal_grid = {0.0, 0.5};
        if (kind == ExperimentKind::Rate || kind == ExperimentKind::GammaGap) spec.n_values = {10, 14};
        const std::string a = csv_of(spec);
        CHECK(a == csv_of(spec));
        spec.threads = 3;
        CHECK(a == csv_of(spec));
        spec.master_seed = 6;
        if (kind != ExperimentKind::GammaGap) CHECK(a != csv_of(spec));
    }
}

TEST_CASE("csv headers") {
    auto spec = small(ExperimentKind::GammaGap);
    spec.layers = {2};
    spec.n_values = {8};
    const std::string out = csv_of(spec);
    CHECK(out.rfind("n,s,gap\n", 0) == 0);

    auto q = small(ExperimentKind::QQ);
    q.replicates = 3;
    CHECK(csv_of(q).rfind("rank,plotting_position,normal_quantile,empirical_quantile\n", 0) == 0);
}
