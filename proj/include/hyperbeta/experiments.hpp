#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperbeta/estimator.hpp"
#include "hyperbeta/inference.hpp"

namespace hyperbeta {

/// Seed used when neither a flag, a spec file, nor HYPERBETA_SEED sets one.
inline constexpr std::uint64_t kDefaultSeed = 20240607;

enum class ExperimentKind { QQ, Coverage, Power, Rate, GammaGap, NullCalibration };

const char* to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::QQ;
    std::vector<int> n_values{400};  // grid for rate and gamma_gap; first entry otherwise
    std::vector<int> layers{3};
    int replicates = 200;
    std::uint64_t master_seed = kDefaultSeed;
    std::vector<double> signal_grid;  // power only
    double alpha = 0.05;
    double beta_const = 0.0;  // true (or null) parameter, constant across vertices
    int vertex = 0;  // 0-based coordinate for qq and coverage
    SigmaSource sigma_source = SigmaSource::Plugin;
    bool redraw_direction = true;  // power: fresh unit vector per replicate
    double max_failure_fraction = 0.05;
    FitConfig fit{};
    unsigned threads = 0;
    std::string output_path;
    std::string svg_path;

    int n() const { return n_values.front(); }
    int s() const { return layers.front(); }
    void validate() const;
};

/// Parses the key = value experiment spec format (see README).
ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec load_experiment_spec(const std::string& path);

/// `count` evenly spaced points covering [lo, hi].
std::vector<double> linspace(double lo, double hi, int count);

// statistics helpers shared by experiments and acceptance checks
double mean_of(const std::vector<double>& x);
double variance_of(const std::vector<double>& x);  // unbiased
double median_of(std::vector<double> x);
/// Kolmogorov-Smirnov distance between the sample and N(0, 1).
double ks_distance_normal(std::vector<double> x);

struct QQRow {
    int rank;  // 1-based
    double plotting_position;  // (rank - 0.5) / R
    double normal_quantile;
    double empirical_quantile;
};

struct QQResult {
    std::vector<QQRow> rows;
    std::vector<double> standardized;  // per completed replicate, replicate order
    double ks_distance = 0.0;
    int completed = 0;
    int excluded = 0;
};

QQResult run_qq(const ExperimentSpec& spec);

struct CoverageRow {
    int replicate;
    int layer;
    int vertex;  // 0-based
    double estimate;
    double low;
    double high;
    bool covered;
};

struct CoverageResult {
    std::vector<CoverageRow> rows;
    double coverage = 0.0;
    int completed = 0;
    int excluded = 0;
    std::vector<int> excluded_replicates;
};

CoverageResult run_coverage(const ExperimentSpec& spec);

struct PowerRow {
    double alpha_signal;
    int s;
    int n;
    int replicates;  // completed
    double empirical_power;
    double predicted_power;  // mean over replicates of the effective-signal prediction
    int excluded;
};

struct PowerResult {
    std::vector<PowerRow> rows;
};

PowerResult run_power(const ExperimentSpec& spec);

struct RateRow {
    int n;
    int s;
    int replicates;
    double median_linf;
    double median_l2;
    double scaled_linf;  // median_linf * sqrt(n^(s-1) / log n)
    double scaled_l2;    // median_l2 * sqrt(n^(s-2))
    int excluded;
};

struct RateResult {
    std::vector<RateRow> rows;
};

RateResult run_rate(const ExperimentSpec& spec);

struct GammaGapRow {
    int n;
    int s;
    double gap;
};

struct GammaGapResult {
    std::vector<GammaGapRow> rows;
    double loglog_slope = 0.0;  // least-squares slope of log gap on log n
};

GammaGapResult run_gamma_gap(const ExperimentSpec& spec);

struct NullCalibrationRow {
    int replicate;
    double log_lr;
    double lambda;
    bool reject;
};

struct NullCalibrationResult {
    std::vector<NullCalibrationRow> rows;
    double lambda_mean = 0.0;
    double lambda_variance = 0.0;
    double empirical_size = 0.0;
    double ks_distance = 0.0;
    int completed = 0;
    int excluded = 0;
};

NullCalibrationResult run_null_calibration(const ExperimentSpec& spec);

// CSV emission. Headers are fixed per kind.
void write_csv(std::ostream& out, const QQResult& r);
void write_csv(std::ostream& out, const CoverageResult& r);
void write_csv(std::ostream& out, const PowerResult& r);
void write_csv(std::ostream& out, const RateResult& r);
void write_csv(std::ostream& out, const GammaGapResult& r);
void write_csv(std::ostream& out, const NullCalibrationResult& r);

/// Runs the experiment named by spec.kind, writes its CSV to `csv` and, when
/// `svg` is non-null, a minimal plot of the table. Returns a one-line summary.
std::string run_experiment(const ExperimentSpec& spec, std::ostream& csv, std::ostream* svg = nullptr);

}  // namespace hyperbeta
