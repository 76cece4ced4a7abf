#include "hyperbeta/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "hyperbeta/goftest.hpp"
#include "hyperbeta/io.hpp"
#include "hyperbeta/likelihood.hpp"
#include "hyperbeta/parallel.hpp"
#include "hyperbeta/quantiles.hpp"
#include "hyperbeta/random.hpp"
#include "hyperbeta/sampler.hpp"

namespace hyperbeta {

const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::QQ: return "qq";
        case ExperimentKind::Coverage: return "coverage";
        case ExperimentKind::Power: return "power";
        case ExperimentKind::Rate: return "rate";
        case ExperimentKind::GammaGap: return "gamma_gap";
        case ExperimentKind::NullCalibration: return "null_calibration";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
    if (name == "qq") return ExperimentKind::QQ;
    if (name == "coverage") return ExperimentKind::Coverage;
    if (name == "power") return ExperimentKind::Power;
    if (name == "rate") return ExperimentKind::Rate;
    if (name == "gamma_gap" || name == "gamma-gap") return ExperimentKind::GammaGap;
    if (name == "null_calibration" || name == "null-calibration") return ExperimentKind::NullCalibration;
    throw ArgumentError("unknown experiment kind '" + name + "'");
}

void ExperimentSpec::validate() const {
    if (replicates < 1) {
        throw ArgumentError("replicates must be at least 1");
    }
    if (n_values.empty() || layers.empty()) {
        throw ArgumentError("experiment needs at least one n and one layer");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ArgumentError("alpha must lie in (0, 1)");
    }
    if (kind == ExperimentKind::Power) {
        if (signal_grid.empty()) {
            throw ArgumentError("power experiment needs a non-empty signal grid");
        }
        for (double a : signal_grid) {
            if (!(a >= 0.0 && a <= 1.0)) {
                throw ArgumentError("signal grid values must lie in [0, 1]");
            }
        }
    }
    for (int n : n_values) {
        for (int s : layers) {
            if (s < 2 || n <= s) {
                throw ArgumentError("experiment requires n > s >= 2 (n = " + std::to_string(n) +
                                    ", s = " + std::to_string(s) + ")");
            }
        }
    }
    if (vertex < 0 || vertex >= n()) {
        throw ArgumentError("queried vertex outside 1..n");
    }
    if (!std::isfinite(beta_const)) {
        throw ArgumentError("beta must be finite");
    }
    fit.validate();
}

std::vector<double> linspace(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) {
        out.push_back(lo);
        return out;
    }
    for (int i = 0; i < count; ++i) {
        out.push_back(lo + (hi - lo) * i / (count - 1));
    }
    return out;
}

double mean_of(const std::vector<double>& x) {
    if (x.empty()) {
        return NAN;
    }
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(const std::vector<double>& x) {
    if (x.size() < 2) {
        return NAN;
    }
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return ss / static_cast<double>(x.size() - 1);
}

double median_of(std::vector<double> x) {
    if (x.empty()) {
        return NAN;
    }
    std::sort(x.begin(), x.end());
    const std::size_t m = x.size();
    return m % 2 ? x[m / 2] : 0.5 * (x[m / 2 - 1] + x[m / 2]);
}

double ks_distance_normal(std::vector<double> x) {
    if (x.empty()) {
        return NAN;
    }
    std::sort(x.begin(), x.end());
    const double m = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = normal_cdf(x[i]);
        d = std::max({d, (i + 1) / m - f, f - i / m});
    }
    return d;
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ',')) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) {
            out.push_back(item.substr(a, b - a + 1));
        }
    }
    return out;
}

int to_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ArgumentError("spec key '" + key + "': cannot parse integer '" + s + "'");
    }
}

double to_real(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("spec key '" + key + "': cannot parse number '" + s + "'");
    }
}

std::uint64_t to_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("spec key '" + key + "': cannot parse seed '" + s + "'");
    }
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::istream& in) {
    ExperimentSpec spec;
    bool have_kind = false;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError("spec line " + std::to_string(line_no) + ": expected key = value");
        }
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (key == "kind") {
            spec.kind = parse_experiment_kind(value);
            have_kind = true;
        } else if (key == "n") {
            spec.n_values.clear();
            for (const auto& v : split_list(value)) spec.n_values.push_back(to_int(v, key));
        } else if (key == "layers" || key == "s") {
            spec.layers.clear();
            for (const auto& v : split_list(value)) spec.layers.push_back(to_int(v, key));
        } else if (key == "replicates") {
            spec.replicates = to_int(value, key);
        } else if (key == "seed") {
            spec.master_seed = to_u64(value, key);
        } else if (key == "alpha") {
            spec.alpha = to_real(value, key);
        } else if (key == "beta") {
            spec.beta_const = to_real(value, key);
        } else if (key == "vertex") {
            spec.vertex = to_int(value, key) - 1;
        } else if (key == "sigma") {
            if (value == "plugin") spec.sigma_source = SigmaSource::Plugin;
            else if (value == "oracle") spec.sigma_source = SigmaSource::Oracle;
            else throw ArgumentError("spec key 'sigma' must be plugin or oracle");
        } else if (key == "direction") {
            if (value == "per-replicate") spec.redraw_direction = true;
            else if (value == "fixed") spec.redraw_direction = false;
            else throw ArgumentError("spec key 'direction' must be per-replicate or fixed");
        } else if (key == "signal_grid") {
            spec.signal_grid.clear();
            for (const auto& v : split_list(value)) spec.signal_grid.push_back(to_real(v, key));
        } else if (key == "grid_points") {
            spec.signal_grid = linspace(0.0, 1.0, to_int(value, key));
        } else if (key == "tol_grad") {
            spec.fit.tol_grad = to_real(value, key);
        } else if (key == "max_iters") {
            spec.fit.max_iters = to_int(value, key);
        } else if (key == "damping") {
            spec.fit.damping = to_real(value, key);
        } else if (key == "newton_switch_iters") {
            spec.fit.newton_switch_iters = to_int(value, key);
        } else if (key == "max_failure_fraction") {
            spec.max_failure_fraction = to_real(value, key);
        } else if (key == "threads") {
            spec.threads = static_cast<unsigned>(to_int(value, key));
        } else if (key == "output") {
            spec.output_path = value;
        } else if (key == "svg") {
            spec.svg_path = value;
        } else {
            throw ArgumentError("spec line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    if (!have_kind) {
        throw ArgumentError("spec file must set 'kind'");
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open experiment spec '" + path + "'");
    }
    return parse_experiment_spec(in);
}

namespace {

LayeredParams single_layer(int n, int s, const Vector& beta) {
    LayeredParams p;
    p.n = n;
    p.r = s;
    p.layers[s] = beta;
    return p;
}

// Sample layer s under `beta` from the stream owned by replicate_seed and fit it.
std::optional<FitResult> simulate_fit(const LayeredParams& params, int s, std::uint64_t replicate_seed,
                                      const FitConfig& config, LayerSample* sample_out = nullptr) {
    Rng rng = layer_stream(replicate_seed, s);
    LayerSample sample = sample_layer(params, s, rng);
    std::optional<FitResult> fit;
    try {
        FitResult f = fit_layer(sample, config);
        if (f.converged) {
            fit = std::move(f);
        }
    } catch (const NumericalError&) {
    }
    if (sample_out) {
        *sample_out = std::move(sample);
    }
    return fit;
}

void check_failures(const ExperimentSpec& spec, int excluded, int total, const std::string& what) {
    if (excluded > spec.max_failure_fraction * total) {
        throw NumericalError(what + ": " + std::to_string(excluded) + " of " + std::to_string(total) +
                             " replicates failed to fit (limit " +
                             format_double(100.0 * spec.max_failure_fraction) + "%)");
    }
}

Vector unit_direction(Rng& rng, int n) {
    Vector u(n);
    for (int v = 0; v < n; ++v) {
        u[v] = rng.normal();
    }
    return u / u.norm();
}

constexpr std::uint64_t kDirectionStream = 0xD1EC7104ULL;

}  // namespace

QQResult run_qq(const ExperimentSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const int s = spec.s();
    const Vector beta = Vector::Constant(n, spec.beta_const);
    const LayeredParams params = single_layer(n, s, beta);

    std::vector<std::optional<double>> z(spec.replicates);
    parallel_for(spec.replicates, spec.threads, [&](int i) {
        const auto fit = simulate_fit(params, s, derive_seed(spec.master_seed, i), spec.fit);
        if (fit) {
            z[i] = standardize(*fit, beta, spec.sigma_source).z[spec.vertex];
        }
    });

    QQResult out;
    for (const auto& v : z) {
        if (v) {
            out.standardized.push_back(*v);
        }
    }
    out.completed = static_cast<int>(out.standardized.size());
    out.excluded = spec.replicates - out.completed;
    check_failures(spec, out.excluded, spec.replicates, "qq");

    std::vector<double> sorted = out.standardized;
    std::sort(sorted.begin(), sorted.end());
    const int m = out.completed;
    for (int i = 0; i < m; ++i) {
        const double pos = (i + 0.5) / m;
        out.rows.push_back({i + 1, pos, normal_quantile(pos), sorted[i]});
    }
    out.ks_distance = ks_distance_normal(out.standardized);
    return out;
}

CoverageResult run_coverage(const ExperimentSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const int s = spec.s();
    const Vector beta = Vector::Constant(n, spec.beta_const);
    const LayeredParams params = single_layer(n, s, beta);

    std::vector<std::optional<CoverageRow>> rows(spec.replicates);
    parallel_for(spec.replicates, spec.threads, [&](int i) {
        const auto fit = simulate_fit(params, s, derive_seed(spec.master_seed, i), spec.fit);
        if (!fit) {
            return;
        }
        const ConfidenceReport rep = confidence_set({{s, *fit}}, {{s, {spec.vertex}}}, spec.alpha,
                                                    std::map<int, Vector>{{s, beta}});
        const Interval& iv = rep.intervals.front();
        rows[i] = CoverageRow{i, s, spec.vertex, iv.estimate, iv.low, iv.high,
                              iv.low <= beta[spec.vertex] && beta[spec.vertex] <= iv.high};
    });

    CoverageResult out;
    int covered = 0;
    for (int i = 0; i < spec.replicates; ++i) {
        if (rows[i]) {
            out.rows.push_back(*rows[i]);
            covered += rows[i]->covered ? 1 : 0;
        } else {
            out.excluded_replicates.push_back(i);
        }
    }
    out.completed = static_cast<int>(out.rows.size());
    out.excluded = spec.replicates - out.completed;
    check_failures(spec, out.excluded, spec.replicates, "coverage");
    out.coverage = out.completed ? static_cast<double>(covered) / out.completed : NAN;
    return out;
}

PowerResult run_power(const ExperimentSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const Vector gamma = Vector::Constant(n, spec.beta_const);

    struct Cell {
        bool done = false;
        bool reject = false;
        double predicted = 0.0;
    };

    PowerResult out;
    for (std::size_t g = 0; g < spec.signal_grid.size(); ++g) {
        const double a = spec.signal_grid[g];
        const std::uint64_t grid_seed = derive_seed(spec.master_seed, g);
        std::optional<Vector> fixed_direction;
        if (!spec.redraw_direction) {
            Rng dir_rng(derive_seed(grid_seed, kDirectionStream));
            fixed_direction = unit_direction(dir_rng, n);
        }
        for (int s : spec.layers) {
            std::vector<Cell> cells(spec.replicates);
            parallel_for(spec.replicates, spec.threads, [&](int i) {
                const std::uint64_t rep_seed = derive_seed(grid_seed, i);
                Vector u;
                if (fixed_direction) {
                    u = *fixed_direction;
                } else {
                    Rng dir_rng(derive_seed(rep_seed, kDirectionStream));
                    u = unit_direction(dir_rng, n);
                }
                const Vector alt = gamma + a * u;
                LayerSample sample;
                const auto fit = simulate_fit(single_layer(n, s, alt), s, rep_seed, spec.fit, &sample);
                if (!fit) {
                    return;
                }
                const TestReport rep = lr_test(lr_statistic(sample, gamma, *fit), spec.alpha);
                cells[i].done = true;
                cells[i].reject = *rep.reject;
                cells[i].predicted = effective_signal(gamma, alt, n, s, spec.alpha).predicted_power;
            });
            int done = 0, rejects = 0;
            double predicted = 0.0;
            for (const auto& c : cells) {
                if (c.done) {
                    ++done;
                    rejects += c.reject ? 1 : 0;
                    predicted += c.predicted;
                }
            }
            const int excluded = spec.replicates - done;
            check_failures(spec, excluded, spec.replicates, "power");
            out.rows.push_back({a, s, n, done, done ? static_cast<double>(rejects) / done : NAN,
                                done ? predicted / done : NAN, excluded});
        }
    }
    return out;
}

RateResult run_rate(const ExperimentSpec& spec) {
    spec.validate();
    const int s = spec.s();
    RateResult out;
    for (int n : spec.n_values) {
        const Vector beta = Vector::Constant(n, spec.beta_const);
        const LayeredParams params = single_layer(n, s, beta);
        const std::uint64_t n_seed = derive_seed(spec.master_seed, static_cast<std::uint64_t>(n));
        std::vector<std::optional<std::pair<double, double>>> errs(spec.replicates);
        parallel_for(spec.replicates, spec.threads, [&](int i) {
            const auto fit = simulate_fit(params, s, derive_seed(n_seed, i), spec.fit);
            if (fit) {
                const Vector diff = fit->beta_hat - beta;
                errs[i] = std::make_pair(max_abs(diff), diff.norm());
            }
        });
        std::vector<double> linf, l2;
        for (const auto& e : errs) {
            if (e) {
                linf.push_back(e->first);
                l2.push_back(e->second);
            }
        }
        const int done = static_cast<int>(linf.size());
        check_failures(spec, spec.replicates - done, spec.replicates, "rate");
        RateRow row;
        row.n = n;
        row.s = s;
        row.replicates = done;
        row.excluded = spec.replicates - done;
        row.median_linf = median_of(linf);
        row.median_l2 = median_of(l2);
        const double dn = n;
        row.scaled_linf = row.median_linf * std::sqrt(std::pow(dn, s - 1) / std::log(dn));
        row.scaled_l2 = row.median_l2 * std::sqrt(std::pow(dn, s - 2));
        out.rows.push_back(row);
    }
    return out;
}

GammaGapResult run_gamma_gap(const ExperimentSpec& spec) {
    spec.validate();
    const int s = spec.s();
    GammaGapResult out;
    for (int n : spec.n_values) {
        out.rows.push_back({n, s, gamma_inverse_gap(Vector::Constant(n, spec.beta_const), n, s)});
    }
    if (out.rows.size() >= 2) {
        std::vector<double> lx, ly;
        for (const auto& r : out.rows) {
            lx.push_back(std::log(static_cast<double>(r.n)));
            ly.push_back(std::log(r.gap));
        }
        const double mx = mean_of(lx), my = mean_of(ly);
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mx) * (ly[i] - my);
            sxx += (lx[i] - mx) * (lx[i] - mx);
        }
        out.loglog_slope = sxy / sxx;
    } else {
        out.loglog_slope = NAN;
    }
    return out;
}

NullCalibrationResult run_null_calibration(const ExperimentSpec& spec) {
    spec.validate();
    const int n = spec.n();
    const int s = spec.s();
    const Vector gamma = Vector::Constant(n, spec.beta_const);
    const LayeredParams params = single_layer(n, s, gamma);

    std::vector<std::optional<NullCalibrationRow>> rows(spec.replicates);
    parallel_for(spec.replicates, spec.threads, [&](int i) {
        LayerSample sample;
        const auto fit = simulate_fit(params, s, derive_seed(spec.master_seed, i), spec.fit, &sample);
        if (!fit) {
            return;
        }
        const TestReport rep = lr_test(lr_statistic(sample, gamma, *fit), spec.alpha);
        rows[i] = NullCalibrationRow{i, rep.log_lr, rep.lambda, *rep.reject};
    });

    NullCalibrationResult out;
    std::vector<double> lambdas;
    int rejects = 0;
    for (const auto& r : rows) {
        if (r) {
            out.rows.push_back(*r);
            lambdas.push_back(r->lambda);
            rejects += r->reject ? 1 : 0;
        }
    }
    out.completed = static_cast<int>(out.rows.size());
    out.excluded = spec.replicates - out.completed;
    check_failures(spec, out.excluded, spec.replicates, "null calibration");
    out.lambda_mean = mean_of(lambdas);
    out.lambda_variance = variance_of(lambdas);
    out.empirical_size = out.completed ? static_cast<double>(rejects) / out.completed : NAN;
    out.ks_distance = ks_distance_normal(lambdas);
    return out;
}

void write_csv(std::ostream& out, const QQResult& r) {
    out << "rank,plotting_position,normal_quantile,empirical_quantile\n";
    for (const auto& row : r.rows) {
        out << row.rank << ',' << format_double(row.plotting_position) << ','
            << format_double(row.normal_quantile) << ',' << format_double(row.empirical_quantile) << '\n';
    }
}

void write_csv(std::ostream& out, const CoverageResult& r) {
    out << "replicate,layer,vertex,estimate,low,high,covered\n";
    for (const auto& row : r.rows) {
        out << row.replicate << ',' << row.layer << ',' << (row.vertex + 1) << ','
            << format_double(row.estimate) << ',' << format_double(row.low) << ','
            << format_double(row.high) << ',' << (row.covered ? 1 : 0) << '\n';
    }
}

void write_csv(std::ostream& out, const PowerResult& r) {
    out << "alpha_signal,s,n,replicates,empirical_power,predicted_power\n";
    for (const auto& row : r.rows) {
        out << format_double(row.alpha_signal) << ',' << row.s << ',' << row.n << ',' << row.replicates
            << ',' << format_double(row.empirical_power) << ',' << format_double(row.predicted_power)
            << '\n';
    }
}

void write_csv(std::ostream& out, const RateResult& r) {
    out << "n,s,replicates,median_linf,median_l2,scaled_linf,scaled_l2\n";
    for (const auto& row : r.rows) {
        out << row.n << ',' << row.s << ',' << row.replicates << ',' << format_double(row.median_linf)
            << ',' << format_double(row.median_l2) << ',' << format_double(row.scaled_linf) << ','
            << format_double(row.scaled_l2) << '\n';
    }
}

void write_csv(std::ostream& out, const GammaGapResult& r) {
    out << "n,s,gap\n";
    for (const auto& row : r.rows) {
        out << row.n << ',' << row.s << ',' << format_double(row.gap) << '\n';
    }
}

void write_csv(std::ostream& out, const NullCalibrationResult& r) {
    out << "replicate,log_lr,lambda,reject\n";
    for (const auto& row : r.rows) {
        out << row.replicate << ',' << format_double(row.log_lr) << ',' << format_double(row.lambda)
            << ',' << (row.reject ? 1 : 0) << '\n';
    }
}

std::string run_experiment(const ExperimentSpec& spec, std::ostream& csv, std::ostream* svg) {
    std::ostringstream summary;
    summary << "kind=" << to_string(spec.kind);
    switch (spec.kind) {
        case ExperimentKind::QQ: {
            const auto r = run_qq(spec);
            write_csv(csv, r);
            if (svg) {
                SvgSeries pts{"standardized beta_hat", {}, {}, false};
                SvgSeries diag{"y = x", {}, {}, true};
                for (const auto& row : r.rows) {
                    pts.x.push_back(row.normal_quantile);
                    pts.y.push_back(row.empirical_quantile);
                }
                if (!r.rows.empty()) {
                    diag.x = {r.rows.front().normal_quantile, r.rows.back().normal_quantile};
                    diag.y = diag.x;
                }
                write_svg(*svg, "QQ plot", "normal quantile", "empirical quantile", {pts, diag});
            }
            summary << " completed=" << r.completed << " excluded=" << r.excluded
                    << " ks=" << format_double(r.ks_distance);
            break;
        }
        case ExperimentKind::Coverage: {
            const auto r = run_coverage(spec);
            write_csv(csv, r);
            if (svg) {
                SvgSeries lo{"low", {}, {}, false}, hi{"high", {}, {}, false};
                for (const auto& row : r.rows) {
                    lo.x.push_back(row.replicate);
                    lo.y.push_back(row.low);
                    hi.x.push_back(row.replicate);
                    hi.y.push_back(row.high);
                }
                write_svg(*svg, "Confidence intervals", "replicate", "beta", {lo, hi});
            }
            summary << " completed=" << r.completed << " excluded=" << r.excluded
                    << " coverage=" << format_double(r.coverage);
            break;
        }
        case ExperimentKind::Power: {
            const auto r = run_power(spec);
            write_csv(csv, r);
            if (svg) {
                std::vector<SvgSeries> series;
                for (int s : spec.layers) {
                    SvgSeries emp{"empirical s=" + std::to_string(s), {}, {}, true};
                    SvgSeries pred{"predicted s=" + std::to_string(s), {}, {}, false};
                    for (const auto& row : r.rows) {
                        if (row.s == s) {
                            emp.x.push_back(row.alpha_signal);
                            emp.y.push_back(row.empirical_power);
                            pred.x.push_back(row.alpha_signal);
                            pred.y.push_back(row.predicted_power);
                        }
                    }
                    series.push_back(emp);
                    series.push_back(pred);
                }
                write_svg(*svg, "LR test power", "signal", "power", series);
            }
            int excluded = 0;
            for (const auto& row : r.rows) excluded += row.excluded;
            summary << " rows=" << r.rows.size() << " excluded=" << excluded;
            break;
        }
        case ExperimentKind::Rate: {
            const auto r = run_rate(spec);
            write_csv(csv, r);
            if (svg) {
                SvgSeries sl{"scaled median Linf", {}, {}, true}, s2{"scaled median L2", {}, {}, true};
                for (const auto& row : r.rows) {
                    sl.x.push_back(row.n);
                    sl.y.push_back(row.scaled_linf);
                    s2.x.push_back(row.n);
                    s2.y.push_back(row.scaled_l2);
                }
                write_svg(*svg, "Estimation error scaling", "n", "scaled error", {sl, s2});
            }
            summary << " rows=" << r.rows.size();
            break;
        }
        case ExperimentKind::GammaGap: {
            const auto r = run_gamma_gap(spec);
            write_csv(csv, r);
            if (svg) {
                SvgSeries g{"log gap", {}, {}, true};
                for (const auto& row : r.rows) {
                    g.x.push_back(std::log(static_cast<double>(row.n)));
                    g.y.push_back(std::log(row.gap));
                }
                write_svg(*svg, "Diagonal surrogate gap", "log n", "log max-norm gap", {g});
            }
            summary << " slope=" << format_double(r.loglog_slope);
            break;
        }
        case ExperimentKind::NullCalibration: {
            const auto r = run_null_calibration(spec);
            write_csv(csv, r);
            if (svg) {
                std::vector<double> sorted;
                for (const auto& row : r.rows) sorted.push_back(row.lambda);
                std::sort(sorted.begin(), sorted.end());
                SvgSeries pts{"lambda", {}, {}, false};
                for (std::size_t i = 0; i < sorted.size(); ++i) {
                    pts.x.push_back(normal_quantile((i + 0.5) / sorted.size()));
                    pts.y.push_back(sorted[i]);
                }
                write_svg(*svg, "Null distribution of lambda", "normal quantile", "lambda", {pts});
            }
            summary << " completed=" << r.completed << " excluded=" << r.excluded
                    << " mean=" << format_double(r.lambda_mean)
                    << " variance=" << format_double(r.lambda_variance)
                    << " size=" << format_double(r.empirical_size);
            break;
        }
    }
    return summary.str();
}

}  // namespace hyperbeta
