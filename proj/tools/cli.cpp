#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"

#include "hyperbeta/estimator.hpp"
#include "hyperbeta/experiments.hpp"
#include "hyperbeta/goftest.hpp"
#include "hyperbeta/inference.hpp"
#include "hyperbeta/io.hpp"
#include "hyperbeta/sampler.hpp"

namespace hyperbeta::cli {

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("HYPERBETA_SEED")) {
        try {
            std::size_t pos = 0;
            const unsigned long long v = std::stoull(env, &pos);
            if (pos == std::string(env).size()) {
                return v;
            }
        } catch (const std::exception&) {
        }
        throw ArgumentError(std::string("HYPERBETA_SEED is not an unsigned integer: '") + env + "'");
    }
    return kDefaultSeed;
}

// Output sink: a file when a path is given, otherwise the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_) {
                throw IoError("cannot open '" + path + "' for writing");
            }
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }
    void finish(const std::string& path) {
        stream_->flush();
        if (!*stream_) {
            throw IoError("write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return in;
}

struct FitFlags {
    double tol = 1e-8;
    int max_iters = 5000;
    double damping = 1.0;
    int newton_after = 200;
    double bound_M = 0.0;

    void add(CLI::App* app) {
        app->add_option("--tol", tol, "Gradient tolerance relative to n^(s-1)");
        app->add_option("--max-iters", max_iters, "Iteration cap");
        app->add_option("--damping", damping, "Initial fixed-point damping in (0, 1]");
        app->add_option("--newton-after", newton_after, "Fixed-point steps before the Newton fallback");
        app->add_option("--bound-M", bound_M, "Warn when |beta_hat|_inf exceeds this bound");
    }
    FitConfig config() const {
        FitConfig c;
        c.tol_grad = tol;
        c.max_iters = max_iters;
        c.damping = damping;
        c.newton_switch_iters = newton_after;
        if (bound_M > 0.0) {
            c.bound_M = bound_M;
        }
        c.validate();
        return c;
    }
};

// "3:1,2;2:5" -> {3: {0, 1}, 2: {4}} (1-based on the command line).
std::map<int, std::vector<int>> parse_query(const std::string& text) {
    std::map<int, std::vector<int>> out;
    std::istringstream groups(text);
    std::string group;
    while (std::getline(groups, group, ';')) {
        const auto colon = group.find(':');
        if (colon == std::string::npos) {
            throw ArgumentError("query '" + group + "' must look like s:v1,v2");
        }
        const int s = std::stoi(group.substr(0, colon));
        std::istringstream vs(group.substr(colon + 1));
        std::string v;
        while (std::getline(vs, v, ',')) {
            out[s].push_back(std::stoi(v) - 1);
        }
    }
    if (out.empty()) {
        throw ArgumentError("empty query");
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ',')) {
        try {
            std::size_t pos = 0;
            out.push_back(std::stoi(item, &pos));
            if (pos != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ArgumentError("cannot parse integer list '" + text + "'");
        }
    }
    if (out.empty()) {
        throw ArgumentError("empty integer list");
    }
    return out;
}

int run_experiment_to(const ExperimentSpec& spec, std::ostream& out, std::ostream& err, bool verbose) {
    Sink csv(spec.output_path, out);
    std::unique_ptr<Sink> svg;
    if (!spec.svg_path.empty()) {
        svg = std::make_unique<Sink>(spec.svg_path, out);
    }
    const std::string summary = run_experiment(spec, csv.get(), svg ? &svg->get() : nullptr);
    csv.finish(spec.output_path);
    if (svg) {
        svg->finish(spec.svg_path);
    }
    if (verbose) {
        err << summary << '\n';
    }
    return kOk;
}

}  // namespace

namespace {

// Keeps every failure on a single line.
void report(std::ostream& err, const char* kind, std::string message) {
    std::replace(message.begin(), message.end(), '\n', ' ');
    while (!message.empty() && message.back() == ' ') message.pop_back();
    err << "error: " << kind << ": " << message << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Estimation and goodness-of-fit testing for the layered hypergraph beta-model"};
    app.require_subcommand(1);
    bool verbose = false;
    unsigned threads = 0;
    app.fallthrough();
    app.add_flag("-v,--verbose", verbose, "Print a summary line to stderr");
    app.add_option("--threads", threads, "Replicate parallelism cap (0 = all cores)");

    // sample
    auto* sample_cmd = app.add_subcommand("sample", "Draw a layered hypergraph and write its degrees");
    int sample_n = 0;
    std::string sample_layers = "2";
    double sample_beta = 0.0;
    std::string sample_params, sample_out, sample_edges;
    std::uint64_t sample_seed = 0;
    auto* n_opt = sample_cmd->add_option("--n", sample_n, "Number of vertices");
    sample_cmd->add_option("--layers", sample_layers, "Comma-separated layer sizes");
    auto* beta_opt = sample_cmd->add_option("--beta-const", sample_beta, "Constant beta for every vertex");
    auto* params_opt = sample_cmd->add_option("--params", sample_params, "Parameter file");
    params_opt->excludes(beta_opt)->excludes(n_opt);
    auto* sample_seed_opt = sample_cmd->add_option("--seed", sample_seed, "Master seed");
    sample_cmd->add_option("--out", sample_out, "Degree CSV path (default stdout)");
    sample_cmd->add_option("--edges", sample_edges, "Also write the edge list to this CSV");

    // fit
    auto* fit_cmd = app.add_subcommand("fit", "Maximum-likelihood fit of every layer in a degree CSV");
    std::string fit_degrees, fit_out;
    FitFlags fit_flags;
    fit_cmd->add_option("--degrees", fit_degrees, "Degree CSV")->required();
    fit_cmd->add_option("--out", fit_out, "JSON output path (default stdout)");
    fit_flags.add(fit_cmd);

    // ci
    auto* ci_cmd = app.add_subcommand("ci", "Chi-squared confidence set for selected coordinates");
    std::string ci_degrees, ci_query, ci_truth, ci_out, ci_intervals;
    double ci_alpha = 0.05;
    FitFlags ci_fit;
    ci_cmd->add_option("--degrees", ci_degrees, "Degree CSV")->required();
    ci_cmd->add_option("--query", ci_query, "Coordinates as s:v1,v2;s:v (1-based)")->required();
    ci_cmd->add_option("--alpha", ci_alpha, "Level");
    ci_cmd->add_option("--truth", ci_truth, "Parameter file with reference values");
    ci_cmd->add_option("--out", ci_out, "JSON output path (default stdout)");
    ci_cmd->add_option("--intervals", ci_intervals, "Interval CSV path");
    ci_fit.add(ci_cmd);

    // test
    auto* test_cmd = app.add_subcommand("test", "Goodness-of-fit test of a null parameter vector");
    std::string test_degrees, test_null, test_alt, test_out, test_method = "lr";
    double test_null_const = 0.0, test_alpha = 0.05, test_linf_C = 0.0;
    int test_calibration = 200;
    std::uint64_t test_seed = 0;
    FitFlags test_fit;
    test_cmd->add_option("--degrees", test_degrees, "Degree CSV")->required();
    auto* null_file_opt = test_cmd->add_option("--null", test_null, "Null parameter file");
    test_cmd->add_option("--null-const", test_null_const, "Constant null vector")->excludes(null_file_opt);
    test_cmd->add_option("--alt", test_alt, "Alternative parameter file for the effective-signal report");
    test_cmd->add_option("--alpha", test_alpha, "Level");
    test_cmd->add_option("--method", test_method, "lr or linf")->check(CLI::IsMember({"lr", "linf"}));
    auto* linf_c_opt = test_cmd->add_option("--linf-C", test_linf_C, "Analytic constant C for the L-infinity test");
    test_cmd->add_option("--calibration-reps", test_calibration, "Null replicates for L-infinity calibration")
        ->excludes(linf_c_opt);
    auto* test_seed_opt = test_cmd->add_option("--seed", test_seed, "Calibration seed");
    test_cmd->add_option("--out", test_out, "JSON output path (default stdout)");
    test_fit.add(test_cmd);

    // experiment subcommands
    struct ExperimentFlags {
        std::string n_list;
        std::string layers;
        int replicates = 0;
        int grid_points = 0;
        double alpha = 0.05;
        double beta = 0.0;
        int vertex = 1;
        std::string sigma = "plugin";
        std::string direction = "per-replicate";
        std::uint64_t seed = 0;
        CLI::Option* seed_opt = nullptr;
        bool full_scale = false;
        std::string out;
        std::string svg;
        FitFlags fit;
    };
    auto add_experiment = [&](const std::string& name, const std::string& help, ExperimentFlags& f) {
        auto* cmd = app.add_subcommand(name, help);
        cmd->add_option("--n", f.n_list, "Vertex count (comma-separated grid for rate and gamma-gap)");
        cmd->add_option("--layers", f.layers, "Layer size(s)");
        cmd->add_option("--replicates", f.replicates, "Monte Carlo replicates");
        cmd->add_option("--alpha", f.alpha, "Level");
        cmd->add_option("--beta", f.beta, "Constant true (null) parameter");
        f.seed_opt = cmd->add_option("--seed", f.seed, "Master seed");
        cmd->add_flag("--full-scale", f.full_scale, "Use the full-size settings instead of desk scale");
        cmd->add_option("--out", f.out, "CSV output path (default stdout)");
        cmd->add_option("--svg", f.svg, "Optional SVG rendering");
        f.fit.add(cmd);
        return cmd;
    };
    ExperimentFlags power_f, qq_f, cov_f, rate_f, gap_f;
    auto* power_cmd = add_experiment("power", "Power curve of the LR test", power_f);
    power_cmd->add_option("--grid-points", power_f.grid_points, "Signal grid size on [0, 1]");
    power_cmd->add_option("--direction", power_f.direction, "per-replicate or fixed")
        ->check(CLI::IsMember({"per-replicate", "fixed"}));
    auto* qq_cmd = add_experiment("qq", "QQ data for a standardized coordinate of the MLE", qq_f);
    qq_cmd->add_option("--vertex", qq_f.vertex, "Coordinate (1-based)");
    qq_cmd->add_option("--sigma", qq_f.sigma, "plugin or oracle")->check(CLI::IsMember({"plugin", "oracle"}));
    auto* cov_cmd = add_experiment("coverage", "Coverage of the singleton confidence interval", cov_f);
    cov_cmd->add_option("--vertex", cov_f.vertex, "Coordinate (1-based)");
    auto* rate_cmd = add_experiment("rate", "Median estimation error across an n grid", rate_f);
    auto* gap_cmd = add_experiment("gamma-gap", "Max-norm gap between the diagonal surrogate and the inverse covariance", gap_f);

    auto* exp_cmd = app.add_subcommand("experiment", "Run an experiment spec file");
    std::string exp_file, exp_out, exp_svg;
    exp_cmd->add_option("spec", exp_file, "Experiment spec file")->required();
    exp_cmd->add_option("--out", exp_out, "Override the CSV output path");
    exp_cmd->add_option("--svg", exp_svg, "Override the SVG output path");

    std::vector<std::string> argv_store;
    argv_store.push_back("hyperbeta");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) {
        argv.push_back(a.data());
    }

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return kOk;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return kOk;
        } catch (const CLI::ParseError& e) {
            throw ArgumentError(e.what());
        }

        if (*sample_cmd) {
            LayeredParams params;
            if (!sample_params.empty()) {
                params = load_params(sample_params);
            } else {
                if (sample_n < 1) {
                    throw ArgumentError("sample needs --n or --params");
                }
                params = LayeredParams::constant(sample_n, parse_int_list(sample_layers), sample_beta);
            }
            const std::uint64_t seed = sample_seed_opt->count() ? sample_seed : default_seed();
            const auto samples = sample_layered(params, seed, !sample_edges.empty());
            Sink sink(sample_out, out);
            write_degrees_csv(sink.get(), samples);
            sink.finish(sample_out);
            if (!sample_edges.empty()) {
                Sink edges(sample_edges, out);
                write_edges_csv(edges.get(), samples);
                edges.finish(sample_edges);
            }
            if (verbose) {
                err << "sampled " << samples.size() << " layer(s), n = " << params.n << ", seed = " << seed << '\n';
            }
            return kOk;
        }

        if (*fit_cmd) {
            auto in = open_input(fit_degrees);
            const auto samples = read_degrees_csv(in);
            const auto outcomes = fit_all_layers(samples, fit_flags.config());
            nlohmann::json j;
            j["layers"] = nlohmann::json::object();
            bool all_ok = true;
            for (const auto& [s, outcome] : outcomes) {
                if (const auto* fit = std::get_if<FitResult>(&outcome)) {
                    FitResult with_se = *fit;
                    if (with_se.converged) {
                        attach_standard_errors(with_se);
                    } else {
                        all_ok = false;
                    }
                    j["layers"][std::to_string(s)] = to_json(with_se);
                } else {
                    all_ok = false;
                    j["layers"][std::to_string(s)] = to_json(std::get<LayerFitError>(outcome));
                }
            }
            Sink sink(fit_out, out);
            sink.get() << j.dump(2) << '\n';
            sink.finish(fit_out);
            if (!all_ok) {
                err << "error: numerical: one or more layers failed to fit\n";
                return kNumericalError;
            }
            return kOk;
        }

        if (*ci_cmd) {
            auto in = open_input(ci_degrees);
            const auto samples = read_degrees_csv(in);
            const auto queries = parse_query(ci_query);
            std::map<int, FitResult> fits;
            for (const auto& [s, vs] : queries) {
                auto it = samples.find(s);
                if (it == samples.end()) {
                    throw ArgumentError("layer " + std::to_string(s) + " not in degree file");
                }
                fits.emplace(s, fit_layer(it->second, ci_fit.config()));
            }
            std::optional<std::map<int, Vector>> truth;
            if (!ci_truth.empty()) {
                truth = load_params(ci_truth).layers;
            }
            const ConfidenceReport report = confidence_set(fits, queries, ci_alpha, truth);
            Sink sink(ci_out, out);
            sink.get() << to_json(report).dump(2) << '\n';
            sink.finish(ci_out);
            if (!ci_intervals.empty()) {
                Sink iv(ci_intervals, out);
                write_intervals_csv(iv.get(), report);
                iv.finish(ci_intervals);
            }
            return kOk;
        }

        if (*test_cmd) {
            auto in = open_input(test_degrees);
            const auto samples = read_degrees_csv(in);
            std::optional<LayeredParams> null_params;
            if (!test_null.empty()) {
                null_params = load_params(test_null);
            }
            std::optional<LayeredParams> alt_params;
            if (!test_alt.empty()) {
                alt_params = load_params(test_alt);
            }
            const std::uint64_t seed = test_seed_opt->count() ? test_seed : default_seed();
            nlohmann::json j;
            j["layers"] = nlohmann::json::object();
            for (const auto& [s, sample] : samples) {
                const Vector gamma = null_params ? null_params->layer(s) : Vector::Constant(sample.n, test_null_const);
                const FitResult fit = fit_layer(sample, test_fit.config());
                if (!fit.converged) {
                    throw NumericalError("layer " + std::to_string(s) + " fit did not converge");
                }
                TestReport report;
                if (test_method == "lr") {
                    report = lr_test(lr_statistic(sample, gamma, fit), test_alpha);
                } else if (test_linf_C > 0.0) {
                    report = linf_test(sample, gamma, fit, test_alpha, AnalyticConstant{test_linf_C});
                } else {
                    MonteCarloCalibration mc;
                    mc.replicates = test_calibration;
                    mc.seed = derive_seed(seed, static_cast<std::uint64_t>(s));
                    mc.fit_config = test_fit.config();
                    mc.threads = threads;
                    report = linf_test(sample, gamma, fit, test_alpha, mc);
                }
                nlohmann::json layer = to_json(report);
                if (alt_params && alt_params->has_layer(s)) {
                    layer["signal"] = to_json(effective_signal(gamma, alt_params->layer(s), sample.n, s, test_alpha));
                }
                j["layers"][std::to_string(s)] = layer;
            }
            Sink sink(test_out, out);
            sink.get() << j.dump(2) << '\n';
            sink.finish(test_out);
            return kOk;
        }

        auto base_spec = [&](const ExperimentFlags& f, ExperimentKind kind) {
            ExperimentSpec spec;
            spec.kind = kind;
            spec.alpha = f.alpha;
            spec.beta_const = f.beta;
            spec.master_seed = f.seed_opt->count() ? f.seed : default_seed();
            spec.fit = f.fit.config();
            spec.threads = threads;
            spec.output_path = f.out;
            spec.svg_path = f.svg;
            return spec;
        };
        auto apply_common = [&](ExperimentSpec& spec, const ExperimentFlags& f) {
            if (!f.n_list.empty()) spec.n_values = parse_int_list(f.n_list);
            if (!f.layers.empty()) spec.layers = parse_int_list(f.layers);
            if (f.replicates > 0) spec.replicates = f.replicates;
            spec.validate();
        };

        if (*power_cmd) {
            ExperimentSpec spec = base_spec(power_f, ExperimentKind::Power);
            spec.n_values = {power_f.full_scale ? 250 : 150};
            spec.layers = {2, 3};
            spec.replicates = power_f.full_scale ? 50 : 100;
            spec.signal_grid = linspace(0.0, 1.0, power_f.grid_points > 0 ? power_f.grid_points
                                                                           : (power_f.full_scale ? 25 : 10));
            spec.redraw_direction = power_f.direction == "per-replicate";
            apply_common(spec, power_f);
            return run_experiment_to(spec, out, err, verbose);
        }
        if (*qq_cmd) {
            ExperimentSpec spec = base_spec(qq_f, ExperimentKind::QQ);
            spec.n_values = {qq_f.full_scale ? 400 : 200};
            spec.layers = {3};
            spec.replicates = 200;
            spec.vertex = qq_f.vertex - 1;
            spec.sigma_source = qq_f.sigma == "oracle" ? SigmaSource::Oracle : SigmaSource::Plugin;
            apply_common(spec, qq_f);
            return run_experiment_to(spec, out, err, verbose);
        }
        if (*cov_cmd) {
            ExperimentSpec spec = base_spec(cov_f, ExperimentKind::Coverage);
            spec.n_values = {cov_f.full_scale ? 400 : 200};
            spec.layers = {3};
            spec.replicates = cov_f.full_scale ? 50 : 200;
            spec.vertex = cov_f.vertex - 1;
            apply_common(spec, cov_f);
            return run_experiment_to(spec, out, err, verbose);
        }
        if (*rate_cmd) {
            ExperimentSpec spec = base_spec(rate_f, ExperimentKind::Rate);
            spec.n_values = rate_f.full_scale ? std::vector<int>{50, 100, 200, 400} : std::vector<int>{30, 60, 120};
            spec.layers = {3};
            spec.replicates = 50;
            apply_common(spec, rate_f);
            return run_experiment_to(spec, out, err, verbose);
        }
        if (*gap_cmd) {
            ExperimentSpec spec = base_spec(gap_f, ExperimentKind::GammaGap);
            spec.n_values = gap_f.full_scale ? std::vector<int>{8, 12, 16, 24, 32, 64, 128}
                                              : std::vector<int>{8, 12, 16, 24, 32};
            spec.layers = {2};
            spec.replicates = 1;
            apply_common(spec, gap_f);
            return run_experiment_to(spec, out, err, verbose);
        }
        if (*exp_cmd) {
            ExperimentSpec spec = load_experiment_spec(exp_file);
            if (!exp_out.empty()) spec.output_path = exp_out;
            if (!exp_svg.empty()) spec.svg_path = exp_svg;
            if (threads > 0) spec.threads = threads;
            return run_experiment_to(spec, out, err, verbose);
        }
        throw ArgumentError("no subcommand");
    } catch (const BoundaryDegreeError& e) {
        report(err, "boundary", e.what());
        return kNumericalError;
    } catch (const NumericalError& e) {
        report(err, "numerical", e.what());
        return kNumericalError;
    } catch (const IoError& e) {
        report(err, "io", e.what());
        return kIoError;
    } catch (const ArgumentError& e) {
        report(err, "argument", e.what());
        return kArgumentError;
    } catch (const DomainError& e) {
        report(err, "argument", e.what());
        return kArgumentError;
    } catch (const std::exception& e) {
        report(err, "argument", e.what());
        return kArgumentError;
    }
}

}  // namespace hyperbeta::cli
