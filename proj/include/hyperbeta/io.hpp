#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "hyperbeta/core.hpp"
#include "hyperbeta/estimator.hpp"
#include "hyperbeta/goftest.hpp"
#include "hyperbeta/inference.hpp"

namespace hyperbeta {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

// Vertex ids are 1-based in every file format and 0-based in memory.

/// Header `layer,vertex,degree`; one row per (layer, vertex).
void write_degrees_csv(std::ostream& out, const std::map<int, LayerSample>& samples);
std::map<int, LayerSample> read_degrees_csv(std::istream& in);

/// Header `layer,v1,...,vr` for the widest layer; each row lists exactly s vertices.
void write_edges_csv(std::ostream& out, const std::map<int, LayerSample>& samples);

/// Parameter file:
///
///     n = 5
///     bound_M = 3          # optional
///     [layer 2]
///     beta = 0.1 -0.2 0 0.3 0
///     [layer 3]
///     beta_const = 0
///
/// Lines starting with '#' are comments.
LayeredParams parse_params(std::istream& in);
LayeredParams load_params(const std::string& path);
void write_params(std::ostream& out, const LayeredParams& params);

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const LayerFitError& err);
nlohmann::json to_json(const TestReport& report);
nlohmann::json to_json(const SignalReport& report);
nlohmann::json to_json(const ConfidenceReport& report);

/// Header `layer,vertex,estimate,low,high`.
void write_intervals_csv(std::ostream& out, const ConfidenceReport& report);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool lines = true;
};

/// Minimal standalone SVG: axes, tick labels and one polyline or point set per series.
void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<SvgSeries>& series);

}  // namespace hyperbeta
