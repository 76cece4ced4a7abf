#include "hyperbeta/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace hyperbeta {

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
        return "";
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, sep)) {
        out.push_back(trim(field));
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

long long parse_int(const std::string& text, const std::string& what) {
    long long value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ArgumentError("cannot parse " + what + " '" + text + "' as an integer");
    }
    return value;
}

double parse_real(const std::string& text, const std::string& what) {
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ArgumentError("cannot parse " + what + " '" + text + "' as a number");
    }
    return value;
}

std::string strip_comment(const std::string& line) {
    const auto hash = line.find('#');
    return trim(hash == std::string::npos ? line : line.substr(0, hash));
}

}  // namespace

void write_degrees_csv(std::ostream& out, const std::map<int, LayerSample>& samples) {
    out << "layer,vertex,degree\n";
    for (const auto& [s, sample] : samples) {
        for (int v = 0; v < sample.n; ++v) {
            out << s << ',' << (v + 1) << ',' << sample.degrees[v] << '\n';
        }
    }
}

std::map<int, LayerSample> read_degrees_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != "layer,vertex,degree") {
        throw ArgumentError("degree CSV must start with header 'layer,vertex,degree'");
    }
    std::map<int, std::map<int, std::int64_t>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 3) {
            throw ArgumentError("degree CSV line " + std::to_string(line_no) + ": expected 3 fields");
        }
        const int s = static_cast<int>(parse_int(fields[0], "layer"));
        const int v = static_cast<int>(parse_int(fields[1], "vertex"));
        const auto d = parse_int(fields[2], "degree");
        if (!rows[s].emplace(v, d).second) {
            throw ArgumentError("degree CSV line " + std::to_string(line_no) + ": duplicate vertex");
        }
    }
    std::map<int, LayerSample> out;
    for (const auto& [s, by_vertex] : rows) {
        LayerSample sample;
        sample.s = s;
        sample.n = static_cast<int>(by_vertex.size());
        int expected = 1;
        for (const auto& [v, d] : by_vertex) {
            if (v != expected++) {
                throw ArgumentError("layer " + std::to_string(s) + " vertices must be 1.." +
                                    std::to_string(sample.n) + " without gaps");
            }
            sample.degrees.push_back(d);
        }
        sample.validate();
        out.emplace(s, std::move(sample));
    }
    if (out.empty()) {
        throw ArgumentError("degree CSV has no rows");
    }
    return out;
}

void write_edges_csv(std::ostream& out, const std::map<int, LayerSample>& samples) {
    int width = 0;
    for (const auto& [s, sample] : samples) {
        width = std::max(width, s);
    }
    out << "layer";
    for (int j = 1; j <= width; ++j) {
        out << ",v" << j;
    }
    out << '\n';
    for (const auto& [s, sample] : samples) {
        if (!sample.edges) {
            throw ArgumentError("layer " + std::to_string(s) + " was sampled without edges");
        }
        for (const auto& e : *sample.edges) {
            out << s;
            for (int v : e) {
                out << ',' << (v + 1);
            }
            out << '\n';
        }
    }
}

LayeredParams parse_params(std::istream& in) {
    LayeredParams params;
    std::optional<int> current;
    std::map<int, std::vector<double>> explicit_beta;
    std::map<int, double> const_beta;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = strip_comment(line);
        if (text.empty()) {
            continue;
        }
        const std::string where = "params line " + std::to_string(line_no);
        if (text.front() == '[') {
            if (text.back() != ']') {
                throw ArgumentError(where + ": unterminated section header");
            }
            std::istringstream hs(text.substr(1, text.size() - 2));
            std::string word;
            int s = 0;
            if (!(hs >> word >> s) || word != "layer") {
                throw ArgumentError(where + ": expected [layer s]");
            }
            if (explicit_beta.count(s) || const_beta.count(s)) {
                throw ArgumentError(where + ": layer " + std::to_string(s) + " declared twice");
            }
            current = s;
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError(where + ": expected key = value");
        }
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (!current) {
            if (key == "n") {
                params.n = static_cast<int>(parse_int(value, "n"));
            } else if (key == "bound_M") {
                params.bound_M = parse_real(value, "bound_M");
            } else if (key == "r") {
                params.r = static_cast<int>(parse_int(value, "r"));
            } else {
                throw ArgumentError(where + ": unknown key '" + key + "'");
            }
            continue;
        }
        if (key == "beta") {
            std::vector<double> beta;
            std::string spaced = value;
            std::replace(spaced.begin(), spaced.end(), ',', ' ');
            std::istringstream vs(spaced);
            std::string tok;
            while (vs >> tok) {
                beta.push_back(parse_real(tok, "beta entry"));
            }
            explicit_beta[*current] = std::move(beta);
        } else if (key == "beta_const") {
            const_beta[*current] = parse_real(value, "beta_const");
        } else {
            throw ArgumentError(where + ": unknown layer key '" + key + "'");
        }
    }
    if (params.n < 2) {
        throw ArgumentError("params: n must be given and at least 2");
    }
    int max_s = 0;
    for (const auto& [s, beta] : explicit_beta) {
        params.layers[s] = Eigen::Map<const Vector>(beta.data(), static_cast<Eigen::Index>(beta.size()));
        max_s = std::max(max_s, s);
    }
    for (const auto& [s, c] : const_beta) {
        params.layers[s] = Vector::Constant(params.n, c);
        max_s = std::max(max_s, s);
    }
    if (params.layers.empty()) {
        throw ArgumentError("params: no [layer s] blocks");
    }
    if (params.r == 0) {
        params.r = max_s;
    }
    params.validate();
    return params;
}

LayeredParams load_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open parameter file '" + path + "'");
    }
    return parse_params(in);
}

void write_params(std::ostream& out, const LayeredParams& params) {
    out << "n = " << params.n << '\n';
    out << "r = " << params.r << '\n';
    if (params.bound_M) {
        out << "bound_M = " << format_double(*params.bound_M) << '\n';
    }
    for (const auto& [s, beta] : params.layers) {
        out << "[layer " << s << "]\nbeta =";
        for (Eigen::Index v = 0; v < beta.size(); ++v) {
            out << ' ' << format_double(beta[v]);
        }
        out << '\n';
    }
}

namespace {

nlohmann::json vector_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v[i]);
    }
    return arr;
}

}  // namespace

nlohmann::json to_json(const FitResult& fit) {
    nlohmann::json j;
    j["layer"] = fit.s;
    j["n"] = fit.n;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iters;
    j["final_grad_norm"] = fit.final_grad_norm;
    j["tolerance"] = fit.tolerance;
    j["method"] = to_string(fit.method_used);
    j["beta_hat"] = vector_json(fit.beta_hat);
    if (fit.stderr_diag.size() > 0) {
        j["stderr"] = vector_json(fit.stderr_diag);
    }
    j["existence_warning"] = fit.existence_warning ? nlohmann::json(*fit.existence_warning) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const LayerFitError& err) {
    nlohmann::json j;
    j["converged"] = false;
    j["error"] = err.message;
    j["existence_warning"] = err.existence_warning ? nlohmann::json(*err.existence_warning) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const TestReport& r) {
    nlohmann::json j;
    j["layer"] = r.layer;
    j["n"] = r.n;
    j["method"] = to_string(r.method);
    j["alpha"] = r.alpha;
    if (r.method == TestMethod::LR) {
        j["log_lr"] = r.log_lr;
        j["lambda"] = r.lambda;
    }
    j["linf_distance"] = r.linf_distance;
    j["p_value"] = r.p_value ? nlohmann::json(*r.p_value) : nlohmann::json(nullptr);
    j["reject"] = r.reject ? nlohmann::json(*r.reject) : nlohmann::json(nullptr);
    if (r.cutoff) {
        j["cutoff"] = *r.cutoff;
    }
    if (r.linf_constant) {
        j["linf_constant"] = *r.linf_constant;
    }
    j["warnings"] = r.warnings;
    return j;
}

nlohmann::json to_json(const SignalReport& r) {
    return {{"tau_hat", r.tau_hat},
            {"eta_hat", r.eta_hat},
            {"alpha", r.alpha},
            {"predicted_power", r.predicted_power}};
}

nlohmann::json to_json(const ConfidenceReport& r) {
    nlohmann::json j;
    nlohmann::json idx = nlohmann::json::object();
    for (const auto& [s, vs] : r.layer_indices) {
        std::vector<int> one_based;
        for (int v : vs) {
            one_based.push_back(v + 1);
        }
        idx[std::to_string(s)] = one_based;
    }
    j["layer_indices"] = idx;
    j["alpha"] = r.alpha;
    j["dof"] = r.dof;
    j["threshold"] = r.threshold;
    j["statistic"] = r.statistic ? nlohmann::json(*r.statistic) : nlohmann::json(nullptr);
    j["covered"] = r.covered ? nlohmann::json(*r.covered) : nlohmann::json(nullptr);
    nlohmann::json ivs = nlohmann::json::array();
    for (const auto& iv : r.intervals) {
        ivs.push_back({{"layer", iv.layer},
                       {"vertex", iv.vertex + 1},
                       {"estimate", iv.estimate},
                       {"low", iv.low},
                       {"high", iv.high}});
    }
    j["intervals"] = ivs;
    return j;
}

void write_intervals_csv(std::ostream& out, const ConfidenceReport& report) {
    out << "layer,vertex,estimate,low,high\n";
    for (const auto& iv : report.intervals) {
        out << iv.layer << ',' << (iv.vertex + 1) << ',' << format_double(iv.estimate) << ','
            << format_double(iv.low) << ',' << format_double(iv.high) << '\n';
    }
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_svg(std::ostream& out, const std::string& title, const std::string& x_label,
               const std::string& y_label, const std::vector<SvgSeries>& series) {
    constexpr double width = 640, height = 440;
    constexpr double left = 70, right = 20, top = 40, bottom = 60;
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& sr : series) {
        for (double x : sr.x) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
        }
        for (double y : sr.y) {
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    if (!(xmin < xmax)) {
        xmin -= 1.0;
        xmax += 1.0;
    }
    if (!(ymin < ymax)) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    const auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * (width - left - right); };
    const auto py = [&](double y) { return height - bottom - (y - ymin) / (ymax - ymin) * (height - top - bottom); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
        << "</text>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
        << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << height - bottom << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        const double yv = ymin + (ymax - ymin) * t / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - bottom + 16
            << "\" text-anchor=\"middle\">" << format_double(std::round(xv * 1000) / 1000) << "</text>\n";
        out << "<text x=\"" << left - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
            << format_double(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 16 << "\" text-anchor=\"middle\">"
        << xml_escape(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << height / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& sr = series[k];
        const char* color = colors[k % 5];
        const std::size_t m = std::min(sr.x.size(), sr.y.size());
        if (sr.lines) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < m; ++i) {
                out << (i ? " " : "") << px(sr.x[i]) << ',' << py(sr.y[i]);
            }
            out << "\"/>\n";
        } else {
            for (std::size_t i = 0; i < m; ++i) {
                out << "<circle cx=\"" << px(sr.x[i]) << "\" cy=\"" << py(sr.y[i])
                    << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
            }
        }
        out << "<text x=\"" << width - right - 4 << "\" y=\"" << top + 14 * (k + 1)
            << "\" text-anchor=\"end\" fill=\"" << color << "\">" << xml_escape(sr.label) << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace hyperbeta
