#include "hyperbeta/sampler.hpp"

#include <string>

#include "hyperbeta/combinatorics.hpp"

namespace hyperbeta {

double edge_probability(const LayeredParams& params, int s, std::span<const int> edge) {
    const Vector& beta = params.layer(s);
    if (static_cast<int>(edge.size()) != s) {
        throw ArgumentError("edge has " + std::to_string(edge.size()) + " vertices, layer is " +
                            std::to_string(s));
    }
    double sum = 0.0;
    for (int v : edge) {
        if (v < 0 || v >= params.n) {
            throw ArgumentError("edge vertex " + std::to_string(v) + " out of range");
        }
        sum += beta[v];
    }
    return logistic(sum);
}

double edge_probability(const LayeredParams& params, int s, const Edge& edge) {
    return edge_probability(params, s, std::span<const int>(edge.data(), edge.size()));
}

LayerSample sample_layer(const LayeredParams& params, int s, Rng& rng, bool retain_edges) {
    const Vector& beta = params.layer(s);
    if (params.n < s) {
        throw ArgumentError("n < s: cannot sample layer " + std::to_string(s) + " with n = " +
                            std::to_string(params.n));
    }
    // validated so degree counts cannot overflow
    (void)binomial(params.n, s);

    LayerSample out;
    out.n = params.n;
    out.s = s;
    out.degrees.assign(params.n, 0);
    std::vector<Edge> edges;

    for_each_subset_sum(params.n, s, beta, [&](std::span<const int> members, double sum) {
        if (rng.uniform() < logistic(sum)) {
            for (int v : members) {
                ++out.degrees[v];
            }
            if (retain_edges) {
                edges.emplace_back(members.begin(), members.end());
            }
        }
    });
    if (retain_edges) {
        out.edges = std::move(edges);
    }
    return out;
}

Rng layer_stream(std::uint64_t stream_seed, int s) {
    return Rng(derive_seed(stream_seed, static_cast<std::uint64_t>(s)));
}

std::map<int, LayerSample> sample_layered(const LayeredParams& params, std::uint64_t stream_seed,
                                          bool retain_edges) {
    params.validate();
    std::map<int, LayerSample> out;
    for (const auto& [s, beta] : params.layers) {
        Rng rng = layer_stream(stream_seed, s);
        out.emplace(s, sample_layer(params, s, rng, retain_edges));
    }
    return out;
}

}  // namespace hyperbeta
