#pragma once

#include <cstdint>
#include <map>
#include <span>

#include "hyperbeta/core.hpp"
#include "hyperbeta/random.hpp"

namespace hyperbeta {

/// Inclusion probability of one s-subset (0-based vertex ids).
double edge_probability(const LayeredParams& params, int s, std::span<const int> edge);
double edge_probability(const LayeredParams& params, int s, const Edge& edge);

/// One independent Bernoulli draw per s-subset, streamed in lexicographic order.
LayerSample sample_layer(const LayeredParams& params, int s, Rng& rng, bool retain_edges = false);

/// Stream used for layer s inside sample_layered.
Rng layer_stream(std::uint64_t stream_seed, int s);

/// Samples every layer of params, each from its own substream of stream_seed.
std::map<int, LayerSample> sample_layered(const LayeredParams& params, std::uint64_t stream_seed,
                                          bool retain_edges = false);

}  // namespace hyperbeta
