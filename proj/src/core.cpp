#include "hyperbeta/core.hpp"

#include <limits>
#include <numeric>

namespace hyperbeta {

std::int64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step
        const std::int64_t num = n - k + i;
        const std::int64_t g = std::gcd(result, i);
        const std::int64_t a = result / g;
        const std::int64_t b = i / g;
        const std::int64_t c = num / b;
        if (a > std::numeric_limits<std::int64_t>::max() / c) {
            throw ArgumentError("binomial coefficient C(" + std::to_string(n) + ", " +
                                std::to_string(k) + ") overflows 64 bits");
        }
        result = a * c;
    }
    return result;
}

double binomial_real(std::int64_t n, std::int64_t k) {
    return static_cast<double>(binomial(n, k));
}

const Vector& LayeredParams::layer(int s) const {
    auto it = layers.find(s);
    if (it == layers.end()) {
        throw ArgumentError("layer " + std::to_string(s) + " not present");
    }
    return it->second;
}

void LayeredParams::validate() const {
    if (n < 2) {
        throw ArgumentError("n must be at least 2");
    }
    if (r < 2) {
        throw ArgumentError("r must be at least 2");
    }
    if (bound_M && !(*bound_M > 0.0)) {
        throw ArgumentError("bound M must be positive");
    }
    for (const auto& [s, beta] : layers) {
        if (s < 2 || s > r) {
            throw ArgumentError("layer size " + std::to_string(s) + " outside 2..r");
        }
        if (beta.size() != n) {
            throw ArgumentError("layer " + std::to_string(s) + " has length " +
                                std::to_string(beta.size()) + ", expected " + std::to_string(n));
        }
        if (!beta.allFinite()) {
            throw ArgumentError("layer " + std::to_string(s) + " has non-finite entries");
        }
        if (bound_M && max_abs(beta) > *bound_M) {
            throw ArgumentError("layer " + std::to_string(s) + " exceeds declared bound M");
        }
    }
}

LayeredParams LayeredParams::constant(int n, int r, double c) {
    std::vector<int> sizes;
    for (int s = 2; s <= r; ++s) {
        sizes.push_back(s);
    }
    return constant(n, sizes, c);
}

LayeredParams LayeredParams::constant(int n, const std::vector<int>& layer_sizes, double c) {
    LayeredParams p;
    p.n = n;
    p.r = 2;
    for (int s : layer_sizes) {
        p.layers[s] = Vector::Constant(n, c);
        p.r = std::max(p.r, s);
    }
    return p;
}

void LayerSample::validate() const {
    if (s < 2 || n < 1) {
        throw ArgumentError("invalid layer sample shape");
    }
    if (static_cast<int>(degrees.size()) != n) {
        throw ArgumentError("degree vector length " + std::to_string(degrees.size()) +
                            " does not match n = " + std::to_string(n));
    }
    const std::int64_t cap = binomial(n - 1, s - 1);
    for (std::size_t v = 0; v < degrees.size(); ++v) {
        if (degrees[v] < 0 || degrees[v] > cap) {
            throw ArgumentError("degree of vertex " + std::to_string(v + 1) + " outside [0, " +
                                std::to_string(cap) + "]");
        }
    }
    const std::int64_t total = std::accumulate(degrees.begin(), degrees.end(), std::int64_t{0});
    if (total % s != 0) {
        throw ArgumentError("degree sum is not a multiple of s");
    }
    if (edges) {
        for (const auto& e : *edges) {
            if (static_cast<int>(e.size()) != s) {
                throw ArgumentError("edge of wrong size in layer " + std::to_string(s));
            }
        }
        if (degrees_from_edges(n, *edges) != degrees) {
            throw ArgumentError("degrees do not match retained edges");
        }
    }
}

DegreeVector degrees_from_edges(int n, const std::vector<Edge>& edges) {
    DegreeVector d(n, 0);
    for (const auto& e : edges) {
        for (int v : e) {
            if (v < 0 || v >= n) {
                throw ArgumentError("edge vertex out of range");
            }
            ++d[v];
        }
    }
    return d;
}

double max_abs(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace hyperbeta
