#include "hyperbeta/random.hpp"

#include <cmath>
#include <numbers>

namespace hyperbeta {

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
}

Rng derive_stream_seed(std::uint64_t master_seed, std::uint64_t replicate_index) {
    return Rng(derive_seed(master_seed, replicate_index));
}

}  // namespace hyperbeta
