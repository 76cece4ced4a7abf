#include "hyperbeta/combinatorics.hpp"

#include <algorithm>
#include <numeric>

namespace hyperbeta {

KSubsets::KSubsets(std::vector<int> ground, int k) : ground_(std::move(ground)), k_(k) {
    std::sort(ground_.begin(), ground_.end());
    ground_.erase(std::unique(ground_.begin(), ground_.end()), ground_.end());
    if (k_ < 0) {
        throw ArgumentError("subset size must be non-negative");
    }
}

KSubsets::iterator::iterator(const std::vector<int>* ground, int k) : ground_(ground) {
    if (k > static_cast<int>(ground->size())) {
        return;
    }
    pos_.resize(k);
    std::iota(pos_.begin(), pos_.end(), 0);
    current_.resize(k);
    for (int j = 0; j < k; ++j) {
        current_[j] = (*ground)[pos_[j]];
    }
    done_ = false;
}

KSubsets::iterator& KSubsets::iterator::operator++() {
    const int k = static_cast<int>(pos_.size());
    const int m = static_cast<int>(ground_->size());
    int j = k - 1;
    while (j >= 0 && pos_[j] == m - k + j) {
        --j;
    }
    if (j < 0) {
        done_ = true;
        return *this;
    }
    ++pos_[j];
    for (int t = j + 1; t < k; ++t) {
        pos_[t] = pos_[t - 1] + 1;
    }
    for (int t = j; t < k; ++t) {
        current_[t] = (*ground_)[pos_[t]];
    }
    return *this;
}

KSubsets enumerate_subsets(std::vector<int> ground, int k) {
    return KSubsets(std::move(ground), k);
}

std::vector<int> iota_ground(int n) {
    std::vector<int> g(n);
    std::iota(g.begin(), g.end(), 0);
    return g;
}

}  // namespace hyperbeta
