#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <span>
#include <vector>

#include "hyperbeta/core.hpp"

namespace hyperbeta {

/// Lexicographic stream of the k-subsets of a ground set. Holds O(k) state;
/// nothing is materialised. An empty ground set with k = 0 yields one empty
/// subset; k > |ground| yields nothing.
class KSubsets {
public:
    KSubsets(std::vector<int> ground, int k);

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = std::vector<int>;
        using difference_type = std::ptrdiff_t;
        using pointer = const value_type*;
        using reference = const value_type&;

        iterator() = default;
        reference operator*() const { return current_; }
        pointer operator->() const { return &current_; }
        iterator& operator++();
        void operator++(int) { ++*this; }
        bool operator==(const iterator& other) const { return done_ == other.done_; }

    private:
        friend class KSubsets;
        iterator(const std::vector<int>* ground, int k);

        const std::vector<int>* ground_ = nullptr;
        std::vector<int> pos_;
        std::vector<int> current_;
        bool done_ = true;
    };

    iterator begin() const { return iterator(&ground_, k_); }
    iterator end() const { return iterator(); }

    std::int64_t count() const { return binomial(static_cast<std::int64_t>(ground_.size()), k_); }

private:
    std::vector<int> ground_;
    int k_;
};

KSubsets enumerate_subsets(std::vector<int> ground, int k);

/// 0, 1, ..., n-1.
std::vector<int> iota_ground(int n);

/// Calls f(std::span<const int> members, double sum) for every s-subset of
/// {0, ..., n-1} in lexicographic order, where sum is the total of weights over
/// the members. Prefix sums are maintained incrementally, so the cost per
/// subset is O(1) amortised plus whatever f does.
template <class F>
void for_each_subset_sum(int n, int s, const Vector& weights, F&& f) {
    if (s < 1 || s > n) {
        return;
    }
    std::vector<int> idx(s);
    // prefix[j] = weights of idx[0..j-1]
    std::vector<double> prefix(s + 1, 0.0);
    for (int j = 0; j < s; ++j) {
        idx[j] = j;
        prefix[j + 1] = prefix[j] + weights[j];
    }
    const int last = s - 1;
    while (true) {
        const double base = prefix[last];
        for (int v = idx[last]; v < n; ++v) {
            idx[last] = v;
            f(std::span<const int>(idx.data(), idx.size()), base + weights[v]);
        }
        // advance the odometer on positions 0..last-1
        int j = last - 1;
        while (j >= 0 && idx[j] == n - s + j) {
            --j;
        }
        if (j < 0) {
            return;
        }
        ++idx[j];
        prefix[j + 1] = prefix[j] + weights[idx[j]];
        for (int t = j + 1; t < s; ++t) {
            idx[t] = idx[t - 1] + 1;
            if (t < last) {
                prefix[t + 1] = prefix[t] + weights[idx[t]];
            }
        }
    }
}

}  // namespace hyperbeta
