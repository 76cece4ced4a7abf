#include "oracle.hpp"

#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace hyperbeta::oracle {

std::vector<Edge> all_edges(int n, int s) {
    std::vector<Edge> out;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != s) {
            continue;
        }
        Edge e;
        for (int v = 0; v < n; ++v) {
            if (mask & (1u << v)) {
                e.push_back(v);
            }
        }
        out.push_back(e);
    }
    return out;
}

double neg_log_likelihood(const Vector& beta, int s, const DegreeVector& degrees) {
    const int n = static_cast<int>(beta.size());
    double total = 0.0;
    for (const Edge& e : all_edges(n, s)) {
        double x = 0.0;
        for (int v : e) {
            x += beta[v];
        }
        total += std::log(1.0 + std::exp(x));
    }
    for (int v = 0; v < n; ++v) {
        total -= beta[v] * static_cast<double>(degrees[v]);
    }
    return total;
}

std::map<DegreeVector, double> exact_degree_distribution(const LayeredParams& params, int s) {
    const int n = params.n;
    const auto edges = all_edges(n, s);
    const int m = static_cast<int>(edges.size());
    if (m > 20) {
        throw std::invalid_argument("exact_degree_distribution: C(n, s) > 20");
    }
    const Vector& beta = params.layer(s);
    std::vector<double> p(m);
    for (int k = 0; k < m; ++k) {
        double x = 0.0;
        for (int v : edges[k]) {
            x += beta[v];
        }
        p[k] = std::exp(x) / (1.0 + std::exp(x));
    }
    std::map<DegreeVector, double> law;
    for (std::uint32_t subset = 0; subset < (1u << m); ++subset) {
        double prob = 1.0;
        DegreeVector d(n, 0);
        for (int k = 0; k < m; ++k) {
            if (subset & (1u << k)) {
                prob *= p[k];
                for (int v : edges[k]) {
                    ++d[v];
                }
            } else {
                prob *= 1.0 - p[k];
            }
        }
        law[d] += prob;
    }
    return law;
}

namespace {

double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Vector brute_force_mle(const LayerSample& sample, const BruteForceSchedule& schedule) {
    const int n = sample.n;
    const int s = sample.s;
    if (n > 6) {
        throw std::invalid_argument("brute_force_mle: n too large");
    }
    const auto cap = static_cast<std::int64_t>(all_edges(n - 1, s - 1).size());
    for (auto d : sample.degrees) {
        if (d == 0 || d == cap) {
            throw std::invalid_argument("brute_force_mle: boundary degree, MLE does not exist");
        }
    }
    Vector beta = Vector::Zero(n);
    for (int sweep = 0; sweep < schedule.max_sweeps; ++sweep) {
        double biggest_move = 0.0;
        for (int v = 0; v < n; ++v) {
            const auto along = [&](double x) {
                Vector b = beta;
                b[v] = x;
                return neg_log_likelihood(b, s, sample.degrees);
            };
            // Convex in each coordinate: widen until the function rises at both ends.
            constexpr double probe = 1e-6;
            double lo = beta[v] - schedule.initial_halfwidth;
            double hi = beta[v] + schedule.initial_halfwidth;
            double widen = schedule.initial_halfwidth;
            while (along(hi) < along(hi - probe) || along(lo) < along(lo + probe)) {
                if (along(hi) < along(hi - probe)) hi += widen;
                if (along(lo) < along(lo + probe)) lo -= widen;
                widen *= 2.0;
                if (widen > 1e3) {
                    throw std::runtime_error("brute_force_mle: coordinate diverged");
                }
            }
            const double x = golden_section(along, lo, hi, 1e-11);
            biggest_move = std::max(biggest_move, std::abs(x - beta[v]));
            beta[v] = x;
        }
        if (biggest_move < schedule.coordinate_tol) {
            return beta;
        }
    }
    throw std::runtime_error("brute_force_mle: no convergence");
}

Vector fd_gradient(const Vector& beta, const LayerSample& sample, double step) {
    const int n = static_cast<int>(beta.size());
    Vector g(n);
    for (int v = 0; v < n; ++v) {
        Vector up = beta, down = beta;
        up[v] += step;
        down[v] -= step;
        g[v] = (neg_log_likelihood(up, sample.s, sample.degrees) -
                neg_log_likelihood(down, sample.s, sample.degrees)) /
               (2.0 * step);
    }
    return g;
}

Matrix fd_hessian(const Vector& beta, const LayerSample& sample, double step) {
    const int n = static_cast<int>(beta.size());
    Matrix h(n, n);
    const auto f = [&](int i, double di, int j, double dj) {
        Vector b = beta;
        b[i] += di;
        b[j] += dj;
        return neg_log_likelihood(b, sample.s, sample.degrees);
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = (f(i, step, j, step) - f(i, step, j, -step) - f(i, -step, j, step) +
                              f(i, -step, j, -step)) /
                             (4.0 * step * step);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

}  // namespace hyperbeta::oracle
