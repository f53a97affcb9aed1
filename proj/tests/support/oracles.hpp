#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the library's numerical paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// Cumulative product of (1 - beta_i) with beta linearly spaced, accumulated in
// long double over log1p terms.
inline long double linear_alpha_bar(int train_steps, int t, long double beta_min,
                                    long double beta_max) {
    long double log_sum = 0.0L;
    for (int i = 0; i <= t; ++i) {
        const long double beta =
            train_steps == 1 ? beta_min
                             : beta_min + (beta_max - beta_min) * i / (train_steps - 1);
        log_sum += std::log1p(-beta);
    }
    return std::exp(log_sum);
}

struct Component1d {
    double weight;
    double mean;
    double variance;
};

// E[x0 | x_t] and E[eps | x_t] for a 1-d mixture by trapezoid quadrature over x0.
struct Posterior1d {
    double x0_mean;
    double eps_mean;
};

inline Posterior1d quadrature_posterior(const std::vector<Component1d>& comps, double x_t,
                                        double alpha_bar, int nodes = 400001) {
    const double a = std::sqrt(alpha_bar);
    const double s = std::sqrt(1.0 - alpha_bar);
    double lo = 1e300, hi = -1e300;
    for (const auto& c : comps) {
        const double sd = std::sqrt(c.variance);
        lo = std::min(lo, c.mean - 12 * sd);
        hi = std::max(hi, c.mean + 12 * sd);
    }
    const double h = (hi - lo) / (nodes - 1);
    long double z = 0, m_x0 = 0, m_eps = 0;
    for (int i = 0; i < nodes; ++i) {
        const double x0 = lo + h * i;
        long double prior = 0;
        for (const auto& c : comps) {
            const double d = x0 - c.mean;
            prior += c.weight * std::exp(-0.5 * d * d / c.variance) /
                     std::sqrt(2 * std::numbers::pi * c.variance);
        }
        const double r = (x_t - a * x0) / s;
        const long double w = prior * std::exp(-0.5 * r * r) * ((i == 0 || i == nodes - 1) ? 0.5 : 1.0);
        z += w;
        m_x0 += w * x0;
        m_eps += w * r;
    }
    return {static_cast<double>(m_x0 / z), static_cast<double>(m_eps / z)};
}

// Two-pass mean and population variance.
struct Moments {
    double mean;
    double variance;
};

inline Moments two_pass(const std::vector<double>& v) {
    long double sum = 0;
    for (double x : v) sum += x;
    const long double mean = sum / v.size();
    long double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {static_cast<double>(mean), static_cast<double>(ss / v.size())};
}

// Stability, consistency, efficiency, convergence recomputed from scratch
// (sum of squares about a long-double mean, explicit scan for extrema).
struct Scores {
    double stab, cons, eff, conv;
};

inline Scores brute_force_scores(const std::vector<double>& e) {
    const Moments m = two_pass(e);
    double lo = e[0], hi = e[0];
    for (double x : e) {
        if (x < lo) lo = x;
        if (x > hi) hi = x;
    }
    const double stab = 1.0 / (1.0 + m.variance);
    return {stab, 1.0 / (1.0 + std::sqrt(m.variance)),
            stab * (1.0 / (1.0 + std::fabs(e.back() - 1.0))), 1.0 / (1.0 + (hi - lo))};
}

inline std::vector<double> normal_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

inline double sq_norm_over_n(const std::vector<double>& x) {
    long double s = 0;
    for (double v : x) s += static_cast<long double>(v) * v;
    return static_cast<double>(s / x.size());
}

}  // namespace oracle
