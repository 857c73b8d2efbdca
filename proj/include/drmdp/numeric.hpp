#pragma once

// Small numerical building blocks shared by the dual solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace drmdp::numeric {

struct LineMax {
    double x = 0.0;
    double fx = 0.0;
    std::size_t evaluations = 0;
};

/**
 * Golden-section search for the maximum of a concave (unimodal) function on [lo, hi].
 *
 * Stops once the bracket is narrower than rel_tol * (1 + |f(best)|) or after
 * max_iters shrink steps. Returns the best evaluated point, so the reported
 * value is always one that f actually attains.
 */
template <class F>
LineMax golden_section_max(F&& f, double lo, double hi, double rel_tol, std::size_t max_iters) {
    constexpr double inv_phi = 0.6180339887498948482; // 1/phi
    double a = lo;
    double b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    std::size_t evals = 2;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const double best = std::max(f1, f2);
        if (b - a < rel_tol * (1.0 + std::abs(best))) break;
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++evals;
    }
    if (f1 >= f2) return {x1, f1, evals};
    return {x2, f2, evals};
}

/**
 * Euclidean projection onto the probability simplex (sort-and-threshold).
 * Deterministic; output sums to one up to rounding.
 */
inline std::vector<double> project_to_simplex(std::span<const double> y) {
    const std::size_t n = y.size();
    std::vector<double> u(y.begin(), y.end());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cumsum += u[i];
        const double t = (cumsum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = std::max(y[i] - theta, 0.0);
    return x;
}

/// Rescales a nonnegative vector to sum to one.
inline void normalize(std::span<double> x) {
    const double sum = std::accumulate(x.begin(), x.end(), 0.0);
    if (sum > 0.0)
        for (double& v : x) v /= sum;
}

} // namespace drmdp::numeric
