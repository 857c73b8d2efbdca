#pragma once

// Least divergence needed to pull one action's expected payoff down to a level t:
//
//   c(t) = min { D(P || mu) : E_P[z] <= t }
//
// c is convex and nonincreasing, zero for t >= E_mu[z], finite at t = min z and
// +inf below. Its multiplier beta = -c'(t) is what the optimal action weights are
// built from (see robust_bellman.hpp).

#include "drmdp/errors.hpp"
#include "drmdp/uncertainty.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace drmdp {

struct CostPoint {
    double cost = 0.0;
    double beta = 0.0;       ///< -dc/dt; +inf at t = min z
    double tau = 1.0;        ///< f_k only: threshold of the optimal likelihood ratio (tau - k' beta z)_+^{1/k'}
};

namespace detail {

inline constexpr int kRootBits = 52;
inline constexpr std::uintmax_t kRootMaxIters = 200;

/// Root of f on [lo, hi] (f_lo, f_hi of opposite sign) to full precision, or to abs_tol near zero.
template <class F>
double bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi, double abs_tol = 0.0) {
    std::uintmax_t iters = kRootMaxIters;
    boost::math::tools::eps_tolerance<double> rel(kRootBits);
    auto done = [&](double a, double b) { return std::abs(b - a) <= abs_tol || rel(a, b); };
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, done, iters);
    if (iters >= kRootMaxIters && !done(r.first, r.second))
        throw NonConvergenceError("bracketed_root: no convergence", 0.5 * (r.first + r.second), r.second - r.first);
    return 0.5 * (r.first + r.second);
}

/// Smallest beta on the doubling ladder 1/scale * 2^j with g(beta) <= 0; g must be nonincreasing.
template <class G>
double doubling_bracket(G&& g, double scale, double& lo, double& g_lo, double& g_hi) {
    double hi = 1.0 / scale;
    g_hi = g(hi);
    while (g_hi > 0.0) {
        lo = hi;
        g_lo = g_hi;
        hi *= 2.0;
        if (!std::isfinite(hi)) break;
        g_hi = g(hi);
    }
    return hi;
}

/// Branch shifted so that its minimum payoff is zero.
struct ShiftedBranch {
    std::vector<double> z;  // z - min z, ascending
    std::vector<double> mu;
    double min_value = 0.0;
    double mean = 0.0;      // unshifted
    double span = 0.0;
    double min_mass = 0.0;  // mu of the argmin set

    explicit ShiftedBranch(const ActionBranch& b) {
        const std::size_t m = b.values.size();
        std::vector<std::size_t> order(m);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return b.values[i] < b.values[j]; });
        min_value = b.values[order.front()];
        span = b.values[order.back()] - min_value;
        z.reserve(m);
        mu.reserve(m);
        for (std::size_t i : order) {
            z.push_back(b.values[i] - min_value);
            mu.push_back(b.probs[i]);
            mean += b.probs[i] * b.values[i];
            if (b.values[i] == min_value) min_mass += b.probs[i];
        }
    }
};

inline CostPoint kl_cost(const ShiftedBranch& br, double t) {
    const double inf = std::numeric_limits<double>::infinity();
    if (t < br.min_value) return {inf, inf};
    if (t >= br.mean || br.span == 0.0) return {0.0, 0.0};
    const double level = t - br.min_value;
    if (level == 0.0) return {-std::log(br.min_mass), inf};

    auto log_partition = [&](double beta) {
        double acc = 0.0; // E[exp(-beta z)] - 1
        for (std::size_t j = 0; j < br.z.size(); ++j) acc += br.mu[j] * std::expm1(-beta * br.z[j]);
        return std::log1p(acc);
    };
    auto tilted_gap = [&](double beta) {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < br.z.size(); ++j) {
            const double w = br.mu[j] * std::exp(-beta * br.z[j]);
            num += w * br.z[j];
            den += w;
        }
        return num / den - level;
    };

    double lo = 0.0;
    double g_lo = br.mean - br.min_value - level;
    double g_hi = 0.0;
    const double hi = doubling_bracket(tilted_gap, br.span, lo, g_lo, g_hi);
    if (!std::isfinite(hi)) return {-std::log(br.min_mass), inf};
    const double beta = g_hi == 0.0 ? hi : bracketed_root(tilted_gap, lo, hi, g_lo, g_hi);
    return {std::max(-beta * level - log_partition(beta), 0.0), beta};
}

/// Cressie-Read pieces with k' = k - 1: optimal ratio L = (tau - k' beta z)_+^{1/k'}.
struct FkCostModel {
    double k;
    double kp;    // k - 1
    double kstar; // k / (k - 1)

    explicit FkCostModel(double k_) : k(k_), kp(k_ - 1.0), kstar(k_ / (k_ - 1.0)) {}

    double f(double x) const { return (std::pow(x, k) - k * x + k - 1.0) / (k * kp); }
    double ratio(double gap) const { return gap <= 0.0 ? 0.0 : (kp == 1.0 ? gap : std::pow(gap, 1.0 / kp)); }

    /// min_P beta E_P[z] + D(P || mu) on the shifted branch, i.e. the dual value
    /// sup_eta -eta - E f*(-beta z - eta) attained at eta = (1 - tau)/k'. Returns tau through the pointer.
    double penalized_min(const ShiftedBranch& br, double beta, double* tau_out = nullptr) const {
        const double tau = solve_tau(br, beta);
        if (tau_out != nullptr) *tau_out = tau;
        double conj = 0.0;
        for (std::size_t j = 0; j < br.z.size(); ++j) {
            const double gap = tau - kp * beta * br.z[j];
            const double power = gap > 0.0 ? ratio(gap) * gap : 0.0; // gap_+^{k*}
            conj += br.mu[j] * (power - 1.0) / k;
        }
        return -(1.0 - tau) / kp - conj;
    }

    /// tau with E_mu[(tau - w)_+^{1/k'}] = 1 for w = k' beta z.
    double solve_tau(const ShiftedBranch& br, double beta) const {
        if (beta == 0.0) return 1.0;
        const std::size_t m = br.z.size();
        if (kp == 1.0) {
            // Piecewise linear: scan the active prefix of the ascending payoffs.
            double s0 = 0.0;
            double s1 = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                s0 += br.mu[j];
                s1 += br.mu[j] * beta * br.z[j];
                const double tau = (1.0 + s1) / s0;
                if (j + 1 == m || tau <= beta * br.z[j + 1]) return tau;
            }
        }
        auto excess = [&](double tau) {
            double e = -1.0;
            for (std::size_t j = 0; j < m; ++j) e += br.mu[j] * ratio(tau - kp * beta * br.z[j]);
            return e;
        };
        const double lo = 1.0;
        const double hi = 1.0 + kp * beta * br.z.back();
        const double e_lo = excess(lo);
        if (e_lo >= 0.0) return lo;
        return bracketed_root(excess, lo, hi, e_lo, excess(hi));
    }
};

inline CostPoint fk_cost(const FkCostModel& model, const ShiftedBranch& br, double t) {
    const double inf = std::numeric_limits<double>::infinity();
    if (t < br.min_value) return {inf, inf, 1.0};
    if (t >= br.mean || br.span == 0.0) return {0.0, 0.0, 1.0};
    const double level = t - br.min_value;
    auto corner = [&] {
        const double q = br.min_mass;
        return CostPoint{q * model.f(1.0 / q) + (1.0 - q) * model.f(0.0), inf, 1.0};
    };
    if (level == 0.0) return corner();

    auto mean_gap = [&](double beta) {
        const double tau = model.solve_tau(br, beta);
        double e = 0.0;
        for (std::size_t j = 0; j < br.z.size(); ++j)
            e += br.mu[j] * model.ratio(tau - model.kp * beta * br.z[j]) * br.z[j];
        return e - level;
    };

    double lo = 0.0;
    double g_lo = br.mean - br.min_value - level;
    double g_hi = 0.0;
    const double hi = doubling_bracket(mean_gap, br.span, lo, g_lo, g_hi);
    if (!std::isfinite(hi)) return corner();
    const double beta = g_hi == 0.0 ? hi : bracketed_root(mean_gap, lo, hi, g_lo, g_hi);
    double tau = 1.0;
    const double cost = model.penalized_min(br, beta, &tau) - beta * level;
    return {std::max(cost, 0.0), beta, tau};
}

} // namespace detail

/// c(t) for one action under the given divergence (rho is ignored).
inline CostPoint divergence_cost(const ActionBranch& b, const UncertaintyModel& u, double t) {
    const detail::ShiftedBranch br(b);
    if (u.kind() == DivergenceKind::KL) return detail::kl_cost(br, t);
    return detail::fk_cost(detail::FkCostModel(u.k()), br, t);
}

} // namespace drmdp
