#pragma once

#include "drmdp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace drmdp {

using ValueFunction = std::vector<double>;

/// Row-sum tolerance for transition kernels and policies.
inline constexpr double kRowSumTol = 1e-12;

/**
 * Finite MDP with transition kernel P[s][a][s'] and reward R[s][a][s'].
 *
 * Both tensors are stored densely, row-major over (s, a, s'). The object
 * is immutable after construction; only shapes are checked here, the
 * remaining invariants are reported by validate_mdp().
 */
class TabularMDP {
public:
    TabularMDP() = default;

    TabularMDP(std::size_t n_states, std::size_t n_actions, std::vector<double> kernel,
               std::vector<double> reward, double gamma)
        : n_states_(n_states), n_actions_(n_actions), kernel_(std::move(kernel)),
          reward_(std::move(reward)), gamma_(gamma) {
        if (n_states == 0 || n_actions == 0)
            throw DimensionError("TabularMDP: empty state or action space");
        const std::size_t expected = n_states * n_actions * n_states;
        if (kernel_.size() != expected || reward_.size() != expected)
            throw DimensionError("TabularMDP: kernel/reward must have |S|*|A|*|S| = " +
                                 std::to_string(expected) + " entries");
        r_min_ = std::numeric_limits<double>::infinity();
        r_max_ = -std::numeric_limits<double>::infinity();
        for (double r : reward_) {
            r_min_ = std::min(r_min_, r);
            r_max_ = std::max(r_max_, r);
        }
    }

    /// Same as above with explicitly declared reward bounds, checked by validate_mdp().
    TabularMDP(std::size_t n_states, std::size_t n_actions, std::vector<double> kernel,
               std::vector<double> reward, double gamma, double r_min, double r_max)
        : TabularMDP(n_states, n_actions, std::move(kernel), std::move(reward), gamma) {
        declared_bounds_ = {r_min, r_max};
    }

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    double gamma() const noexcept { return gamma_; }

    std::size_t index(std::size_t s, std::size_t a, std::size_t next) const noexcept {
        return (s * n_actions_ + a) * n_states_ + next;
    }

    double p(std::size_t s, std::size_t a, std::size_t next) const noexcept {
        return kernel_[index(s, a, next)];
    }
    double r(std::size_t s, std::size_t a, std::size_t next) const noexcept {
        return reward_[index(s, a, next)];
    }

    std::span<const double> kernel_row(std::size_t s, std::size_t a) const noexcept {
        return {kernel_.data() + index(s, a, 0), n_states_};
    }
    std::span<const double> reward_row(std::size_t s, std::size_t a) const noexcept {
        return {reward_.data() + index(s, a, 0), n_states_};
    }

    const std::vector<double>& kernel() const noexcept { return kernel_; }
    const std::vector<double>& reward() const noexcept { return reward_; }

    /// Reward bounds: declared ones if given, otherwise the observed extremes.
    double r_min() const noexcept { return declared_bounds_ ? declared_bounds_->first : r_min_; }
    double r_max() const noexcept { return declared_bounds_ ? declared_bounds_->second : r_max_; }
    bool has_declared_bounds() const noexcept { return declared_bounds_.has_value(); }

    /// Copy of this model with the kernel replaced (e.g. by an empirical one).
    TabularMDP with_kernel(std::vector<double> kernel) const {
        TabularMDP out(n_states_, n_actions_, std::move(kernel), reward_, gamma_);
        out.declared_bounds_ = declared_bounds_;
        return out;
    }

    /// Copy with a different discount factor.
    TabularMDP with_gamma(double gamma) const {
        TabularMDP out = *this;
        out.gamma_ = gamma;
        return out;
    }

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> kernel_;
    std::vector<double> reward_;
    double gamma_ = 0.0;
    double r_min_ = 0.0;
    double r_max_ = 0.0;
    std::optional<std::pair<double, double>> declared_bounds_;
};

/// Stationary randomized policy: one distribution over actions per state.
class RandomizedPolicy {
public:
    RandomizedPolicy() = default;

    RandomizedPolicy(std::size_t n_states, std::size_t n_actions, std::vector<double> probs)
        : n_states_(n_states), n_actions_(n_actions), probs_(std::move(probs)) {
        if (probs_.size() != n_states * n_actions)
            throw DimensionError("RandomizedPolicy: expected |S|*|A| entries");
    }

    static RandomizedPolicy uniform(std::size_t n_states, std::size_t n_actions) {
        return {n_states, n_actions,
                std::vector<double>(n_states * n_actions, 1.0 / static_cast<double>(n_actions))};
    }

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }

    std::span<const double> row(std::size_t s) const noexcept {
        return {probs_.data() + s * n_actions_, n_actions_};
    }
    std::span<double> row(std::size_t s) noexcept { return {probs_.data() + s * n_actions_, n_actions_}; }

    double operator()(std::size_t s, std::size_t a) const noexcept { return probs_[s * n_actions_ + a]; }

    const std::vector<double>& probs() const noexcept { return probs_; }

    /// True iff every row is nonnegative and sums to one within kRowSumTol.
    bool is_valid() const {
        for (std::size_t s = 0; s < n_states_; ++s) {
            double sum = 0.0;
            for (double x : row(s)) {
                if (!(x >= 0.0) || !std::isfinite(x)) return false;
                sum += x;
            }
            if (std::abs(sum - 1.0) > kRowSumTol) return false;
        }
        return true;
    }

private:
    std::size_t n_states_ = 0;
    std::size_t n_actions_ = 0;
    std::vector<double> probs_;
};

struct ValidationReport {
    bool ok = true;
    std::string message;
    std::optional<std::size_t> state;
    std::optional<std::size_t> action;

    explicit operator bool() const noexcept { return ok; }
};

/// Checks the model invariants; reports the first violation found.
inline ValidationReport validate_mdp(const TabularMDP& mdp) {
    auto fail = [](std::string msg, std::optional<std::size_t> s = {},
                   std::optional<std::size_t> a = {}) {
        return ValidationReport{false, std::move(msg), s, a};
    };
    const double gamma = mdp.gamma();
    if (!(gamma > 0.0 && gamma < 1.0)) return fail("gamma out of range");

    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            double sum = 0.0;
            for (double p : mdp.kernel_row(s, a)) {
                if (!(p >= 0.0) || !std::isfinite(p))
                    return fail("kernel entry negative or not finite", s, a);
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTol)
                return fail("kernel row does not sum to 1 (sum = " + std::to_string(sum) + ")", s, a);
            for (double r : mdp.reward_row(s, a)) {
                if (!std::isfinite(r)) return fail("reward entry not finite", s, a);
                if (r < mdp.r_min() || r > mdp.r_max())
                    return fail("reward entry outside declared bounds", s, a);
            }
        }
    }
    return {};
}

/// Divides each row by its sum; used by builders to absorb floating point drift.
inline void renormalize_rows(std::vector<double>& kernel, std::size_t row_length) {
    for (std::size_t off = 0; off + row_length <= kernel.size(); off += row_length) {
        double sum = 0.0;
        for (std::size_t j = 0; j < row_length; ++j) sum += kernel[off + j];
        if (sum > 0.0)
            for (std::size_t j = 0; j < row_length; ++j) kernel[off + j] /= sum;
    }
}

/// Expected one-step return sum_{s'} P(s'|s,a) (R(s,a,s') + gamma v(s')).
inline double q_value(const TabularMDP& mdp, std::span<const double> v, std::size_t s, std::size_t a) {
    const auto p = mdp.kernel_row(s, a);
    const auto r = mdp.reward_row(s, a);
    double q = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j)
        if (p[j] > 0.0) q += p[j] * (r[j] + mdp.gamma() * v[j]);
    return q;
}

struct ClassicalBellmanResult {
    ValueFunction values;
    std::vector<std::size_t> greedy_actions;
};

/// Non-robust optimal Bellman operator with greedy actions.
/// Ties between actions go to the lowest index.
inline ClassicalBellmanResult classical_bellman(const TabularMDP& mdp, std::span<const double> v) {
    if (v.size() != mdp.n_states()) throw DimensionError("classical_bellman_apply: |v| != |S|");
    ClassicalBellmanResult out{ValueFunction(mdp.n_states()), std::vector<std::size_t>(mdp.n_states())};
    for (std::size_t s = 0; s < mdp.n_states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
            const double q = q_value(mdp, v, s, a);
            if (q > best) {
                best = q;
                arg = a;
            }
        }
        out.values[s] = best;
        out.greedy_actions[s] = arg;
    }
    return out;
}

inline ValueFunction classical_bellman_apply(const TabularMDP& mdp, std::span<const double> v) {
    return classical_bellman(mdp, v).values;
}

/// Non-robust policy evaluation operator T^pi(v).
inline ValueFunction classical_policy_apply(const TabularMDP& mdp, const RandomizedPolicy& pi,
                                            std::span<const double> v) {
    if (v.size() != mdp.n_states()) throw DimensionError("classical_policy_apply: |v| != |S|");
    if (pi.n_states() != mdp.n_states() || pi.n_actions() != mdp.n_actions())
        throw DimensionError("classical_policy_apply: policy shape mismatch");
    ValueFunction out(mdp.n_states(), 0.0);
    for (std::size_t s = 0; s < mdp.n_states(); ++s)
        for (std::size_t a = 0; a < mdp.n_actions(); ++a)
            if (pi(s, a) > 0.0) out[s] += pi(s, a) * q_value(mdp, v, s, a);
    return out;
}

/// Plain value iteration on the nominal model, stopping once the iterate is within tol of v*.
inline ValueFunction classical_value_iteration(const TabularMDP& mdp, double tol = 1e-10,
                                               std::size_t max_sweeps = 100000) {
    ValueFunction v(mdp.n_states(), 0.0);
    const double gamma = mdp.gamma();
    const double stop = tol * (1.0 - gamma) / (2.0 * gamma);
    for (std::size_t k = 0; k < max_sweeps; ++k) {
        ValueFunction next = classical_bellman_apply(mdp, v);
        double res = 0.0;
        for (std::size_t s = 0; s < v.size(); ++s) res = std::max(res, std::abs(next[s] - v[s]));
        v = std::move(next);
        if (res <= stop) return v;
    }
    throw SweepLimitError("classical_value_iteration: max_sweeps exceeded", v, 0.0);
}

/// Smallest strictly positive entry of a kernel (zeros excluded).
inline double min_support_probability(std::span<const double> kernel) {
    double m = std::numeric_limits<double>::infinity();
    for (double p : kernel)
        if (p > 0.0) m = std::min(m, p);
    return m;
}

inline double min_support_probability(const TabularMDP& mdp) {
    return min_support_probability(mdp.kernel());
}

inline double sup_norm_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("sup_norm_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return d;
}

} // namespace drmdp
