#pragma once

// The two experiment MDPs: inventory control with backlog, and the
// x -> y1 -> y2 lower-bound chain.

#include "drmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace drmdp {

enum class InventoryRewardMode {
    RepresentativeDemand,   ///< boundary s' = -B uses the smallest demand reaching it
    ExpectedGivenTransition ///< average reward over the demands producing (s, a, s')
};

struct InventoryParams {
    int max_inventory = 10; // I
    int max_backlog = 5;    // B
    int max_order = 5;      // O
    double price = 3.0;
    double cost = 2.0;
    double holding = 0.2;
    double backlog_penalty = 3.0;
    double gamma = 0.9;
    std::vector<double> demand_pmf{0.1, 0.2, 0.3, 0.3, 0.1}; // over {0, 1, ...}
    InventoryRewardMode reward_mode = InventoryRewardMode::RepresentativeDemand;
};

/// State index of inventory level s in {-B, ..., I}.
inline std::size_t inventory_state(const InventoryParams& prm, int level) {
    return static_cast<std::size_t>(level + prm.max_backlog);
}

/**
 * Inventory control. Order a is capped at a~ = min(a, I - s); the next level is
 * max(s + a~ - D, -B), sales are s - s' + a~ and the reward is
 * p X + b min(s', 0) - h max(s', 0) - c a~.
 */
inline TabularMDP build_inventory(const InventoryParams& prm) {
    if (prm.max_inventory < 1 || prm.max_backlog < 1 || prm.max_order < 1)
        throw std::invalid_argument("build_inventory: I, B, O must be at least 1");
    if (prm.demand_pmf.empty()) throw std::invalid_argument("build_inventory: empty demand pmf");
    double total = 0.0;
    for (double q : prm.demand_pmf) {
        if (!(q >= 0.0)) throw std::invalid_argument("build_inventory: negative demand probability");
        total += q;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("build_inventory: demand pmf must sum to 1");

    const int lo = -prm.max_backlog;
    const int hi = prm.max_inventory;
    const auto ns = static_cast<std::size_t>(hi - lo + 1);
    const auto na = static_cast<std::size_t>(prm.max_order + 1);
    std::vector<double> kernel(ns * na * ns, 0.0);
    std::vector<double> reward(ns * na * ns, 0.0);
    auto at = [&](std::size_t s, std::size_t a, std::size_t next) { return (s * na + a) * ns + next; };

    auto transition_reward = [&](int s, int ordered, int next) {
        const double sales = s - next + ordered;
        return prm.price * sales + prm.backlog_penalty * std::min(next, 0) - prm.holding * std::max(next, 0) -
               prm.cost * ordered;
    };

    std::vector<double> weighted(ns);
    for (int s = lo; s <= hi; ++s) {
        const std::size_t si = inventory_state(prm, s);
        for (int a = 0; a <= prm.max_order; ++a) {
            const int ordered = std::min(a, hi - s);
            std::fill(weighted.begin(), weighted.end(), 0.0);
            for (std::size_t d = 0; d < prm.demand_pmf.size(); ++d) {
                const double q = prm.demand_pmf[d];
                if (q == 0.0) continue;
                const int next = std::max(s + ordered - static_cast<int>(d), lo);
                const std::size_t ni = inventory_state(prm, next);
                kernel[at(si, a, ni)] += q;
                weighted[ni] += q * transition_reward(s, ordered, next);
            }
            for (int next = lo; next <= hi; ++next) {
                const std::size_t ni = inventory_state(prm, next);
                const double mass = kernel[at(si, a, ni)];
                if (prm.reward_mode == InventoryRewardMode::ExpectedGivenTransition && mass > 0.0)
                    reward[at(si, a, ni)] = weighted[ni] / mass;
                else
                    reward[at(si, a, ni)] = transition_reward(s, ordered, next);
            }
        }
    }
    renormalize_rows(kernel, ns);
    return {ns, na, std::move(kernel), std::move(reward), prm.gamma};
}

struct LowerBoundParams {
    std::size_t n_initial_states = 10;
    std::size_t n_actions = 5;
    double stay_prob = 0.9;
    double gamma = 0.9;
};

/// Index layout: x_s first, then y1_{s,a}, then y2_{s,a}.
struct LowerBoundLayout {
    std::size_t n_initial;
    std::size_t n_actions;

    std::size_t x(std::size_t s) const noexcept { return s; }
    std::size_t y1(std::size_t s, std::size_t a) const noexcept { return n_initial + s * n_actions + a; }
    std::size_t y2(std::size_t s, std::size_t a) const noexcept {
        return n_initial + n_initial * n_actions + s * n_actions + a;
    }
    std::size_t n_states() const noexcept { return n_initial * (1 + 2 * n_actions); }
};

/**
 * Action a at x_s moves to y1_{s,a}; y1_{s,a} stays with probability p and
 * otherwise falls into the absorbing y2_{s,a}. Reward 1 for every transition
 * out of a y1 state, 0 elsewhere. Actions only matter at the x states.
 */
inline TabularMDP build_lower_bound(const LowerBoundParams& prm) {
    if (prm.n_initial_states == 0 || prm.n_actions == 0)
        throw std::invalid_argument("build_lower_bound: need at least one state and one action");
    if (!(prm.stay_prob > 0.0 && prm.stay_prob < 1.0))
        throw std::invalid_argument("build_lower_bound: stay_prob must lie in (0,1)");

    const LowerBoundLayout L{prm.n_initial_states, prm.n_actions};
    const std::size_t ns = L.n_states();
    const std::size_t na = prm.n_actions;
    std::vector<double> kernel(ns * na * ns, 0.0);
    std::vector<double> reward(ns * na * ns, 0.0);
    auto at = [&](std::size_t s, std::size_t a, std::size_t next) { return (s * na + a) * ns + next; };

    for (std::size_t s = 0; s < L.n_initial; ++s) {
        for (std::size_t a = 0; a < na; ++a) kernel[at(L.x(s), a, L.y1(s, a))] = 1.0;
        for (std::size_t b = 0; b < na; ++b) {
            const std::size_t y1 = L.y1(s, b);
            const std::size_t y2 = L.y2(s, b);
            for (std::size_t a = 0; a < na; ++a) {
                kernel[at(y1, a, y1)] = prm.stay_prob;
                kernel[at(y1, a, y2)] = 1.0 - prm.stay_prob;
                for (std::size_t next = 0; next < ns; ++next) reward[at(y1, a, next)] = 1.0;
                kernel[at(y2, a, y2)] = 1.0;
            }
        }
    }
    return {ns, na, std::move(kernel), std::move(reward), prm.gamma};
}

} // namespace drmdp
