#pragma once

// S-rectangular distributionally robust Bellman operators T^pi and T*.

#include "drmdp/divergence_cost.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/fk_dual.hpp"
#include "drmdp/kl_dual.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/numeric.hpp"
#include "drmdp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace drmdp {

/// Nominal kernel restricted to its support, cached once per model.
class SupportModel {
public:
    struct Entry {
        std::size_t next;
        double prob;
        double reward;
    };

    explicit SupportModel(const TabularMDP& mdp)
        : n_states_(mdp.n_states()), n_actions_(mdp.n_actions()), gamma_(mdp.gamma()),
          offsets_(mdp.n_states() * mdp.n_actions() + 1, 0) {
        for (std::size_t s = 0; s < n_states_; ++s) {
            for (std::size_t a = 0; a < n_actions_; ++a) {
                const auto p = mdp.kernel_row(s, a);
                const auto r = mdp.reward_row(s, a);
                for (std::size_t j = 0; j < n_states_; ++j)
                    if (p[j] > 0.0) entries_.push_back({j, p[j], r[j]});
                offsets_[s * n_actions_ + a + 1] = entries_.size();
            }
        }
    }

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    double gamma() const noexcept { return gamma_; }

    std::span<const Entry> row(std::size_t s, std::size_t a) const noexcept {
        const std::size_t i = s * n_actions_ + a;
        return {entries_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }

    std::vector<ActionBranch> branches(std::size_t s, std::span<const double> v) const {
        std::vector<ActionBranch> out(n_actions_);
        for (std::size_t a = 0; a < n_actions_; ++a) {
            const auto entries = row(s, a);
            out[a].values.reserve(entries.size());
            out[a].probs.reserve(entries.size());
            for (const Entry& e : entries) {
                out[a].values.push_back(e.reward + gamma_ * v[e.next]);
                out[a].probs.push_back(e.prob);
            }
        }
        return out;
    }

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    double gamma_;
    std::vector<Entry> entries_;
    std::vector<std::size_t> offsets_;
};

/// Optimal dual variables of one state's inner problem.
struct InnerDual {
    double lambda = 0.0;     ///< KL multiplier (0 when the essential-infimum corner is optimal)
    std::vector<double> eta; ///< f_k multipliers
};

struct BellmanResult {
    ValueFunction values;
    RandomizedPolicy policy;
    std::vector<InnerDual> inner_duals;
};

struct StateSolution {
    double value = 0.0;
    std::vector<double> weights;
    InnerDual dual;
    std::size_t iterations = 0;
};

namespace detail {

struct InnerEval {
    double value;
    InnerDual dual;
};

inline InnerEval evaluate_inner(const StateProblem& sp, const UncertaintyModel& u, const DualSolverConfig& cfg) {
    InnerEval out{};
    if (u.kind() == DivergenceKind::KL) {
        const auto sol = kl_inner_value_prepared(KlPrepared(sp), u.rho(), cfg);
        out.value = sol.value;
        out.dual.lambda = sol.lambda_star;
        return out;
    }
    auto sol = fk_inner_value_prepared(FkPrepared(sp, u.k(), u.rho()), cfg);
    out.value = sol.value;
    out.dual.eta = std::move(sol.eta_star);
    return out;
}

} // namespace detail

/// T^pi at one state: the inner dual value for the fixed action distribution d.
inline StateSolution solve_state_policy(std::vector<ActionBranch> branches, std::span<const double> d,
                                        const UncertaintyModel& u, const DualSolverConfig& cfg = {}) {
    StateProblem sp{std::move(branches), std::vector<double>(d.begin(), d.end())};
    check_state_problem(sp);
    auto ev = detail::evaluate_inner(sp, u, cfg);
    return {ev.value, sp.weights, std::move(ev.dual), 1};
}

/**
 * sup over d in the simplex of the inner dual value at one state.
 *
 * By the minimax theorem the sup over d of the worst case equals
 *   min { t : sum_a c_a(t) <= |A| rho },
 * where c_a(t) is the least divergence that brings E[z_a] down to t
 * (divergence_cost.hpp). The left side is convex and decreasing in t, so t is
 * a bracketed root on [max_a min z_a, max_a E z_a]. The maximizing weights are
 * d_a = beta_a / sum_b beta_b with beta_a = -c_a'(t). When the budget already
 * covers t = max_a min z_a, the lowest-index action attaining it is played
 * deterministically.
 */
inline StateSolution solve_state_optimal(std::vector<ActionBranch> branches, const UncertaintyModel& u,
                                         const DualSolverConfig& cfg = {}) {
    const std::size_t na = branches.size();
    StateProblem sp{std::move(branches), std::vector<double>(na, na == 0 ? 0.0 : 1.0 / static_cast<double>(na))};
    check_state_problem(sp);

    const bool kl = u.kind() == DivergenceKind::KL;
    const detail::FkCostModel fk_model(kl ? 2.0 : u.k());
    std::vector<detail::ShiftedBranch> shifted;
    shifted.reserve(na);
    for (const auto& b : sp.branches) shifted.emplace_back(b);
    auto cost = [&](std::size_t a, double t) {
        return kl ? detail::kl_cost(shifted[a], t) : detail::fk_cost(fk_model, shifted[a], t);
    };
    // Actions with identical branches share one cost curve.
    std::vector<std::size_t> rep(na);
    std::vector<std::size_t> multiplicity(na, 0);
    for (std::size_t a = 0; a < na; ++a) {
        rep[a] = a;
        for (std::size_t b = 0; b < a; ++b) {
            if (rep[b] == b && sp.branches[b].values == sp.branches[a].values &&
                sp.branches[b].probs == sp.branches[a].probs) {
                rep[a] = b;
                break;
            }
        }
        ++multiplicity[rep[a]];
    }

    double floor = -std::numeric_limits<double>::infinity();
    double top = -std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (const auto& br : shifted) {
        floor = std::max(floor, br.min_value);
        top = std::max(top, br.mean);
        scale = std::max(scale, std::abs(br.min_value) + br.span);
    }
    const double budget = static_cast<double>(na) * u.rho();
    std::size_t evaluations = 0;
    auto excess = [&](double t) {
        ++evaluations;
        double total = -budget;
        for (std::size_t a = 0; a < na; ++a)
            if (multiplicity[a] > 0) total += static_cast<double>(multiplicity[a]) * cost(a, t).cost;
        return total;
    };

    StateSolution out;
    const double excess_floor = excess(floor);
    if (excess_floor <= 0.0) {
        std::size_t best = 0;
        while (shifted[best].min_value != floor) ++best;
        out.value = floor;
        out.weights.assign(na, 0.0);
        out.weights[best] = 1.0;
        if (!kl)
            for (std::size_t a = 0; a < na; ++a) out.dual.eta.push_back(out.weights[a] * shifted[a].min_value);
        out.iterations = evaluations;
        return out;
    }

    const double abs_tol = std::min(cfg.objective_tol, 1e-3) * 1e-6 * scale;
    const double t = detail::bracketed_root(excess, floor, top, excess_floor, excess(top), abs_tol);

    std::vector<CostPoint> points(na);
    double beta_sum = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
        points[a] = rep[a] == a ? cost(a, t) : points[rep[a]];
        beta_sum += points[a].beta;
    }
    if (!(beta_sum > 0.0) || !std::isfinite(beta_sum))
        throw NonConvergenceError("robust_bellman_optimal: degenerate multipliers at the optimal level", t,
                                  beta_sum);

    out.value = t;
    out.weights.resize(na);
    for (std::size_t a = 0; a < na; ++a) out.weights[a] = points[a].beta / beta_sum;
    const double nu = 1.0 / beta_sum;
    if (kl) {
        out.dual.lambda = nu;
    } else {
        for (std::size_t a = 0; a < na; ++a)
            out.dual.eta.push_back(nu * points[a].tau / fk_model.kp + out.weights[a] * shifted[a].min_value);
    }
    out.iterations = evaluations;
    return out;
}

/// Robust policy evaluation operator T^pi(v).
inline ValueFunction robust_bellman_policy(const SupportModel& model, const UncertaintyModel& u,
                                           const RandomizedPolicy& pi, std::span<const double> v,
                                           const DualSolverConfig& cfg = {}) {
    if (v.size() != model.n_states()) throw DimensionError("robust_bellman_policy: |v| != |S|");
    if (pi.n_states() != model.n_states() || pi.n_actions() != model.n_actions())
        throw DimensionError("robust_bellman_policy: policy shape mismatch");
    ValueFunction out(model.n_states());
    for (std::size_t s = 0; s < model.n_states(); ++s) {
        try {
            out[s] = solve_state_policy(model.branches(s, v), pi.row(s), u, cfg).value;
        } catch (const NonConvergenceError& e) {
            throw StateSolveError(s, e);
        }
    }
    return out;
}

inline ValueFunction robust_bellman_policy(const TabularMDP& mdp, const UncertaintyModel& u,
                                           const RandomizedPolicy& pi, std::span<const double> v,
                                           const DualSolverConfig& cfg = {}) {
    return robust_bellman_policy(SupportModel(mdp), u, pi, v, cfg);
}

/**
 * Optimal robust operator T*(v) with the maximizing action distribution per state.
 */
inline BellmanResult robust_bellman_optimal(const SupportModel& model, const UncertaintyModel& u,
                                            std::span<const double> v, const DualSolverConfig& cfg = {}) {
    if (v.size() != model.n_states()) throw DimensionError("robust_bellman_optimal: |v| != |S|");
    const std::size_t ns = model.n_states();
    const std::size_t na = model.n_actions();
    BellmanResult out{ValueFunction(ns), RandomizedPolicy(ns, na, std::vector<double>(ns * na)),
                      std::vector<InnerDual>(ns)};
    for (std::size_t s = 0; s < ns; ++s) {
        try {
            auto sol = solve_state_optimal(model.branches(s, v), u, cfg);
            out.values[s] = sol.value;
            std::copy(sol.weights.begin(), sol.weights.end(), out.policy.row(s).begin());
            out.inner_duals[s] = std::move(sol.dual);
        } catch (const NonConvergenceError& e) {
            throw StateSolveError(s, e);
        }
    }
    return out;
}

inline BellmanResult robust_bellman_optimal(const TabularMDP& mdp, const UncertaintyModel& u,
                                            std::span<const double> v, const DualSolverConfig& cfg = {}) {
    return robust_bellman_optimal(SupportModel(mdp), u, v, cfg);
}

/// Per-state maximizing distributions, rows renormalized.
inline RandomizedPolicy greedy_policy_extract(const BellmanResult& result) {
    RandomizedPolicy pi = result.policy;
    for (std::size_t s = 0; s < pi.n_states(); ++s) {
        auto row = pi.row(s);
        for (double& x : row) x = std::max(x, 0.0);
        numeric::normalize(row);
    }
    return pi;
}

} // namespace drmdp
