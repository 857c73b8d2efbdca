#pragma once

#include "drmdp/errors.hpp"
#include "drmdp/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace drmdp {

enum class DivergenceKind { KL, Fk };

/**
 * S-rectangular divergence ball: for every state, the per-action kernels may
 * move away from the nominal ones as long as the summed divergence over all
 * actions stays below |A| * rho.
 */
class UncertaintyModel {
public:
    static UncertaintyModel kl(double rho) { return UncertaintyModel(DivergenceKind::KL, 0.0, rho); }
    static UncertaintyModel fk(double k, double rho) { return UncertaintyModel(DivergenceKind::Fk, k, rho); }

    DivergenceKind kind() const noexcept { return kind_; }
    double rho() const noexcept { return rho_; }
    /// Cressie-Read exponent; only meaningful for Fk.
    double k() const noexcept { return k_; }
    /// Holder conjugate k/(k-1).
    double k_star() const noexcept { return k_ / (k_ - 1.0); }

    UncertaintyModel with_rho(double rho) const { return UncertaintyModel(kind_, k_, rho); }

    std::string name() const { return kind_ == DivergenceKind::KL ? "kl" : "fk"; }

    /// Divergence generator f(t), with f(1) = 0.
    double f(double t) const {
        if (kind_ == DivergenceKind::KL) return t > 0.0 ? t * std::log(t) : 0.0;
        return (std::pow(t, k_) - k_ * t + k_ - 1.0) / (k_ * (k_ - 1.0));
    }

private:
    UncertaintyModel(DivergenceKind kind, double k, double rho) : kind_(kind), k_(k), rho_(rho) {
        if (!(rho > 0.0) || !std::isfinite(rho))
            throw std::invalid_argument("UncertaintyModel: rho must be positive and finite");
        if (kind == DivergenceKind::Fk && (!(k > 1.0) || !std::isfinite(k / (k - 1.0))))
            throw std::invalid_argument("UncertaintyModel: f_k requires finite k > 1");
    }

    DivergenceKind kind_;
    double k_;
    double rho_;
};

/// Nominal next-state distribution of one action restricted to its support,
/// with the payoff z(s') = R(s,a,s') + gamma v(s') at each support point.
struct ActionBranch {
    std::vector<double> values;
    std::vector<double> probs;

    double min_value() const { return *std::min_element(values.begin(), values.end()); }
    double max_value() const { return *std::max_element(values.begin(), values.end()); }
    double mean() const {
        double m = 0.0;
        for (std::size_t j = 0; j < values.size(); ++j) m += probs[j] * values[j];
        return m;
    }
    double span() const { return max_value() - min_value(); }

    bool operator==(const ActionBranch&) const = default;
};

/// Inner adversarial problem at one state for a fixed action distribution.
struct StateProblem {
    std::vector<ActionBranch> branches;
    std::vector<double> weights; // d = pi(.|s)

    std::size_t n_actions() const noexcept { return branches.size(); }

    /// Sum_a d_a E_mu_a[z_a]: the value with no adversary.
    double nominal_value() const {
        double v = 0.0;
        for (std::size_t a = 0; a < branches.size(); ++a)
            if (weights[a] > 0.0) v += weights[a] * branches[a].mean();
        return v;
    }

    /// Sum_a d_a min z_a: what an unconstrained adversary would achieve.
    double worst_support_value() const {
        double v = 0.0;
        for (std::size_t a = 0; a < branches.size(); ++a)
            if (weights[a] > 0.0) v += weights[a] * branches[a].min_value();
        return v;
    }

    /// max_a d_a (max z_a - min z_a).
    double weighted_span() const {
        double s = 0.0;
        for (std::size_t a = 0; a < branches.size(); ++a) s = std::max(s, weights[a] * branches[a].span());
        return s;
    }
};

/// Checks the StateProblem invariants; throws std::invalid_argument on violation.
inline void check_state_problem(const StateProblem& sp) {
    if (sp.branches.empty()) throw std::invalid_argument("StateProblem: no actions");
    if (sp.weights.size() != sp.branches.size()) throw DimensionError("StateProblem: |d| != |A|");
    double wsum = 0.0;
    for (double w : sp.weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("StateProblem: negative action weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("StateProblem: weights not in simplex");
    for (const auto& b : sp.branches) {
        if (b.values.empty() || b.values.size() != b.probs.size())
            throw DimensionError("StateProblem: malformed branch");
        double psum = 0.0;
        for (std::size_t j = 0; j < b.probs.size(); ++j) {
            if (!(b.probs[j] > 0.0)) throw std::invalid_argument("StateProblem: support prob not positive");
            if (!std::isfinite(b.values[j])) throw std::invalid_argument("StateProblem: payoff not finite");
            psum += b.probs[j];
        }
        if (std::abs(psum - 1.0) > kRowSumTol * 10) // rows are renormalized upstream
            throw std::invalid_argument("StateProblem: support probs do not sum to 1");
    }
}

struct DualSolverConfig {
    double objective_tol = 1e-9;
    std::size_t max_iters = 10000;
    double lambda_floor = 1e-12;
    double step_shrink = 0.5;
};

/// Per-action branches of state s under value function v (support of the nominal rows only).
inline std::vector<ActionBranch> build_branches(const TabularMDP& mdp, std::span<const double> v, std::size_t s) {
    std::vector<ActionBranch> out(mdp.n_actions());
    for (std::size_t a = 0; a < mdp.n_actions(); ++a) {
        const auto p = mdp.kernel_row(s, a);
        const auto r = mdp.reward_row(s, a);
        for (std::size_t j = 0; j < p.size(); ++j) {
            if (p[j] > 0.0) {
                out[a].values.push_back(r[j] + mdp.gamma() * v[j]);
                out[a].probs.push_back(p[j]);
            }
        }
    }
    return out;
}

} // namespace drmdp
