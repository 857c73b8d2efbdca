#pragma once

// Dual of the inner adversarial problem under a Cressie-Read f_k ball,
// f_k(t) = (t^k - k t + k - 1) / (k (k - 1)):
//
//   inf_P sum_a d_a E_{P_a}[z_a]   s.t.  sum_a D_{f_k}(P_a || mu_a) <= |A| rho
//     = sup_eta  -c (sum_a E_{mu_a}[(eta_a - d_a z_a)_+^{k*}])^{1/k*} + sum_a eta_a
//
// with c = |A|^{1/k} (k (k-1) rho + 1)^{1/k} and k* = k / (k - 1).

#include "drmdp/divergence_cost.hpp"
#include "drmdp/errors.hpp"
#include "drmdp/numeric.hpp"
#include "drmdp/uncertainty.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace drmdp {

inline double fk_constant_c(double k, double rho, std::size_t n_actions) {
    return std::pow(static_cast<double>(n_actions), 1.0 / k) * std::pow(k * (k - 1.0) * rho + 1.0, 1.0 / k);
}

/// G(eta) for the given StateProblem; the positive part is taken exactly.
inline double fk_dual_objective(const StateProblem& sp, double k, double rho, std::span<const double> eta) {
    check_state_problem(sp);
    if (eta.size() != sp.n_actions()) throw DimensionError("fk_dual_objective: |eta| != |A|");
    if (!(k > 1.0)) throw std::invalid_argument("fk_dual_objective: k must exceed 1");
    const double kstar = k / (k - 1.0);
    double sum = 0.0;
    double eta_sum = 0.0;
    for (std::size_t a = 0; a < sp.n_actions(); ++a) {
        const auto& b = sp.branches[a];
        eta_sum += eta[a];
        for (std::size_t j = 0; j < b.values.size(); ++j) {
            const double gap = eta[a] - sp.weights[a] * b.values[j];
            if (gap > 0.0) sum += b.probs[j] * std::pow(gap, kstar);
        }
    }
    return -fk_constant_c(k, rho, sp.n_actions()) * std::pow(sum, 1.0 / kstar) + eta_sum;
}

struct FkInnerSolution {
    double value = 0.0;
    std::vector<double> eta_star;
    bool boundary = false; ///< true when the eta_a = d_a min z_a corner is optimal
};

namespace detail {

/// Branches prepared once for repeated evaluation of the one-multiplier form
///   sup_{nu >= 0} sum_a d_a min z_a - nu |A| rho + sum_a nu Omega_a(d_a / nu),
/// Omega_a(beta) = min_P beta E_P[z_a - min z_a] + D(P || mu_a).
struct FkPrepared {
    const StateProblem* sp;
    FkCostModel model;
    std::vector<ShiftedBranch> shifted;
    double budget;

    FkPrepared(const StateProblem& problem, double k, double rho)
        : sp(&problem), model(k), budget(static_cast<double>(problem.n_actions()) * rho) {
        shifted.reserve(problem.n_actions());
        for (const auto& b : problem.branches) shifted.emplace_back(b);
    }

    double corner() const {
        double v = 0.0;
        for (std::size_t a = 0; a < sp->n_actions(); ++a) v += sp->weights[a] * shifted[a].min_value;
        return v;
    }

    /// Gain over the corner at multiplier nu > 0.
    double gain(double nu) const {
        double g = -nu * budget;
        for (std::size_t a = 0; a < sp->n_actions(); ++a) {
            const double d = sp->weights[a];
            if (d > 0.0 && shifted[a].span > 0.0) g += nu * model.penalized_min(shifted[a], d / nu);
        }
        return g;
    }

    /// eta_a = nu tau_a / (k-1) + d_a min z_a, the maximizer of G matching multiplier nu.
    std::vector<double> eta_from_nu(double nu) const {
        std::vector<double> eta(sp->n_actions());
        for (std::size_t a = 0; a < sp->n_actions(); ++a) {
            const double d = sp->weights[a];
            const double tau = shifted[a].span > 0.0 ? model.solve_tau(shifted[a], d / nu) : 1.0;
            eta[a] = nu * tau / model.kp + d * shifted[a].min_value;
        }
        return eta;
    }
};

inline FkInnerSolution fk_inner_value_prepared(const FkPrepared& prep, const DualSolverConfig& cfg) {
    const StateProblem& sp = *prep.sp;
    const double corner = prep.corner();
    std::vector<double> corner_eta(sp.n_actions());
    for (std::size_t a = 0; a < sp.n_actions(); ++a) corner_eta[a] = sp.weights[a] * prep.shifted[a].min_value;

    // nu Omega_a(d_a/nu) <= d_a (E z_a - min z_a), so past (nominal - corner)/budget
    // the gain is negative and the maximizer lies below that.
    const double reach = (sp.nominal_value() - corner) / prep.budget;
    if (!(reach > 0.0)) return {corner, corner_eta, true};
    const auto best = numeric::golden_section_max([&](double nu) { return prep.gain(nu); }, cfg.lambda_floor,
                                                  reach * (1.0 + 1e-9), cfg.objective_tol, cfg.max_iters);
    if (best.fx > 0.0) return {corner + best.fx, prep.eta_from_nu(best.x), false};
    return {corner, corner_eta, true};
}

} // namespace detail

/**
 * Maximum of G over eta.
 *
 * Solved through the equivalent one-multiplier form: for each nu the per-action
 * minimizations have a closed-form threshold (k = 2) or a bracketed 1-D root,
 * and nu is found by golden section on [lambda_floor, (nominal - corner)/(|A| rho)].
 * The corner eta_a = d_a min z_a is evaluated exactly and returned when no
 * interior nu beats it. eta_star is recovered from the optimal nu.
 */
inline FkInnerSolution fk_inner_value(const StateProblem& sp, double k, double rho, const DualSolverConfig& cfg = {}) {
    if (!(k > 1.0)) throw std::invalid_argument("fk_inner_value: k must exceed 1");
    if (!(rho > 0.0)) throw std::invalid_argument("fk_inner_value: rho must be positive");
    check_state_problem(sp);
    return detail::fk_inner_value_prepared(detail::FkPrepared(sp, k, rho), cfg);
}

} // namespace drmdp
