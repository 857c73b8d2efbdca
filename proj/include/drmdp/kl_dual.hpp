#pragma once

// Dual of the inner adversarial problem under a KL ball:
//
//   inf_P sum_a d_a E_{P_a}[z_a]   s.t.  sum_a KL(P_a || mu_a) <= |A| rho
//     = sup_{lambda >= 0}  -lambda |A| rho - sum_a lambda log E_{mu_a}[exp(-d_a z_a / lambda)]

#include "drmdp/numeric.hpp"
#include "drmdp/uncertainty.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace drmdp {

namespace detail {

/// Shifted payoffs z - min z per action; the shift makes every exponent nonpositive.
struct KlPrepared {
    const StateProblem* sp;
    std::vector<double> minima;

    explicit KlPrepared(const StateProblem& problem) : sp(&problem), minima(problem.n_actions()) {
        for (std::size_t a = 0; a < problem.n_actions(); ++a) minima[a] = problem.branches[a].min_value();
    }

    /// -lambda log E[exp(-d z / lambda)] for one action, lambda > 0.
    double branch_term(std::size_t a, double lambda) const {
        const double d = sp->weights[a];
        if (d == 0.0) return 0.0;
        const auto& b = sp->branches[a];
        const double m = minima[a];
        double acc = 0.0; // E[exp(-x/lambda)] - 1 accumulated through expm1
        for (std::size_t j = 0; j < b.values.size(); ++j)
            acc += b.probs[j] * std::expm1(-d * (b.values[j] - m) / lambda);
        return d * m - lambda * std::log1p(acc);
    }

    double objective(double lambda, double rho) const {
        double total = -lambda * static_cast<double>(sp->n_actions()) * rho;
        for (std::size_t a = 0; a < sp->n_actions(); ++a) total += branch_term(a, lambda);
        return total;
    }
};

} // namespace detail

/// Dual objective for a given lambda > 0, evaluated with a min-shift so nothing overflows.
inline double kl_dual_objective(const StateProblem& sp, double rho, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("kl_dual_objective: lambda must be positive");
    check_state_problem(sp);
    return detail::KlPrepared(sp).objective(lambda, rho);
}

struct KlInnerSolution {
    double value = 0.0;
    double lambda_star = 0.0; ///< 0 when the lambda -> 0 boundary is optimal
};

namespace detail {

inline KlInnerSolution kl_inner_value_prepared(const KlPrepared& prep, double rho, const DualSolverConfig& cfg) {
    const StateProblem& sp = *prep.sp;
    const double boundary = sp.worst_support_value();
    const double span = sp.weighted_span();
    if (span == 0.0) return {boundary, 0.0};

    const double hi = span / rho + 1.0;
    const auto best = numeric::golden_section_max([&](double lam) { return prep.objective(lam, rho); },
                                                  cfg.lambda_floor, hi, cfg.objective_tol, cfg.max_iters);
    if (best.fx > boundary) return {best.fx, best.x};
    return {boundary, 0.0};
}

} // namespace detail

/**
 * sup over lambda >= 0 of the KL dual objective.
 *
 * The lambda -> 0 limit (sum_a d_a min z_a) is evaluated in closed form; the
 * interior is searched by golden section on [lambda_floor, span/rho + 1],
 * which contains the maximizer because the objective is concave in lambda
 * and already below the boundary value past span/rho.
 */
inline KlInnerSolution kl_inner_value(const StateProblem& sp, double rho, const DualSolverConfig& cfg = {}) {
    if (!(rho > 0.0)) throw std::invalid_argument("kl_inner_value: rho must be positive");
    check_state_problem(sp);
    return detail::kl_inner_value_prepared(detail::KlPrepared(sp), rho, cfg);
}

} // namespace drmdp
