#pragma once

// Value iteration for the robust Bellman equation T*(v) = v, on either the
// nominal or an empirical kernel.

#include "drmdp/errors.hpp"
#include "drmdp/mdp.hpp"
#include "drmdp/robust_bellman.hpp"
#include "drmdp/sampling.hpp"
#include "drmdp/uncertainty.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace drmdp {

struct FixedPointResult : BellmanResult {
    std::size_t sweeps = 0;
    std::vector<double> residuals; ///< ||v_{k+1} - v_k|| per sweep
};

/**
 * Jacobi sweeps v <- T*(v) from v = 0 until ||v_{k+1} - v_k|| <= vi_tol (1 - gamma) / (2 gamma),
 * which puts the returned iterate within vi_tol of the fixed point.
 */
inline FixedPointResult solve_fixed_point(const SupportModel& model, const UncertaintyModel& u,
                                          const DualSolverConfig& cfg = {}, double vi_tol = 1e-6,
                                          std::size_t max_sweeps = 10000) {
    if (!(vi_tol > 0.0)) throw std::invalid_argument("solve_fixed_point: vi_tol must be positive");
    const double gamma = model.gamma();
    const double stop = gamma > 0.0 ? vi_tol * (1.0 - gamma) / (2.0 * gamma) : std::numeric_limits<double>::infinity();

    FixedPointResult out;
    out.values.assign(model.n_states(), 0.0);
    for (std::size_t k = 0; k < max_sweeps; ++k) {
        BellmanResult next = robust_bellman_optimal(model, u, out.values, cfg);
        const double res = sup_norm_distance(next.values, out.values);
        static_cast<BellmanResult&>(out) = std::move(next);
        out.residuals.push_back(res);
        out.sweeps = k + 1;
        if (res <= stop) return out;
    }
    throw SweepLimitError("solve_fixed_point: max_sweeps exceeded", out.values, out.residuals.back());
}

inline FixedPointResult solve_fixed_point(const TabularMDP& mdp, const UncertaintyModel& u,
                                          const DualSolverConfig& cfg = {}, double vi_tol = 1e-6,
                                          std::size_t max_sweeps = 10000) {
    return solve_fixed_point(SupportModel(mdp), u, cfg, vi_tol, max_sweeps);
}

struct Proposition1Report {
    double lhs = 0.0; ///< ||v_hat - v_star||
    double rhs = 0.0; ///< ||T_hat*(v_star) - T*(v_star)|| / (1 - gamma)
    double slack = 0.0;
    bool holds = false;
    ValueFunction v_star;
    ValueFunction v_hat;
};

/// Same check with the population fixed point supplied by the caller.
inline Proposition1Report proposition1_check(const TabularMDP& mdp, const UncertaintyModel& u,
                                             const SampleBatch& batch, const ValueFunction& v_star,
                                             const DualSolverConfig& cfg, double vi_tol) {
    if (v_star.size() != mdp.n_states()) throw DimensionError("proposition1_check: |v_star| != |S|");
    const SupportModel population(mdp);
    const SupportModel empirical(empirical_mdp(mdp, batch));
    const double gamma = mdp.gamma();

    Proposition1Report rep;
    rep.v_star = v_star;
    rep.v_hat = solve_fixed_point(empirical, u, cfg, vi_tol).values;
    rep.lhs = sup_norm_distance(rep.v_hat, rep.v_star);
    const auto t_pop = robust_bellman_optimal(population, u, v_star, cfg).values;
    const auto t_emp = robust_bellman_optimal(empirical, u, v_star, cfg).values;
    rep.rhs = sup_norm_distance(t_emp, t_pop) / (1.0 - gamma);
    rep.slack = 2.0 * vi_tol / (1.0 - gamma);
    rep.holds = rep.lhs <= rep.rhs + rep.slack;
    return rep;
}

/**
 * Both sides of ||v_hat - v*|| <= ||T_hat*(v*) - T*(v*)|| / (1 - gamma) for one sample batch.
 * holds allows 2 vi_tol / (1 - gamma) for the inexact fixed points.
 */
inline Proposition1Report proposition1_check(const TabularMDP& mdp, const UncertaintyModel& u,
                                             const SampleBatch& batch, const DualSolverConfig& cfg = {},
                                             double vi_tol = 1e-6) {
    const auto v_star = solve_fixed_point(mdp, u, cfg, vi_tol).values;
    return proposition1_check(mdp, u, batch, v_star, cfg, vi_tol);
}

} // namespace drmdp
