#pragma once

// Brute-force primal adversary. Ground truth for the dual solvers on tiny
// instances: enumerate per-action next-state distributions on a lattice,
// keep combinations within the summed S-rectangular budget, minimize.

#include "drmdp/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace drmdp {

struct OracleConfig {
    double grid_step = 0.01;
    std::size_t refine_rounds = 2;

    static constexpr std::size_t kMaxTotalSupport = 8;
    static constexpr std::size_t kMaxCandidatesPerAction = 4'000'000;
};

struct OracleResult {
    double value = 0.0;
    double epsilon = 0.0;  ///< Lip * final grid step
    double final_step = 0.0;
    std::vector<std::vector<double>> argmin; ///< minimizing distribution per action
};

namespace detail {

struct OracleCandidates {
    std::size_t dim = 0;
    std::vector<double> probs; // flattened, dim per candidate
    std::vector<double> divergence;
    std::vector<double> objective;

    std::size_t size() const noexcept { return divergence.size(); }
};

inline double branch_divergence(const UncertaintyModel& u, const ActionBranch& b, const double* p) {
    double div = 0.0;
    for (std::size_t j = 0; j < b.probs.size(); ++j) div += b.probs[j] * u.f(p[j] / b.probs[j]);
    return div;
}

inline void add_candidate(OracleCandidates& c, const UncertaintyModel& u, const ActionBranch& b, double weight,
                          const std::vector<double>& p) {
    double obj = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) obj += p[j] * b.values[j];
    c.probs.insert(c.probs.end(), p.begin(), p.end());
    c.divergence.push_back(branch_divergence(u, b, p.data()));
    c.objective.push_back(weight * obj);
}

/// All lattice points with spacing 1/units on the simplex, plus the nominal distribution.
inline OracleCandidates simplex_lattice(const UncertaintyModel& u, const ActionBranch& b, double weight,
                                        std::size_t units) {
    OracleCandidates c;
    const std::size_t m = b.probs.size();
    c.dim = m;
    const double h = 1.0 / static_cast<double>(units);
    std::vector<std::size_t> k(m, 0);
    std::vector<double> p(m);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t j, std::size_t left) {
        if (j + 1 == m) {
            k[j] = left;
            for (std::size_t i = 0; i < m; ++i) p[i] = static_cast<double>(k[i]) * h;
            add_candidate(c, u, b, weight, p);
            return;
        }
        for (std::size_t x = 0; x <= left; ++x) {
            k[j] = x;
            rec(j + 1, left - x);
        }
    };
    rec(0, units);
    add_candidate(c, u, b, weight, b.probs);
    return c;
}

/// Lattice offsets of spacing h around `center` in the first m-1 coordinates; the last absorbs the rest.
inline OracleCandidates local_lattice(const UncertaintyModel& u, const ActionBranch& b, double weight,
                                      const std::vector<double>& center, double h, long half_width) {
    OracleCandidates c;
    const std::size_t m = b.probs.size();
    c.dim = m;
    add_candidate(c, u, b, weight, center);
    if (m == 1) return c;
    std::vector<double> p(m);
    std::vector<long> off(m - 1, -half_width);
    while (true) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            p[i] = center[i] + static_cast<double>(off[i]) * h;
            if (p[i] < 0.0) {
                if (p[i] < -1e-14) ok = false;
                p[i] = 0.0;
            }
            sum += p[i];
        }
        p[m - 1] = 1.0 - sum;
        if (p[m - 1] < 0.0) {
            if (p[m - 1] < -1e-14) ok = false;
            p[m - 1] = 0.0;
        }
        if (ok) add_candidate(c, u, b, weight, p);
        std::size_t i = 0;
        while (i + 1 < m && off[i] == half_width) off[i++] = -half_width;
        if (i + 1 == m) break;
        ++off[i];
    }
    return c;
}

/// Minimizes sum_a objective subject to sum_a divergence <= budget over the candidate product.
/// Last action handled by a divergence-sorted prefix-minimum table.
inline bool combine_candidates(const std::vector<OracleCandidates>& cands, double budget, double& best,
                               std::vector<std::size_t>& best_idx) {
    const std::size_t na = cands.size();
    const auto& last = cands.back();
    std::vector<std::size_t> order(last.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return last.divergence[x] < last.divergence[y]; });
    std::vector<double> sorted_div(order.size());
    std::vector<double> prefix_min(order.size());
    std::vector<std::size_t> prefix_arg(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_div[i] = last.divergence[order[i]];
        const double obj = last.objective[order[i]];
        if (i == 0 || obj < prefix_min[i - 1]) {
            prefix_min[i] = obj;
            prefix_arg[i] = order[i];
        } else {
            prefix_min[i] = prefix_min[i - 1];
            prefix_arg[i] = prefix_arg[i - 1];
        }
    }

    best = std::numeric_limits<double>::infinity();
    best_idx.assign(na, 0);
    std::vector<std::size_t> idx(na, 0);
    constexpr double slack = 1e-15;
    std::function<void(std::size_t, double, double)> rec = [&](std::size_t a, double div_used, double obj_used) {
        if (a + 1 == na) {
            const double room = budget - div_used + slack;
            auto it = std::upper_bound(sorted_div.begin(), sorted_div.end(), room);
            if (it == sorted_div.begin()) return;
            const std::size_t pos = static_cast<std::size_t>(it - sorted_div.begin()) - 1;
            const double total = obj_used + prefix_min[pos];
            if (total < best) {
                best = total;
                idx[a] = prefix_arg[pos];
                best_idx = idx;
            }
            return;
        }
        const auto& ca = cands[a];
        for (std::size_t i = 0; i < ca.size(); ++i) {
            const double div = div_used + ca.divergence[i];
            if (div > budget + slack) continue;
            idx[a] = i;
            rec(a + 1, div, obj_used + ca.objective[i]);
        }
    };
    rec(0, 0.0, 0.0);
    return std::isfinite(best);
}

inline double binomial(std::size_t n, std::size_t k) {
    double r = 1.0;
    for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

} // namespace detail

/**
 * Minimum of sum_a d_a E_{P_a}[z_a] over P with sum_a E_{mu_a}[f(P_a/mu_a)] <= |A| rho,
 * by lattice enumeration (step grid_step) followed by refine_rounds local
 * searches, each with a 10x finer lattice around the incumbent.
 *
 * The reported epsilon = Lip * final_step with Lip = sum_a d_a span(z_a) |supp_a|.
 */
inline OracleResult primal_min_oracle(const StateProblem& sp, const UncertaintyModel& u, const OracleConfig& cfg = {}) {
    check_state_problem(sp);
    if (!(cfg.grid_step > 0.0 && cfg.grid_step < 1.0))
        throw std::invalid_argument("primal_min_oracle: grid_step must lie in (0,1)");
    std::size_t total_support = 0;
    for (const auto& b : sp.branches) total_support += b.probs.size();
    if (total_support > OracleConfig::kMaxTotalSupport)
        throw std::invalid_argument("primal_min_oracle: total support " + std::to_string(total_support) +
                                    " beyond desk-scale limit");

    const std::size_t na = sp.n_actions();
    const double budget = static_cast<double>(na) * u.rho();
    const auto units = static_cast<std::size_t>(std::llround(1.0 / cfg.grid_step));

    std::vector<detail::OracleCandidates> cands;
    cands.reserve(na);
    for (std::size_t a = 0; a < na; ++a) {
        const std::size_t m = sp.branches[a].probs.size();
        if (detail::binomial(units + m - 1, m - 1) > static_cast<double>(OracleConfig::kMaxCandidatesPerAction))
            throw std::invalid_argument("primal_min_oracle: lattice too large for action support");
        cands.push_back(detail::simplex_lattice(u, sp.branches[a], sp.weights[a], units));
    }

    double best = 0.0;
    std::vector<std::size_t> best_idx;
    if (!detail::combine_candidates(cands, budget, best, best_idx))
        throw std::logic_error("primal_min_oracle: nominal point infeasible");

    auto incumbent_of = [&](std::size_t a) {
        const auto& c = cands[a];
        return std::vector<double>(c.probs.begin() + static_cast<long>(best_idx[a] * c.dim),
                                   c.probs.begin() + static_cast<long>((best_idx[a] + 1) * c.dim));
    };

    // Pattern search: at each scale re-center the local lattice until the
    // incumbent stops moving, then shrink the spacing 10x.
    double step = cfg.grid_step;
    for (std::size_t round = 0; round < cfg.refine_rounds; ++round) {
        const double fine = step * 0.1;
        for (std::size_t recenter = 0; recenter < 200; ++recenter) {
            std::vector<detail::OracleCandidates> local;
            local.reserve(na);
            for (std::size_t a = 0; a < na; ++a) {
                const std::size_t m = sp.branches[a].probs.size();
                long half = 20;
                while (half > 1 && std::pow(2.0 * static_cast<double>(half) + 1.0, static_cast<double>(m - 1)) >
                                       static_cast<double>(OracleConfig::kMaxCandidatesPerAction))
                    half /= 2;
                local.push_back(
                    detail::local_lattice(u, sp.branches[a], sp.weights[a], incumbent_of(a), fine, half));
            }
            double refined = 0.0;
            std::vector<std::size_t> refined_idx;
            const bool improved = detail::combine_candidates(local, budget, refined, refined_idx) &&
                                  refined < best - 1e-15 * (1.0 + std::abs(best));
            cands = std::move(local);
            // index 0 of every local lattice is the incumbent
            best_idx = improved ? refined_idx : std::vector<std::size_t>(na, 0);
            if (!improved) break;
            best = refined;
        }
        step = fine;
    }

    OracleResult out;
    out.value = best;
    out.final_step = step;
    double lip = 0.0;
    for (std::size_t a = 0; a < na; ++a)
        lip += sp.weights[a] * sp.branches[a].span() * static_cast<double>(sp.branches[a].probs.size());
    out.epsilon = lip * step;
    for (std::size_t a = 0; a < na; ++a) out.argmin.push_back(incumbent_of(a));
    return out;
}

} // namespace drmdp
