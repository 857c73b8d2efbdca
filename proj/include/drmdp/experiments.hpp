#pragma once

// Estimation-error experiments: error of the empirical robust value against the
// population one as the per-(s,a) sample size grows, and the size sweeps on the
// lower-bound MDP.

#include "drmdp/benchmarks.hpp"
#include "drmdp/model_io.hpp"
#include "drmdp/sampling.hpp"
#include "drmdp/value_iteration.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace drmdp {

enum class BenchmarkKind { Inventory, LowerBound, File };
enum class SweepAxis { None, States, Actions };

inline std::string benchmark_name(BenchmarkKind b) {
    switch (b) {
    case BenchmarkKind::Inventory: return "inventory";
    case BenchmarkKind::LowerBound: return "lowerbound";
    case BenchmarkKind::File: return "file";
    }
    return "unknown";
}

struct ExperimentSpec {
    BenchmarkKind benchmark = BenchmarkKind::Inventory;
    std::string model_path; // File benchmark only
    InventoryParams inventory;
    LowerBoundParams lower_bound;
    UncertaintyModel divergence = UncertaintyModel::kl(1.0 / 6.0);
    std::vector<std::uint64_t> n_grid;
    std::vector<std::uint64_t> seeds;
    SweepAxis sweep_axis = SweepAxis::None;
    std::vector<std::size_t> sweep_grid;
    double vi_tol = 1e-6;
    DualSolverConfig solver;
    std::string out_path;

    std::size_t workers = 1; ///< threads running (n, seed) cells

    /// Test hook: use the nominal kernel in place of the sampled one.
    bool force_nominal_kernel = false;
};

inline const char* const kCsvHeader =
    "benchmark,divergence,k,rho,gamma,n_states,n_actions,n_per_sa,seed,error_linf,normalized_error,runtime_ms,status";

struct ExperimentRow {
    std::string benchmark;
    std::string divergence;
    double k = 0.0; // written only for f_k
    double rho = 0.0;
    double gamma = 0.0;
    std::size_t n_states = 0;
    std::size_t n_actions = 0;
    std::uint64_t n_per_sa = 0;
    std::uint64_t seed = 0;
    double error_linf = 0.0;
    double normalized_error = 0.0;
    double runtime_ms = 0.0;
    std::string status;

    // Not part of the CSV: the bound ||T_hat*(v*) - T*(v*)|| / (1 - gamma) on error_linf, and its slack.
    double bound = 0.0;
    double bound_slack = 0.0;

    bool ok() const { return status == "ok"; }
};

inline void validate_spec(const ExperimentSpec& spec) {
    if (spec.n_grid.empty()) throw std::invalid_argument("experiment: n grid is empty");
    if (spec.seeds.empty()) throw std::invalid_argument("experiment: seed list is empty");
    if (std::set<std::uint64_t>(spec.seeds.begin(), spec.seeds.end()).size() != spec.seeds.size())
        throw std::invalid_argument("experiment: seeds must be distinct");
    for (auto n : spec.n_grid)
        if (n == 0) throw std::invalid_argument("experiment: n must be at least 1");
    if (!(spec.vi_tol > 0.0)) throw std::invalid_argument("experiment: vi_tol must be positive");
}

inline TabularMDP build_benchmark(const ExperimentSpec& spec) {
    switch (spec.benchmark) {
    case BenchmarkKind::Inventory: return build_inventory(spec.inventory);
    case BenchmarkKind::LowerBound: return build_lower_bound(spec.lower_bound);
    case BenchmarkKind::File: return load_model(spec.model_path);
    }
    throw std::invalid_argument("experiment: unknown benchmark");
}

namespace detail {

inline std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

inline ExperimentRow error_cell(const ExperimentSpec& spec, const TabularMDP& mdp, const SupportModel& population,
                                const ValueFunction& v_star, double log_size, std::uint64_t n, std::uint64_t seed) {
    const UncertaintyModel& u = spec.divergence;
    ExperimentRow row;
    row.benchmark = benchmark_name(spec.benchmark);
    row.divergence = u.name();
    row.k = u.kind() == DivergenceKind::Fk ? u.k() : 0.0;
    row.rho = u.rho();
    row.gamma = mdp.gamma();
    row.n_states = mdp.n_states();
    row.n_actions = mdp.n_actions();
    row.n_per_sa = n;
    row.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const TabularMDP sampled = spec.force_nominal_kernel ? mdp : empirical_mdp(mdp, draw_samples(mdp, n, seed));
        const SupportModel empirical(sampled);
        const auto v_hat = solve_fixed_point(empirical, u, spec.solver, spec.vi_tol).values;
        const auto t_pop = robust_bellman_optimal(population, u, v_star, spec.solver).values;
        const auto t_emp = robust_bellman_optimal(empirical, u, v_star, spec.solver).values;
        row.error_linf = sup_norm_distance(v_hat, v_star);
        row.normalized_error = log_size > 0.0 ? row.error_linf / log_size : row.error_linf;
        row.bound = sup_norm_distance(t_emp, t_pop) / (1.0 - mdp.gamma());
        row.bound_slack = 2.0 * spec.vi_tol / (1.0 - mdp.gamma());
        row.status = row.error_linf <= row.bound + row.bound_slack ? "ok" : "bound_violated";
    } catch (const std::exception& e) {
        row.status = "error: " + csv_safe(e.what());
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return row;
}

/// One row per (n, seed) for a fixed model, sorted by n then seed. Errors are normalized by
/// log(size_states * size_actions).
inline std::vector<ExperimentRow> error_rows(const ExperimentSpec& spec, const TabularMDP& mdp, std::size_t size_states,
                                             std::size_t size_actions) {
    const double log_size = std::log(static_cast<double>(size_states * size_actions));
    const ValueFunction v_star = solve_fixed_point(mdp, spec.divergence, spec.solver, spec.vi_tol).values;
    const SupportModel population(mdp);

    std::vector<std::uint64_t> ns = spec.n_grid;
    std::vector<std::uint64_t> seeds = spec.seeds;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    std::sort(seeds.begin(), seeds.end());

    std::vector<std::pair<std::uint64_t, std::uint64_t>> jobs;
    for (auto n : ns)
        for (auto seed : seeds) jobs.emplace_back(n, seed);
    std::vector<ExperimentRow> rows(jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++)
            rows[i] = error_cell(spec, mdp, population, v_star, log_size, jobs[i].first, jobs[i].second);
    };
    const std::size_t n_workers = std::clamp<std::size_t>(spec.workers, 1, jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < n_workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return rows;
}

} // namespace detail

/// Error ||v_hat - v*|| for every (n, seed); v* is solved once. Solver failures are recorded per row.
inline std::vector<ExperimentRow> run_error_vs_n(const ExperimentSpec& spec) {
    validate_spec(spec);
    const TabularMDP mdp = build_benchmark(spec);
    if (spec.benchmark == BenchmarkKind::LowerBound)
        return detail::error_rows(spec, mdp, spec.lower_bound.n_initial_states, spec.lower_bound.n_actions);
    return detail::error_rows(spec, mdp, mdp.n_states(), mdp.n_actions());
}

/// Lower-bound MDP at each size of the sweep grid (|S| or |A| varied, the other fixed), then error vs n.
inline std::vector<ExperimentRow> run_size_sweep(const ExperimentSpec& spec) {
    validate_spec(spec);
    if (spec.sweep_axis == SweepAxis::None) throw std::invalid_argument("run_size_sweep: sweep axis is none");
    if (spec.sweep_grid.empty()) throw std::invalid_argument("run_size_sweep: sweep grid is empty");
    std::vector<std::size_t> sizes = spec.sweep_grid;
    std::sort(sizes.begin(), sizes.end());

    std::vector<ExperimentRow> rows;
    for (std::size_t size : sizes) {
        ExperimentSpec cell = spec;
        cell.benchmark = BenchmarkKind::LowerBound;
        if (spec.sweep_axis == SweepAxis::States)
            cell.lower_bound.n_initial_states = size;
        else
            cell.lower_bound.n_actions = size;
        // Normalized by the construction's own |S| (initial states), not its total state count.
        auto part = detail::error_rows(cell, build_lower_bound(cell.lower_bound), cell.lower_bound.n_initial_states,
                                       cell.lower_bound.n_actions);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return rows;
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << kCsvHeader << '\n';
    out.precision(17);
    for (const auto& r : rows) {
        out << r.benchmark << ',' << r.divergence << ',';
        if (r.divergence == "fk") out << r.k;
        out << ',' << r.rho << ',' << r.gamma << ',' << r.n_states << ',' << r.n_actions << ',' << r.n_per_sa << ','
            << r.seed << ',' << r.error_linf << ',' << r.normalized_error << ',' << r.runtime_ms << ',' << r.status
            << '\n';
    }
}

inline void write_csv(const std::string& path, const std::vector<ExperimentRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot write " + path);
    write_csv(out, rows);
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of log(mean error over seeds) on log n, using rows with status ok.
inline SlopeFit fit_loglog_slope(const std::vector<ExperimentRow>& rows) {
    std::map<std::uint64_t, std::pair<double, std::size_t>> by_n;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto& acc = by_n[r.n_per_sa];
        acc.first += r.error_linf;
        ++acc.second;
    }
    if (by_n.size() < 3) throw std::invalid_argument("fit_loglog_slope: need at least 3 distinct n");
    std::vector<double> x;
    std::vector<double> y;
    for (const auto& [n, acc] : by_n) {
        const double mean = acc.first / static_cast<double>(acc.second);
        if (!(mean > 0.0)) throw std::invalid_argument("fit_loglog_slope: nonpositive mean error");
        x.push_back(std::log(static_cast<double>(n)));
        y.push_back(std::log(mean));
    }
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman_correlation: need two equal-length samples");
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
            for (std::size_t q = i; q <= j; ++q) r[order[q]] = avg;
            i = j + 1;
        }
        return r;
    };
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double m = static_cast<double>(x.size());
    const double mean = (m + 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mean) * (ry[i] - mean);
        sxx += (rx[i] - mean) * (rx[i] - mean);
        syy += (ry[i] - mean) * (ry[i] - mean);
    }
    return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

/// Seed-averaged normalized error per size of a sweep (keyed by n_states or n_actions).
inline std::map<std::size_t, double> sweep_means(const std::vector<ExperimentRow>& rows, SweepAxis axis) {
    std::map<std::size_t, std::pair<double, std::size_t>> acc;
    for (const auto& r : rows) {
        if (!r.ok()) continue;
        auto& a = acc[axis == SweepAxis::Actions ? r.n_actions : r.n_states];
        a.first += r.normalized_error;
        ++a.second;
    }
    std::map<std::size_t, double> out;
    for (const auto& [size, a] : acc) out[size] = a.first / static_cast<double>(a.second);
    return out;
}

} // namespace drmdp
