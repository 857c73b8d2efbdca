// drmdp: solve robust MDPs, build benchmark models, run estimation-error experiments.

#include "drmdp/drmdp.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace drmdp;

constexpr int kExitRowFailed = 1;
constexpr int kExitBadArgs = 2;

struct DivergenceFlags {
    std::string divergence = "kl";
    double k = 2.0;
    std::optional<double> rho;

    void add(CLI::App* app, bool rho_required) {
        app->add_option("--divergence", divergence, "kl or fk")->check(CLI::IsMember({"kl", "fk"}));
        app->add_option("--k", k, "Cressie-Read exponent for fk (k > 1)");
        auto* opt = app->add_option("--rho", rho, "ball radius per action");
        if (rho_required) opt->required();
    }

    UncertaintyModel model(double default_rho) const {
        const double r = rho.value_or(default_rho);
        return divergence == "kl" ? UncertaintyModel::kl(r) : UncertaintyModel::fk(k, r);
    }
};

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(1) << '\n';
}

struct ExperimentFlags {
    DivergenceFlags div;
    std::vector<std::uint64_t> n_grid;
    std::vector<std::uint64_t> seeds;
    std::size_t num_seeds = 20;
    double vi_tol = 1e-6;
    std::size_t workers = 1;
    std::string out;

    void add(CLI::App* app) {
        div.add(app, false);
        app->add_option("--n-grid", n_grid, "samples per (s,a)")->required()->delimiter(',');
        app->add_option("--seeds", seeds, "explicit seed list")->delimiter(',');
        app->add_option("--num-seeds", num_seeds, "use seeds 0..N-1 when --seeds is absent");
        app->add_option("--vi-tol", vi_tol, "value iteration accuracy");
        app->add_option("--workers", workers, "threads");
        app->add_option("--out", out, "CSV output path")->required();
    }

    void fill(ExperimentSpec& spec, double default_rho) const {
        spec.divergence = div.model(default_rho);
        spec.n_grid = n_grid;
        spec.seeds = seeds;
        if (spec.seeds.empty()) {
            spec.seeds.resize(num_seeds);
            std::iota(spec.seeds.begin(), spec.seeds.end(), std::uint64_t{0});
        }
        spec.vi_tol = vi_tol;
        spec.workers = workers;
        spec.out_path = out;
    }
};

int finish(const std::vector<ExperimentRow>& rows, const std::string& out) {
    write_csv(out, rows);
    std::size_t failed = 0;
    for (const auto& r : rows)
        if (!r.ok()) ++failed;
    std::cerr << rows.size() << " rows written to " << out;
    if (failed > 0) std::cerr << ", " << failed << " failed";
    std::cerr << '\n';
    return failed > 0 ? kExitRowFailed : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributionally robust MDPs with divergence balls"};
    app.require_subcommand(1);

    // solve
    auto* solve = app.add_subcommand("solve", "robust value iteration on a JSON model");
    std::string model_path;
    std::string solve_out;
    double solve_tol = 1e-6;
    DivergenceFlags solve_div;
    solve->add_option("--model", model_path, "model JSON")->required()->check(CLI::ExistingFile);
    solve_div.add(solve, true);
    solve->add_option("--tol", solve_tol, "value iteration accuracy");
    solve->add_option("--out", solve_out, "solution JSON")->required();

    // bench
    auto* bench = app.add_subcommand("bench", "write a benchmark model as JSON");
    bench->require_subcommand(1);
    InventoryParams inv;
    std::string inv_out;
    auto* bench_inv = bench->add_subcommand("inventory", "inventory control with backlog");
    bench_inv->add_option("--max-inventory", inv.max_inventory);
    bench_inv->add_option("--max-backlog", inv.max_backlog);
    bench_inv->add_option("--max-order", inv.max_order);
    bench_inv->add_option("--price", inv.price);
    bench_inv->add_option("--cost", inv.cost);
    bench_inv->add_option("--holding", inv.holding);
    bench_inv->add_option("--backlog-penalty", inv.backlog_penalty);
    bench_inv->add_option("--gamma", inv.gamma);
    bench_inv->add_option("--demand-pmf", inv.demand_pmf)->delimiter(',');
    bench_inv->add_option("--out", inv_out)->required();
    LowerBoundParams lb;
    std::string lb_out;
    auto* bench_lb = bench->add_subcommand("lowerbound", "x -> y1 -> y2 chain");
    bench_lb->add_option("--states", lb.n_initial_states, "number of initial states");
    bench_lb->add_option("--actions", lb.n_actions);
    bench_lb->add_option("--stay-prob", lb.stay_prob);
    bench_lb->add_option("--gamma", lb.gamma);
    bench_lb->add_option("--out", lb_out)->required();

    // experiment
    auto* exp = app.add_subcommand("experiment", "estimation error experiments, CSV output");
    exp->require_subcommand(1);
    auto* evn = exp->add_subcommand("error-vs-n", "error of the empirical solution against n");
    ExperimentFlags evn_flags;
    std::string evn_benchmark = "inventory";
    std::string evn_model;
    LowerBoundParams evn_lb;
    evn_flags.add(evn);
    evn->add_option("--benchmark", evn_benchmark)->check(CLI::IsMember({"inventory", "lowerbound", "file"}));
    evn->add_option("--model", evn_model, "model JSON for --benchmark file");
    evn->add_option("--states", evn_lb.n_initial_states, "lower-bound initial states");
    evn->add_option("--actions", evn_lb.n_actions, "lower-bound actions");
    evn->add_option("--stay-prob", evn_lb.stay_prob);

    auto* sweep = exp->add_subcommand("sweep", "lower-bound MDP, normalized error against |S| or |A|");
    ExperimentFlags sweep_flags;
    std::string sweep_axis;
    std::vector<std::size_t> sweep_grid{10, 20, 40, 80};
    std::size_t fixed = 5;
    double stay_prob = LowerBoundParams{}.stay_prob;
    sweep->add_option("axis", sweep_axis, "states or actions")->required()->check(CLI::IsMember({"states", "actions"}));
    sweep_flags.add(sweep);
    sweep->add_option("--grid", sweep_grid, "sizes along the axis")->delimiter(',');
    sweep->add_option("--fixed", fixed, "size of the other dimension");
    sweep->add_option("--stay-prob", stay_prob);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitBadArgs;
    }

    try {
        if (*solve) {
            const TabularMDP mdp = load_model(model_path);
            const auto res = solve_fixed_point(mdp, solve_div.model(0.0), {}, solve_tol);
            write_json(solution_to_json(res, res.sweeps), solve_out);
            return 0;
        }
        if (*bench_inv) {
            save_model(build_inventory(inv), inv_out);
            return 0;
        }
        if (*bench_lb) {
            save_model(build_lower_bound(lb), lb_out);
            return 0;
        }
        if (*evn) {
            ExperimentSpec spec;
            spec.benchmark = evn_benchmark == "inventory"    ? BenchmarkKind::Inventory
                             : evn_benchmark == "lowerbound" ? BenchmarkKind::LowerBound
                                                             : BenchmarkKind::File;
            if (spec.benchmark == BenchmarkKind::File && evn_model.empty())
                throw std::invalid_argument("--benchmark file needs --model");
            spec.model_path = evn_model;
            spec.lower_bound = evn_lb;
            evn_flags.fill(spec, spec.benchmark == BenchmarkKind::LowerBound ? 0.1 : 1.0 / 6.0);
            const auto rows = run_error_vs_n(spec);
            const int code = finish(rows, spec.out_path);
            try {
                const auto fit = fit_loglog_slope(rows);
                std::cerr << "log-log slope " << fit.slope << " (r2 " << fit.r2 << ")\n";
            } catch (const std::invalid_argument&) {
                // fewer than three n values
            }
            return code;
        }
        if (*sweep) {
            ExperimentSpec spec;
            spec.benchmark = BenchmarkKind::LowerBound;
            spec.sweep_axis = sweep_axis == "states" ? SweepAxis::States : SweepAxis::Actions;
            spec.sweep_grid = sweep_grid;
            if (spec.sweep_axis == SweepAxis::States)
                spec.lower_bound.n_actions = fixed;
            else
                spec.lower_bound.n_initial_states = fixed;
            spec.lower_bound.stay_prob = stay_prob;
            sweep_flags.fill(spec, 0.1);
            return finish(run_size_sweep(spec), spec.out_path);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed model: " << e.what() << '\n';
        return kExitBadArgs;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRowFailed;
    }
    return 0;
}
