#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace drmdp;

TEST(FixedPoint, SelfLoopAnyRadius) {
    const TabularMDP mdp(1, 1, {1.0}, {1.0}, 0.9);
    for (const auto& u : {UncertaintyModel::kl(0.1), UncertaintyModel::kl(50.0), UncertaintyModel::fk(2.0, 5.0)})
        EXPECT_NEAR(solve_fixed_point(mdp, u, {}, 1e-9).values[0], 10.0, 1e-8);
}

TEST(FixedPoint, VanishingRadiusIsClassical) {
    std::mt19937_64 rng(101);
    const auto mdp = testkit::random_mdp(rng, 5, 3, 0.9);
    const auto classical = classical_value_iteration(mdp);
    EXPECT_LE(sup_norm_distance(solve_fixed_point(mdp, UncertaintyModel::kl(1e-8)).values, classical), 1e-3);
    EXPECT_LE(sup_norm_distance(solve_fixed_point(mdp, UncertaintyModel::fk(2.0, 1e-8)).values, classical), 1e-3);
}

TEST(FixedPoint, ResidualsAndAccuracy) {
    std::mt19937_64 rng(103);
    const auto mdp = testkit::random_mdp(rng, 4, 2, 0.8);
    const auto u = UncertaintyModel::kl(0.2);
    const auto res = solve_fixed_point(mdp, u, {}, 1e-6);
    EXPECT_EQ(res.residuals.size(), res.sweeps);
    const auto tight = solve_fixed_point(mdp, u, {}, 1e-11);
    EXPECT_LE(sup_norm_distance(res.values, tight.values), 1e-6);
    // The returned values are a fixed point of T* up to the tolerance.
    const auto again = robust_bellman_optimal(mdp, u, tight.values).values;
    EXPECT_LE(sup_norm_distance(again, tight.values), 1e-10);
}

TEST(FixedPoint, SweepLimit) {
    std::mt19937_64 rng(107);
    const auto mdp = testkit::random_mdp(rng, 3, 2, 0.99);
    try {
        solve_fixed_point(mdp, UncertaintyModel::kl(0.1), {}, 1e-9, 5);
        FAIL() << "expected SweepLimitError";
    } catch (const SweepLimitError& e) {
        EXPECT_EQ(e.last_iterate().size(), 3u);
        EXPECT_GT(e.residual(), 0.0);
    }
}

TEST(FixedPoint, OracleBackedValueIteration) {
    // Every Bellman application evaluated by the grid over d and the primal oracle.
    std::mt19937_64 rng(109);
    const auto mdp = testkit::random_mdp(rng, 2, 2, 0.5);
    const auto u = UncertaintyModel::kl(0.1);
    OracleConfig coarse;
    coarse.grid_step = 0.02;
    coarse.refine_rounds = 1;
    std::vector<double> v(2, 0.0);
    for (int sweep = 0; sweep < 25; ++sweep) {
        std::vector<double> next(2);
        for (std::size_t s = 0; s < 2; ++s) next[s] = testkit::grid_over_d_oracle(build_branches(mdp, v, s), u, 0.02, coarse);
        v = next;
    }
    const auto solved = solve_fixed_point(mdp, u, {}, 1e-9).values;
    EXPECT_LE(sup_norm_distance(v, solved), 5e-3);
}

TEST(Proposition1, IdenticalKernelGivesZero) {
    // A deterministic kernel samples back to itself.
    const std::vector<double> k{0, 1, 1, 0, 1, 0, 0, 1};
    const std::vector<double> r{0, 1, 2, 0, 3, 0, 0, 4};
    const TabularMDP mdp(2, 2, k, r, 0.9);
    const auto u = UncertaintyModel::kl(0.1);
    const auto rep = proposition1_check(mdp, u, draw_samples(mdp, 10, 3));
    EXPECT_LE(rep.lhs, rep.slack);
    EXPECT_LE(rep.rhs, rep.slack);
    EXPECT_TRUE(rep.holds);
}

TEST(Proposition1, HoldsOnSampledKernels) {
    std::mt19937_64 rng(113);
    const auto mdp = testkit::random_mdp(rng, 5, 2, 0.9);
    for (const auto& u : {UncertaintyModel::kl(0.1), UncertaintyModel::fk(2.0, 0.1)}) {
        const auto v_star = solve_fixed_point(mdp, u).values;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const auto rep = proposition1_check(mdp, u, draw_samples(mdp, 50, seed), v_star, {}, 1e-6);
            EXPECT_TRUE(rep.holds) << rep.lhs << " > " << rep.rhs;
            EXPECT_GT(rep.lhs, 0.0);
        }
    }
}
