#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

using namespace drmdp;

TEST(ModelJson, RoundTripIsBitExact) {
    std::mt19937_64 rng(201);
    const auto mdp = testkit::random_mdp(rng, 4, 3, 0.93, 2);
    const auto path = (std::filesystem::temp_directory_path() / "drmdp_roundtrip.json").string();
    save_model(mdp, path);
    const auto back = load_model(path);
    std::remove(path.c_str());
    EXPECT_EQ(back.n_states(), mdp.n_states());
    EXPECT_EQ(back.n_actions(), mdp.n_actions());
    EXPECT_EQ(back.gamma(), mdp.gamma());
    EXPECT_EQ(back.kernel(), mdp.kernel());
    EXPECT_EQ(back.reward(), mdp.reward());
}

TEST(ModelJson, RaggedInputRejected) {
    auto j = model_to_json(TabularMDP(1, 1, {1.0}, {0.0}, 0.9));
    j["kernel"][0][0].push_back(0.0);
    EXPECT_THROW(model_from_json(j), DimensionError);
}

TEST(BatchJson, RoundTripAndTotals) {
    std::mt19937_64 rng(203);
    const auto mdp = testkit::random_mdp(rng, 3, 2, 0.9);
    const auto batch = draw_samples(mdp, 25, 4);
    const auto back = batch_from_json(batch_to_json(batch));
    EXPECT_EQ(back.counts, batch.counts);
    EXPECT_EQ(back.n_per_sa, 25u);
    auto j = batch_to_json(batch);
    j["n_per_sa"] = 26;
    EXPECT_THROW(batch_from_json(j), std::invalid_argument);
}

TEST(SolutionJson, Fields) {
    const TabularMDP mdp(1, 2, {1.0, 1.0}, {1.0, 0.5}, 0.5);
    const auto res = solve_fixed_point(mdp, UncertaintyModel::kl(0.1));
    const auto j = solution_to_json(res, res.sweeps);
    EXPECT_NEAR(j["values"][0].get<double>(), 2.0, 1e-6);
    EXPECT_EQ(j["policy"][0][0].get<double>(), 1.0);
    EXPECT_TRUE(j["inner_duals"][0].contains("lambda"));
}
