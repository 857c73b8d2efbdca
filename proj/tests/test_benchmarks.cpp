#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace drmdp;

TEST(Inventory, Shape) {
    const auto mdp = build_inventory({});
    EXPECT_EQ(mdp.n_states(), 16u);
    EXPECT_EQ(mdp.n_actions(), 6u);
    EXPECT_TRUE(validate_mdp(mdp).ok);
    EXPECT_NEAR(min_support_probability(mdp), 0.1, 1e-15);
}

TEST(Inventory, TransitionReward) {
    const InventoryParams prm;
    const auto mdp = build_inventory(prm);
    // s=0, a=2, demand 1: ordered 2, next 1, sales 1, reward 3 - 0.2 - 4.
    const auto s = inventory_state(prm, 0);
    const auto next = inventory_state(prm, 1);
    EXPECT_NEAR(mdp.r(s, 2, next), -1.2, 1e-14);
    EXPECT_NEAR(mdp.p(s, 2, next), 0.2, 1e-15);
}

TEST(Inventory, FullStockIgnoresOrder) {
    const InventoryParams prm;
    const auto mdp = build_inventory(prm);
    const auto s = inventory_state(prm, 10);
    for (std::size_t d = 0; d < prm.demand_pmf.size(); ++d)
        EXPECT_NEAR(mdp.p(s, 5, inventory_state(prm, 10 - static_cast<int>(d))), prm.demand_pmf[d], 1e-15);
    for (std::size_t t = 0; t < mdp.n_states(); ++t) EXPECT_EQ(mdp.p(s, 5, t), mdp.p(s, 0, t));
}

TEST(Inventory, BacklogBoundaryAggregates) {
    const InventoryParams prm;
    const auto mdp = build_inventory(prm);
    // From -4 with no order, demands 1..4 all end at -5.
    const auto s = inventory_state(prm, -4);
    const auto bottom = inventory_state(prm, -5);
    EXPECT_NEAR(mdp.p(s, 0, bottom), 0.9, 1e-15);
    // Sales at the boundary: s - s' + ordered = 1; reward 3 - 3*5 = -12.
    EXPECT_NEAR(mdp.r(s, 0, bottom), -12.0, 1e-14);
}

TEST(Inventory, RewardModesAgree) {
    InventoryParams a;
    InventoryParams b;
    b.reward_mode = InventoryRewardMode::ExpectedGivenTransition;
    const auto ma = build_inventory(a);
    const auto mb = build_inventory(b);
    for (std::size_t i = 0; i < ma.kernel().size(); ++i)
        if (ma.kernel()[i] > 0.0) {
            EXPECT_NEAR(ma.reward()[i], mb.reward()[i], 1e-12);
        }
}

TEST(Inventory, RejectsBadParams) {
    InventoryParams prm;
    prm.demand_pmf = {0.5, 0.4};
    EXPECT_THROW(build_inventory(prm), std::invalid_argument);
    prm = {};
    prm.max_order = 0;
    EXPECT_THROW(build_inventory(prm), std::invalid_argument);
}

TEST(LowerBound, Counting) {
    LowerBoundParams prm;
    prm.n_initial_states = 2;
    prm.n_actions = 2;
    const auto mdp = build_lower_bound(prm);
    EXPECT_EQ(mdp.n_states(), 10u);
    EXPECT_TRUE(validate_mdp(mdp).ok);
}

TEST(LowerBound, NominalValues) {
    LowerBoundParams prm;
    prm.n_initial_states = 3;
    prm.n_actions = 2;
    const auto mdp = build_lower_bound(prm);
    const LowerBoundLayout L{3, 2};
    const auto v = classical_value_iteration(mdp, 1e-13);
    for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t a = 0; a < 2; ++a) {
            EXPECT_NEAR(v[L.y1(s, a)], 1.0 / 0.19, 1e-10);
            EXPECT_NEAR(v[L.y2(s, a)], 0.0, 1e-12);
        }
    EXPECT_NEAR(v[L.x(0)], 0.9 / 0.19, 1e-10);
}

TEST(LowerBound, RejectsBadStayProbability) {
    LowerBoundParams prm;
    prm.stay_prob = 1.0;
    EXPECT_THROW(build_lower_bound(prm), std::invalid_argument);
}
