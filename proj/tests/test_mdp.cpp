#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace drmdp;

namespace {

TabularMDP uniform_2x2(double gamma = 0.9) {
    return {2, 2, std::vector<double>(8, 0.5), std::vector<double>(8, 0.0), gamma};
}

} // namespace

TEST(Validate, UniformRowsPass) { EXPECT_TRUE(validate_mdp(uniform_2x2()).ok); }

TEST(Validate, RowSummingAboveOneIsReported) {
    std::vector<double> k(8, 0.5);
    k[2] = 0.6; // (s=0, a=1) -> [0.6, 0.5]
    const auto rep = validate_mdp(TabularMDP(2, 2, k, std::vector<double>(8, 0.0), 0.9));
    ASSERT_FALSE(rep.ok);
    EXPECT_EQ(rep.state, 0u);
    EXPECT_EQ(rep.action, 1u);
}

TEST(Validate, GammaOneRejected) {
    const auto rep = validate_mdp(uniform_2x2(1.0));
    ASSERT_FALSE(rep.ok);
    EXPECT_EQ(rep.message, "gamma out of range");
}

TEST(Validate, DeclaredRewardBounds) {
    std::vector<double> r(8, 0.0);
    r[5] = 2.0;
    EXPECT_FALSE(validate_mdp(TabularMDP(2, 2, std::vector<double>(8, 0.5), r, 0.9, 0.0, 1.0)).ok);
    EXPECT_TRUE(validate_mdp(TabularMDP(2, 2, std::vector<double>(8, 0.5), r, 0.9, 0.0, 2.0)).ok);
}

TEST(TabularMDPShape, WrongSizeThrows) {
    EXPECT_THROW(TabularMDP(2, 2, std::vector<double>(7, 0.5), std::vector<double>(8, 0.0), 0.9), DimensionError);
    EXPECT_THROW(TabularMDP(0, 2, {}, {}, 0.9), DimensionError);
}

TEST(ClassicalBellman, ConstantRewardAndValue) {
    std::mt19937_64 rng(3);
    auto base = testkit::random_mdp(rng, 4, 3, 0.8);
    const TabularMDP mdp(4, 3, base.kernel(), std::vector<double>(48, 1.5), 0.8);
    const auto out = classical_bellman_apply(mdp, std::vector<double>(4, 2.0));
    for (double x : out) EXPECT_NEAR(x, 1.5 + 0.8 * 2.0, 1e-14);
}

TEST(ClassicalBellman, SelfLoop) {
    const TabularMDP mdp(1, 1, {1.0}, {1.0}, 0.9);
    EXPECT_DOUBLE_EQ(classical_bellman_apply(mdp, std::vector<double>{0.0})[0], 1.0);
    EXPECT_NEAR(classical_value_iteration(mdp)[0], 10.0, 1e-9);
}

TEST(ClassicalBellman, HandBuiltTwoState) {
    // s0: a0 -> [0.2, 0.8] reward 1 on s1; a1 -> [1, 0] reward 0.5 everywhere.
    // s1: a0 -> [0, 1] reward 0;            a1 -> [0.5, 0.5] reward 2 on s0.
    const std::vector<double> k{0.2, 0.8, 1.0, 0.0, 0.0, 1.0, 0.5, 0.5};
    const std::vector<double> r{0.0, 1.0, 0.5, 0.5, 0.0, 0.0, 2.0, 0.0};
    const TabularMDP mdp(2, 2, k, r, 0.5);
    const std::vector<double> v{1.0, 3.0};
    // s0: a0 = 0.2(0 + 0.5) + 0.8(1 + 1.5) = 2.1; a1 = 0.5 + 0.5 = 1.0
    // s1: a0 = 0 + 1.5 = 1.5;                     a1 = 0.5(2 + 0.5) + 0.5(0 + 1.5) = 2.0
    const auto res = classical_bellman(mdp, v);
    EXPECT_NEAR(res.values[0], 2.1, 1e-14);
    EXPECT_NEAR(res.values[1], 2.0, 1e-14);
    EXPECT_EQ(res.greedy_actions[0], 0u);
    EXPECT_EQ(res.greedy_actions[1], 1u);
}

TEST(MinSupport, Examples) {
    EXPECT_DOUBLE_EQ(min_support_probability(std::vector<double>(16, 0.25)), 0.25);
    EXPECT_DOUBLE_EQ(min_support_probability(std::vector<double>{1.0, 0.0, 0.3, 0.7}), 0.3);
}

TEST(Policy, UniformIsValid) {
    auto pi = RandomizedPolicy::uniform(3, 4);
    EXPECT_TRUE(pi.is_valid());
    pi.row(1)[0] = 0.5;
    EXPECT_FALSE(pi.is_valid());
}
