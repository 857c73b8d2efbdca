#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace drmdp;

namespace {

StateProblem coin(double rho_unused = 0.0) {
    (void)rho_unused;
    return {{ActionBranch{{0.0, 1.0}, {0.5, 0.5}}}, {1.0}};
}

StateProblem anti_symmetric() {
    return {{ActionBranch{{0.0, 1.0}, {0.5, 0.5}}, ActionBranch{{1.0, 0.0}, {0.5, 0.5}}}, {0.5, 0.5}};
}

} // namespace

TEST(KlDual, ObjectiveMatchesClosedForm) {
    const long double expected = -0.1L - std::log(0.5L * (1.0L + std::exp(-1.0L)));
    EXPECT_NEAR(kl_dual_objective(coin(), 0.1, 1.0), static_cast<double>(expected), 1e-15);
}

TEST(KlDual, ConstantPayoffIsUnmoved) {
    StateProblem sp{{ActionBranch{{2.5, 2.5, 2.5}, {0.2, 0.3, 0.5}}}, {1.0}};
    for (double rho : {0.01, 1.0, 100.0}) EXPECT_DOUBLE_EQ(kl_inner_value(sp, rho).value, 2.5);
}

TEST(KlDual, PointMassesPinTheKernel) {
    StateProblem sp{{ActionBranch{{1.0}, {1.0}}, ActionBranch{{3.0}, {1.0}}}, {0.25, 0.75}};
    for (double rho : {0.01, 1.0, 100.0}) EXPECT_NEAR(kl_inner_value(sp, rho).value, 2.5, 1e-15);
}

TEST(KlDual, MatchesFineScanOfTheScalarDual) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        StateProblem sp{{testkit::random_branch(rng, 3), testkit::random_branch(rng, 2)},
                        testkit::random_simplex(rng, 2)};
        const double rho = 0.05 + 0.5 * trial / 20.0;
        // Unshifted long double evaluation of the same objective.
        auto g = [&](double lam) {
            long double total = -static_cast<long double>(lam) * 2 * rho;
            for (std::size_t a = 0; a < 2; ++a) {
                long double e = 0.0L;
                for (std::size_t j = 0; j < sp.branches[a].values.size(); ++j)
                    e += sp.branches[a].probs[j] * std::exp(-sp.weights[a] * sp.branches[a].values[j] / (long double)lam);
                total -= lam * std::log(e);
            }
            return static_cast<double>(total);
        };
        const double scan = std::max(testkit::scan_max_log(g, 1e-3, 1e3, 200000), sp.worst_support_value());
        const auto sol = kl_inner_value(sp, rho);
        EXPECT_NEAR(sol.value, scan, 1e-7) << "trial " << trial;
        EXPECT_GE(sol.value, scan - 1e-12);
    }
}

TEST(KlDual, LimitsInRho) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        StateProblem sp{{testkit::random_branch(rng, 4, 10.0), testkit::random_branch(rng, 3, 10.0)},
                        testkit::random_simplex(rng, 2)};
        EXPECT_NEAR(kl_inner_value(sp, 1e-8).value, sp.nominal_value(), 1e-3);
        EXPECT_NEAR(kl_inner_value(sp, 1e6).value, sp.worst_support_value(), 1e-4);
    }
}

TEST(FkConstant, Examples) {
    EXPECT_NEAR(fk_constant_c(2.0, 0.1, 2), 1.5491933384829668, 1e-15);
    EXPECT_NEAR(fk_constant_c(2.0, 1e-300, 4), 2.0, 1e-15);
    EXPECT_NEAR(fk_constant_c(3.0, 1.0, 1), std::cbrt(7.0), 1e-15);
}

TEST(FkDual, ObjectiveExamples) {
    const auto sp = anti_symmetric();
    const std::vector<double> corner{0.0, 0.0};
    EXPECT_DOUBLE_EQ(fk_dual_objective(sp, 2.0, 0.1, corner), sp.worst_support_value());

    StateProblem flat{{ActionBranch{{4.0, 4.0}, {0.3, 0.7}}}, {1.0}};
    EXPECT_DOUBLE_EQ(fk_dual_objective(flat, 2.0, 0.1, std::vector<double>{4.0}), 4.0);

    const double expected = -std::sqrt(1.2) * std::sqrt(0.32) + 0.8;
    EXPECT_NEAR(fk_dual_objective(coin(), 2.0, 0.1, std::vector<double>{0.8}), expected, 1e-15);
}

TEST(FkDual, ScalarCaseMatchesScanOverEta) {
    for (double k : {1.5, 2.0, 3.0}) {
        for (double rho : {0.01, 0.1, 0.5}) {
            StateProblem sp{{ActionBranch{{0.0, 0.4, 1.0}, {0.3, 0.3, 0.4}}}, {1.0}};
            auto g = [&](double eta) { return fk_dual_objective(sp, k, rho, std::vector<double>{eta}); };
            // eta below max z on a linear grid, above it on a geometric one (small rho pushes eta far out).
            double best = -1e300;
            for (int i = 0; i <= 200000; ++i) best = std::max(best, g(-1.0 + 2.0 * i / 200000.0));
            best = std::max(best, testkit::scan_max_log([&](double x) { return g(1.0 + x); }, 1e-6, 1e6, 400000));
            const auto sol = fk_inner_value(sp, k, rho);
            EXPECT_NEAR(sol.value, best, 1e-7) << "k=" << k << " rho=" << rho;
            EXPECT_GE(sol.value, best - 1e-12);
        }
    }
}

TEST(FkDual, RecoveredEtaAttainsTheValue) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        StateProblem sp{{testkit::random_branch(rng, 3), testkit::random_branch(rng, 2)},
                        testkit::random_simplex(rng, 2)};
        const double k = trial % 2 == 0 ? 2.0 : 3.0;
        const auto sol = fk_inner_value(sp, k, 0.1);
        EXPECT_NEAR(fk_dual_objective(sp, k, 0.1, sol.eta_star), sol.value, 1e-8);
        for (int j = 0; j < 50; ++j) {
            auto eta = sol.eta_star;
            for (double& e : eta) e += std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
            EXPECT_LE(fk_dual_objective(sp, k, 0.1, eta), sol.value + 1e-10);
        }
    }
}

TEST(FkDual, TrivialCases) {
    StateProblem flat{{ActionBranch{{1.0, 1.0}, {0.5, 0.5}}}, {1.0}};
    EXPECT_DOUBLE_EQ(fk_inner_value(flat, 2.0, 0.3).value, 1.0);
    StateProblem points{{ActionBranch{{1.0}, {1.0}}, ActionBranch{{3.0}, {1.0}}}, {0.5, 0.5}};
    EXPECT_NEAR(fk_inner_value(points, 2.0, 0.3).value, 2.0, 1e-15);
}

TEST(FkDual, LimitsInRho) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        StateProblem sp{{testkit::random_branch(rng, 4, 10.0), testkit::random_branch(rng, 3, 10.0)},
                        testkit::random_simplex(rng, 2)};
        EXPECT_NEAR(fk_inner_value(sp, 2.0, 1e-8).value, sp.nominal_value(), 1e-3);
    }
}

TEST(DivergenceCost, KlSingleActionInverse) {
    // With one action the worst case at radius rho is the level t where c(t) = rho.
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b = testkit::random_branch(rng, 4);
        const double rho = 0.02 + 0.05 * trial;
        const double t = kl_inner_value({{b}, {1.0}}, rho).value;
        if (t > b.min_value() + 1e-9) {
            EXPECT_NEAR(divergence_cost(b, UncertaintyModel::kl(rho), t).cost, rho, 1e-7);
        }
    }
}

TEST(DivergenceCost, FkSingleActionInverse) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const auto b = testkit::random_branch(rng, 4);
        const double rho = 0.02 + 0.05 * trial;
        const auto u = UncertaintyModel::fk(2.0, rho);
        const double t = fk_inner_value({{b}, {1.0}}, 2.0, rho).value;
        if (t > b.min_value() + 1e-9) {
            EXPECT_NEAR(divergence_cost(b, u, t).cost, rho, 1e-7);
        }
    }
}

TEST(DivergenceCost, Endpoints) {
    const ActionBranch b{{0.0, 1.0, 2.0}, {0.25, 0.25, 0.5}};
    const auto kl = UncertaintyModel::kl(0.1);
    EXPECT_EQ(divergence_cost(b, kl, b.mean()).cost, 0.0);
    EXPECT_NEAR(divergence_cost(b, kl, 0.0).cost, std::log(4.0), 1e-15);
    EXPECT_TRUE(std::isinf(divergence_cost(b, kl, -0.1).cost));
    // Chi-square to the point mass on the minimum: q f(1/q) + (1 - q) f(0) with q = 1/4.
    const auto chi2 = UncertaintyModel::fk(2.0, 0.1);
    EXPECT_NEAR(divergence_cost(b, chi2, 0.0).cost, 0.25 * 0.5 * 9.0 + 0.75 * 0.5, 1e-15);
}
