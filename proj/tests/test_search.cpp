#include "oracles.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace bellnl;

namespace {

SearchConfig config(std::uint64_t seed, int restarts, unsigned threads = 0) {
    SearchConfig c;
    c.seed = seed;
    c.restarts = restarts;
    c.threads = threads;
    return c;
}

TEST(SearchConfig, Validation) {
    SearchConfig c;
    EXPECT_NO_THROW(c.validate());
    c.restarts = 0;
    EXPECT_THROW(c.validate(), ValidationError);
    c = SearchConfig{};
    c.tolerance = 0.0;
    EXPECT_THROW(c.validate(), ValidationError);
}

TEST(PatternSearch, Quadratic) {
    auto f = [](const std::vector<double>& x) { return (x[0] - 0.3) * (x[0] - 0.3) + 2.0 * (x[1] + 1.7) * (x[1] + 1.7); };
    const auto r = pattern_search(f, {0.0, 0.0}, 5000, 1e-10);
    EXPECT_NEAR(r.x[0], 0.3, 1e-8);
    EXPECT_NEAR(r.x[1], -1.7, 1e-8);
    EXPECT_LE(r.evals, 5000);
}

TEST(PatternSearch, EvaluationBudget) {
    int calls = 0;
    auto f = [&](const std::vector<double>& x) {
        ++calls;
        return std::sin(x[0]) + x[1] * x[1];
    };
    const auto r = pattern_search(f, {1.0, 1.0}, 17, 1e-12);
    EXPECT_EQ(r.evals, 17);
    EXPECT_EQ(calls, 17);
}

TEST(Multistart, RestartStreamsAreIndependentOfCount) {
    auto a = restart_stream(99, 5);
    auto b = restart_stream(99, 5);
    auto c = restart_stream(99, 6);
    const auto va = a(), vb = b(), vc = c();
    EXPECT_EQ(va, vb);
    EXPECT_NE(va, vc);
}

TEST(Multistart, DeterministicAcrossThreadCounts) {
    const auto st = maximally_entangled(2);
    const auto ref = optimize_chsh(st, config(7, 12, 1));
    for (unsigned th : {2u, 5u, 12u}) {
        const auto r = optimize_chsh(st, config(7, 12, th));
        EXPECT_EQ(r.value, ref.value);
        ASSERT_EQ(r.settings.size(), ref.settings.size());
        for (std::size_t k = 0; k < r.settings.size(); ++k) EXPECT_EQ(r.settings[k].x(), ref.settings[k].x());
    }
}

TEST(Multistart, BestIsMonotoneInRestartCount) {
    const auto st = werner(1, -0.8);
    double prev = -1e300;
    for (int k = 1; k <= 10; ++k) {
        const auto r = optimize_chsh(st, config(11, k));
        EXPECT_GE(r.violation_amount(), prev - 1e-15) << k;
        prev = r.violation_amount();
    }
}

TEST(Directions, UnitAndRoundTrip) {
    std::mt19937_64 rng(71);
    for (bool coplanar : {false, true}) {
        const auto x = random_direction_angles(rng, 5, coplanar);
        const auto d = directions_from_angles(x, 5, coplanar);
        ASSERT_EQ(d.size(), 5u);
        for (const auto& u : d) {
            EXPECT_NEAR(u.x() * u.x() + u.y() * u.y() + u.z() * u.z(), 1.0, 1e-14);
            if (coplanar) {
                EXPECT_NEAR(u.y(), 0.0, 1e-15);
            }
        }
    }
}

TEST(Directions, Hyperspherical) {
    std::mt19937_64 rng(72);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    for (int n = 0; n < 8; ++n) {
        std::vector<double> a(static_cast<std::size_t>(n));
        for (auto& v : a) v = u(rng);
        double norm = 0.0;
        for (double v : hyperspherical(a)) norm += v * v;
        EXPECT_NEAR(norm, 1.0, 1e-14);
    }
}

TEST(OptimizeChsh, SingletReachesOperatorNorm) {
    const auto r = optimize_chsh(angular_momentum_eigenstate(1, 1, 0, 0), config(1, 16));
    EXPECT_NEAR(std::abs(r.value), std::sqrt(2.0) / 2.0, 1e-6);
    EXPECT_TRUE(r.violated);
    ASSERT_TRUE(r.seed.has_value());
    EXPECT_EQ(*r.seed, 1u);
    EXPECT_EQ(r.parameters.size(), 8u);
}

TEST(OptimizeChsh, CoplanarGridCrossCheck) {
    // |Phi+> in the x-z plane: <A B> = cos(a - b) / 4. Grid max over b1, b2, a2 at 1 degree, a1 = 0.
    double grid_best = 0.0;
    const double deg = std::numbers::pi / 180.0;
    for (int a2 = 0; a2 < 360; ++a2)
        for (int b1 = 0; b1 < 360; ++b1)
            for (int b2 = 0; b2 < 360; b2 += 1) {
                const double s = std::cos(-b1 * deg) + std::cos(-b2 * deg) + std::cos((a2 - b1) * deg) -
                                 std::cos((a2 - b2) * deg);
                grid_best = std::max(grid_best, std::abs(s) / 4.0);
            }
    auto cfg = config(3, 16);
    cfg.coplanar = true;
    const auto r = optimize_chsh(maximally_entangled(1), cfg);
    EXPECT_GE(std::abs(r.value), grid_best - 1e-9);
    EXPECT_LE(std::abs(r.value), std::sqrt(2.0) / 2.0 + 1e-12);
    for (const auto& u : r.settings) EXPECT_NEAR(u.y(), 0.0, 1e-15);
}

TEST(OptimizeChsh, LargerSpinsDoNotViolate) {
    for (int n = 2; n <= 3; ++n) {
        const auto r = optimize_chsh(maximally_entangled(n), config(5, 8));
        EXPECT_LE(r.margin, 1e-9) << n;
    }
}

TEST(OptimizeMermin, FindsViolationInsideWindow) {
    const auto r = optimize_mermin(angular_momentum_eigenstate(2, 2, 0, 0), config(2, 8));
    EXPECT_TRUE(r.violated);
    EXPECT_EQ(r.sense, BoundSense::lower);
}

TEST(OptimizeReid, SpinOneMaximallyEntangled) {
    const auto r = optimize_reid(maximally_entangled(2), config(4, 16));
    EXPECT_GT(r.value, 1.0);
    EXPECT_EQ(r.parameters.size(), 4u);
}

TEST(OptimizeTura, DickeStatesStayNonNegative) {
    for (int n = 2; n <= 8; n += 2) {
        const auto r = optimize_tura(dicke(n, n / 2), config(6, 8));
        EXPECT_GE(r.value, -1e-9) << n;
    }
}

TEST(OptimizeWeightsCfrd, SpinHalfCannotGoNegative) {
    const auto r = optimize_weights_cfrd(SpinQuantum::from_two_s(1), config(8, 8));
    EXPECT_GE(r.margin, -1e-9);
    EXPECT_EQ(r.parameters.size(), 2u);
    EXPECT_THROW(optimize_weights_cfrd(SpinQuantum::from_two_s(21), config(8, 1)), ValidationError);
}

TEST(OptimizeSettings, Dispatch) {
    EXPECT_NO_THROW(optimize_settings(maximally_entangled(1), "chsh", config(1, 2)));
    EXPECT_THROW(optimize_settings(maximally_entangled(1), "tura", config(1, 2)), ValidationError);
}

// ------------------------------------------------------------------ scans

TEST(Scan, RowCountAndMonotoneGrid) {
    ScanSpec spec{"sin_theta", linear_grid(0.01, 0.99, 50), [](double x) {
                      const auto m = mermin_coplanar(x);
                      return mermin_check(angular_momentum_eigenstate(2, 2, 0, 0), m.a, m.b, m.c);
                  }};
    const auto t = scan_parameter(spec);
    EXPECT_EQ(t.rows.size(), 50u);
    EXPECT_DOUBLE_EQ(t.rows.front().parameter, 0.01);
    EXPECT_DOUBLE_EQ(t.rows.back().parameter, 0.99);
    spec.grid = {0.1, 0.3, 0.2};
    EXPECT_THROW(scan_parameter(spec), ValidationError);
    spec.grid.clear();
    EXPECT_THROW(scan_parameter(spec), ValidationError);
}

TEST(Scan, MerminBoundaryWithinOneStep) {
    for (int two_s : {2, 3, 4}) {
        const double step = 1e-3;
        ScanSpec spec{"sin_theta", linear_grid(step, 1.0, 1000), [two_s](double x) {
                          const auto m = mermin_coplanar(x);
                          return mermin_check(angular_momentum_eigenstate2(two_s, two_s, 0, 0), m.a, m.b, m.c);
                      }};
        const auto tr = violation_transitions(scan_parameter(spec));
        ASSERT_EQ(tr.size(), 1u) << two_s;
        const double edge = 1.0 / two_s;
        EXPECT_LE(tr[0].first, edge + 1e-12);
        EXPECT_GE(tr[0].second, edge - 1e-12);
        EXPECT_LE(tr[0].second - tr[0].first, step + 1e-12);
    }
}

TEST(Scan, WernerThresholdByBisection) {
    // Optimal CHSH for the two-qubit Werner family is linear in phi, crossing 1/2 at
    // phi = (1 - 3 / sqrt 2) / 2 with phi = Tr(rho V).
    auto eval = [](double phi) { return optimize_chsh(werner(1, phi), config(9, 6)); };
    const auto b = refine_boundary(eval, -1.0, 0.0, 1e-6);
    const double expected = 0.5 * (1.0 - 3.0 / std::sqrt(2.0));
    EXPECT_NEAR(0.5 * (b.lo + b.hi), expected, 1e-5);
    EXPECT_TRUE(eval(b.lo).violated);
    EXPECT_FALSE(eval(b.hi).violated);
}

} // namespace
