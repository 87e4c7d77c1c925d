#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace bellnl;

namespace {

constexpr double kTight = 1e-12;

TEST(SpinRep, SpinHalfMatrices) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(1));
    EXPECT_NEAR(rep.sz(0, 0).real(), 0.5, kTight);
    EXPECT_NEAR(rep.sz(1, 1).real(), -0.5, kTight);
    EXPECT_NEAR(rep.sx(0, 1).real(), 0.5, kTight);
    EXPECT_NEAR(rep.sx(1, 0).real(), 0.5, kTight);
}

TEST(SpinRep, SpinOneDiagonal) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(2));
    EXPECT_EQ(rep.sz(0, 0).real(), 1.0);
    EXPECT_EQ(rep.sz(1, 1).real(), 0.0);
    EXPECT_EQ(rep.sz(2, 2).real(), -1.0);
}

TEST(SpinRep, InvariantsUpToTwoS64) {
    for (int two_s = 1; two_s <= 64; ++two_s) {
        const auto rep = build_spin_rep(SpinQuantum::from_two_s(two_s));
        const double s = 0.5 * two_s;
        const Eigen::Index d = two_s + 1;
        const CMatrix id = CMatrix::Identity(d, d);
        EXPECT_TRUE(linalg::is_hermitian(rep.sx, kTight));
        EXPECT_TRUE(linalg::is_hermitian(rep.sy, kTight));
        EXPECT_TRUE(linalg::is_hermitian(rep.sz, kTight));
        EXPECT_LT(linalg::max_abs(linalg::commutator(rep.sx, rep.sy) - kI * rep.sz), kTight) << two_s;
        EXPECT_LT(linalg::max_abs(linalg::commutator(rep.sy, rep.sz) - kI * rep.sx), kTight) << two_s;
        EXPECT_LT(linalg::max_abs(linalg::commutator(rep.sz, rep.sx) - kI * rep.sy), kTight) << two_s;
        EXPECT_LT(linalg::max_abs(rep.sx * rep.sx + rep.sy * rep.sy + rep.sz * rep.sz - s * (s + 1) * id), kTight);
        for (Eigen::Index i = 0; i < d; ++i) {
            EXPECT_EQ(rep.sz(i, i).real(), s - static_cast<double>(i));
            for (Eigen::Index j = 0; j < d; ++j)
                if (i != j) {
                    EXPECT_EQ(rep.sz(i, j), cplx{});
                }
        }
    }
}

TEST(SpinRep, SevenHalvesCommutator) {
    const auto rep = build_spin_rep(SpinQuantum::from_value(3.5));
    EXPECT_LT(linalg::max_abs(linalg::commutator(rep.sx, rep.sy) - kI * rep.sz), kTight);
}

TEST(SpinRep, Errors) {
    EXPECT_THROW(build_spin_rep(SpinQuantum::from_two_s(0)), ValidationError);
    EXPECT_THROW(build_spin_rep(SpinQuantum::from_two_s(4097)), CapacityError);
    EXPECT_THROW(build_spin_rep(SpinQuantum::from_two_s(10), 5), CapacityError);
    EXPECT_THROW(SpinQuantum::from_value(0.3), ValidationError);
}

TEST(UnitVectorTest, RejectsNonUnit) {
    EXPECT_THROW(UnitVector::make(1.0, 1.0, 0.0), ValidationError);
    EXPECT_NO_THROW(UnitVector::make(0.0, 0.0, 1.0));
    const auto u = UnitVector::from_angles(0.7, 2.1);
    EXPECT_NEAR(u.x() * u.x() + u.y() * u.y() + u.z() * u.z(), 1.0, kTight);
    EXPECT_NEAR(u.polar(), 0.7, 1e-12);
    EXPECT_NEAR(u.azimuth(), 2.1, 1e-12);
}

TEST(SpinComponent, AxisCases) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(3));
    const auto z = spin_component(rep, UnitVector::make(0, 0, 1));
    EXPECT_LT(linalg::max_abs(z.matrix() - rep.sz), kTight);
    const auto x = spin_component(rep, UnitVector::make(1, 0, 0));
    EXPECT_LT(linalg::max_abs(x.matrix() - rep.sx), kTight);
    const auto spec = z.spectrum();
    ASSERT_EQ(spec.size(), 4u);
    EXPECT_EQ(spec.front(), -1.5);
    EXPECT_EQ(spec.back(), 1.5);
}

TEST(SpinComponent, RandomDirectionsSpectrum) {
    std::mt19937_64 rng(11);
    for (int two_s : {1, 2, 3, 4, 6}) {
        const auto rep = build_spin_rep(SpinQuantum::from_two_s(two_s));
        const int trials = two_s == 6 ? 50 : 1000;
        for (int t = 0; t < trials; ++t) {
            const auto obs = spin_component(rep, oracle::random_direction(rng));
            // Independent eigensolve of the raw matrix.
            Eigen::SelfAdjointEigenSolver<CMatrix> es(obs.matrix());
            const auto spec = obs.spectrum();
            ASSERT_EQ(static_cast<int>(spec.size()), two_s + 1);
            for (int k = 0; k <= two_s; ++k) {
                EXPECT_NEAR(spec[static_cast<std::size_t>(k)], -0.5 * two_s + k, 1e-10);
                EXPECT_NEAR(es.eigenvalues()(k), -0.5 * two_s + k, 1e-10);
            }
        }
    }
}

TEST(HermitianObservableTest, ProjectorAlgebra) {
    std::mt19937_64 rng(5);
    // Degenerate spectrum: S_z^2 at s = 1.
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(2));
    for (const CMatrix& m : {CMatrix(rep.sz * rep.sz), spin_matrix(rep, oracle::random_direction(rng))}) {
        const auto obs = HermitianObservable::from_matrix(m);
        const Eigen::Index d = m.rows();
        CMatrix total = CMatrix::Zero(d, d), recon = CMatrix::Zero(d, d);
        for (std::size_t i = 0; i < obs.groups().size(); ++i) {
            const CMatrix p = obs.projector(i);
            EXPECT_LT(linalg::max_abs(p * p - p), 1e-10);
            for (std::size_t j = 0; j < obs.groups().size(); ++j)
                if (i != j) {
                    EXPECT_LT(linalg::max_abs(p * obs.projector(j)), 1e-10);
                }
            total += p;
            recon += obs.groups()[i].value * p;
        }
        EXPECT_LT(linalg::max_abs(total - CMatrix::Identity(d, d)), 1e-10);
        EXPECT_LT(linalg::max_abs(recon - m), 1e-10);
    }
    const auto sq = HermitianObservable::from_matrix(rep.sz * rep.sz);
    EXPECT_EQ(sq.groups().size(), 2u);
}

TEST(HermitianObservableTest, RejectsNonHermitian) {
    CMatrix m(2, 2);
    m << 0.0, 1.0, 0.0, 0.0;
    EXPECT_THROW(HermitianObservable::from_matrix(m), ValidationError);
}

TEST(SignProjectors, SpinHalf) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(1));
    const auto p = sign_projectors(spin_component(rep, UnitVector::make(0, 0, 1)));
    EXPECT_NEAR(p.plus(0, 0).real(), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(p.plus(1, 1)), 0.0, 1e-12);
}

TEST(SignProjectors, ZeroPolicyRanks) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(2));
    const auto obs = spin_component(rep, UnitVector::make(0, 0, 1));
    auto rank = [](const CMatrix& p) { return static_cast<int>(std::lround(p.trace().real())); };
    const auto plus = sign_projectors(obs, ZeroPolicy::plus);
    EXPECT_EQ(rank(plus.plus), 2);
    EXPECT_EQ(rank(plus.minus), 1);
    const auto minus = sign_projectors(obs, ZeroPolicy::minus);
    EXPECT_EQ(rank(minus.plus), 1);
    EXPECT_EQ(rank(minus.minus), 2);
    const auto excl = sign_projectors(obs, ZeroPolicy::exclude);
    EXPECT_EQ(rank(excl.plus), 1);
    EXPECT_EQ(rank(excl.minus), 1);
}

TEST(SignProjectors, CompletenessAndOrthogonality) {
    std::mt19937_64 rng(9);
    for (int two_s = 1; two_s <= 6; ++two_s) {
        const auto rep = build_spin_rep(SpinQuantum::from_two_s(two_s));
        const auto obs = spin_component(rep, oracle::random_direction(rng));
        const Eigen::Index d = two_s + 1;
        for (auto policy : {ZeroPolicy::plus, ZeroPolicy::minus, ZeroPolicy::exclude}) {
            const auto p = sign_projectors(obs, policy);
            EXPECT_LT(linalg::max_abs(p.plus * p.minus), 1e-10);
            if (policy != ZeroPolicy::exclude) {
                EXPECT_LT(linalg::max_abs(p.plus + p.minus - CMatrix::Identity(d, d)), 1e-10);
            }
        }
    }
}

TEST(ZeroPolicyNames, RoundTrip) {
    for (auto p : {ZeroPolicy::plus, ZeroPolicy::minus, ZeroPolicy::exclude})
        EXPECT_EQ(zero_policy_from_string(to_string(p)), p);
    EXPECT_THROW(zero_policy_from_string("sideways"), ValidationError);
}

TEST(ClebschGordan, SelectionRule) {
    EXPECT_EQ(clebsch_gordan(1, 1, 1, 0, 2, 0), 0.0);
    EXPECT_EQ(clebsch_gordan(0.5, 0.5, 0.5, 0.5, 1, 0), 0.0);
}

TEST(ClebschGordan, SingletCoefficient) {
    EXPECT_NEAR(clebsch_gordan(0.5, 0.5, 0.5, -0.5, 0, 0), 1.0 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(clebsch_gordan(0.5, -0.5, 0.5, 0.5, 0, 0), -1.0 / std::sqrt(2.0), 1e-12);
}

TEST(ClebschGordan, UnitarityForOneOneTwo) {
    for (int m = -2; m <= 2; ++m) {
        double sum = 0.0;
        for (int m1 = -1; m1 <= 1; ++m1)
            for (int m2 = -1; m2 <= 1; ++m2) sum += std::pow(clebsch_gordan(1, m1, 1, m2, 2, m), 2);
        EXPECT_NEAR(sum, 1.0, 1e-12) << m;
    }
}

TEST(ClebschGordan, MatchesLadderRecursion) {
    for (int two_j1 = 1; two_j1 <= 8; ++two_j1) {
        for (int two_j2 = 1; two_j2 <= 8; ++two_j2) {
            for (int two_J = std::abs(two_j1 - two_j2); two_J <= two_j1 + two_j2; two_J += 2) {
                for (int two_M = -two_J; two_M <= two_J; two_M += 2) {
                    const auto ref = oracle::coupled_vector(two_j1, two_j2, two_J, two_M);
                    const int d2 = two_j2 + 1;
                    for (int a = 0; a <= two_j1; ++a)
                        for (int b = 0; b <= two_j2; ++b) {
                            const double c = clebsch_gordan2(two_j1, two_j1 - 2 * a, two_j2, two_j2 - 2 * b, two_J, two_M);
                            ASSERT_NEAR(c, ref[static_cast<std::size_t>(a * d2 + b)], 1e-10)
                                << two_j1 << ' ' << two_j2 << ' ' << two_J << ' ' << two_M;
                        }
                }
            }
        }
    }
}

TEST(ClebschGordan, LargeJStaysFinite) {
    double sum = 0.0;
    for (int m1 = -30; m1 <= 30; ++m1) {
        const double c = clebsch_gordan(30, m1, 30, -m1, 0, 0);
        EXPECT_TRUE(std::isfinite(c));
        sum += c * c;
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
}

TEST(ClebschGordan, MalformedInput) {
    EXPECT_THROW(clebsch_gordan(1, 2, 1, 0, 1, 2), ValidationError);
    EXPECT_THROW(clebsch_gordan(1, 0, 1, 0, 3, 0), ValidationError);
    EXPECT_THROW(clebsch_gordan(0.3, 0, 1, 0, 1, 0), ValidationError);
    EXPECT_THROW(clebsch_gordan(1, 0.5, 1, 0, 1, 0.5), ValidationError);
}

} // namespace
