#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace bellnl;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void expect_valid(const BipartiteState& st) {
    const CMatrix rho = st.density_matrix();
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
    EXPECT_TRUE(linalg::is_hermitian(rho, 1e-10));
    EXPECT_GE(linalg::min_eigenvalue(rho), -1e-10);
    EXPECT_EQ(st.meta().n_a, st.s_a().two_s);
    EXPECT_EQ(st.meta().n_b, st.s_b().two_s);
}

TEST(MaximallyEntangled, SpinHalf) {
    const auto st = maximally_entangled(1);
    const CMatrix& psi = st.coefficients();
    EXPECT_NEAR(psi(0, 0).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(psi(1, 1).real(), kInvSqrt2, 1e-15);
    EXPECT_EQ(psi(0, 1), cplx{});
}

TEST(MaximallyEntangled, NormAndReducedState) {
    for (int n = 1; n <= 12; ++n) {
        const auto st = maximally_entangled(n);
        EXPECT_NEAR(st.coefficients().squaredNorm(), 1.0, 1e-12);
        EXPECT_LT(linalg::max_abs(st.reduced_a() - CMatrix::Identity(n + 1, n + 1) / (n + 1.0)), 1e-12);
        EXPECT_EQ(st.meta().n_a, n);
        expect_valid(st);
    }
    EXPECT_THROW(maximally_entangled(0), ValidationError);
    EXPECT_THROW(maximally_entangled(5000), CapacityError);
}

TEST(RelativePhase, SpinHalfAtZero) {
    const auto st = relative_phase(1, 0.0);
    const CMatrix& psi = st.coefficients();
    EXPECT_NEAR(psi(0, 1).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(psi(1, 0).real(), kInvSqrt2, 1e-15);
    EXPECT_EQ(psi(0, 0), cplx{});
}

TEST(RelativePhase, NormAndZeroTotalSz) {
    for (int n = 1; n <= 8; ++n)
        for (double theta : {0.0, 0.4, 1.3, 3.0}) {
            const auto st = relative_phase(n, theta);
            EXPECT_NEAR(st.coefficients().squaredNorm(), 1.0, 1e-12);
            const auto rep = build_spin_rep(st.s_a());
            const double total = local_expectation(st, Side::a, rep.sz).real() + local_expectation(st, Side::b, rep.sz).real();
            EXPECT_NEAR(total, 0.0, 1e-12);
        }
}

TEST(Werner, TraceAndFlipSpectrum) {
    EXPECT_NEAR(werner(2, 0.5).density_matrix().trace().real(), 1.0, 1e-12);
    for (Eigen::Index d = 2; d <= 6; ++d) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(flip_operator(d));
        for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
            EXPECT_NEAR(std::abs(es.eigenvalues()(k)), 1.0, 1e-12);
        EXPECT_NEAR(es.eigenvalues().sum(), static_cast<double>(d), 1e-10); // d(d+1)/2 - d(d-1)/2
    }
}

TEST(Werner, PositiveOnGrid) {
    for (int n = 1; n <= 5; ++n)
        for (int k = 0; k <= 20; ++k) {
            const double phi = -1.0 + 0.1 * k;
            const auto st = werner(n, std::clamp(phi, -1.0, 1.0));
            expect_valid(st);
            // Tr(rho V) = phi.
            EXPECT_NEAR((st.rho() * flip_operator(n + 1)).trace().real(), std::clamp(phi, -1.0, 1.0), 1e-12);
        }
    EXPECT_THROW(werner(2, 1.2), ValidationError);
    EXPECT_THROW(werner(2, -1.01), ValidationError);
}

TEST(AngularMomentum, SingletUpToSign) {
    const auto st = angular_momentum_eigenstate(1, 1, 0, 0);
    const CMatrix& psi = st.coefficients();
    EXPECT_NEAR(std::abs(psi(0, 1)), kInvSqrt2, 1e-14);
    EXPECT_NEAR(std::abs(psi(1, 0)), kInvSqrt2, 1e-14);
    EXPECT_NEAR((psi(0, 1) + psi(1, 0)).real(), 0.0, 1e-14);
    EXPECT_EQ(psi(0, 0), cplx{});
}

TEST(AngularMomentum, TotalSpinEigenstate) {
    for (int na = 1; na <= 4; ++na)
        for (int nb = 1; nb <= 4; ++nb)
            for (int two_J = std::abs(na - nb); two_J <= na + nb; two_J += 2)
                for (int two_K = -two_J; two_K <= two_J; two_K += 2) {
                    const auto st = angular_momentum_eigenstate2(na, nb, two_J, two_K);
                    const auto ra = build_spin_rep(st.s_a()), rb = build_spin_rep(st.s_b());
                    const CMatrix ia = CMatrix::Identity(na + 1, na + 1), ib = CMatrix::Identity(nb + 1, nb + 1);
                    const CMatrix jx = linalg::kron(ra.sx, ib) + linalg::kron(ia, rb.sx);
                    const CMatrix jy = linalg::kron(ra.sy, ib) + linalg::kron(ia, rb.sy);
                    const CMatrix jz = linalg::kron(ra.sz, ib) + linalg::kron(ia, rb.sz);
                    const CVector v = st.state_vector();
                    const double J = 0.5 * two_J;
                    EXPECT_LT(((jx * jx + jy * jy + jz * jz) * v - J * (J + 1) * v).norm(), 1e-9);
                    EXPECT_LT((jz * v - 0.5 * two_K * v).norm(), 1e-9);
                    EXPECT_NEAR(v.squaredNorm(), 1.0, 1e-12);
                }
}

TEST(AngularMomentum, TriangleViolation) {
    EXPECT_THROW(angular_momentum_eigenstate(1, 1, 2, 0), ValidationError);
    EXPECT_THROW(angular_momentum_eigenstate(4, 1, 0.5, 0.5), ValidationError);
    EXPECT_THROW(angular_momentum_eigenstate(2, 2, 1, 2), ValidationError);
}

TEST(RmWeighted, Reductions) {
    const auto s = SpinQuantum::from_two_s(3);
    const auto eq = rm_weighted(s, {2.0, 2.0, 2.0, 2.0});
    EXPECT_LT(linalg::max_abs(eq.coefficients() - maximally_entangled(3).coefficients()), 1e-15);
    const auto prod = rm_weighted(s, {1.0, 0.0, 0.0, 0.0});
    EXPECT_NEAR(prod.coefficients()(0, 0).real(), 1.0, 1e-15);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    const auto rnd = rm_weighted(SpinQuantum::from_two_s(2), {n(rng), n(rng), n(rng)});
    EXPECT_NEAR(rnd.coefficients().squaredNorm(), 1.0, 1e-12);
    EXPECT_THROW(rm_weighted(s, {0.0, 0.0, 0.0, 0.0}), ValidationError);
    EXPECT_THROW(rm_weighted(s, {1.0, 0.0}), ValidationError);
}

TEST(Ghz, Amplitudes) {
    const auto g = ghz(2);
    ASSERT_EQ(g.amplitudes.size(), 4);
    EXPECT_NEAR(g.amplitudes(0).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(g.amplitudes(3).imag(), kInvSqrt2, 1e-15);
    EXPECT_EQ(g.amplitudes(1), cplx{});
    EXPECT_EQ(ghz(4).amplitudes.size(), 16);
    for (int n = 2; n <= 14; ++n) EXPECT_NEAR(ghz(n).amplitudes.squaredNorm(), 1.0, 1e-12);
    EXPECT_THROW(ghz(1), CapacityError);
    EXPECT_THROW(ghz(15), CapacityError);
}

TEST(Dicke, BasisAndJz) {
    const auto down = dicke(6, 0);
    EXPECT_EQ(down.amplitudes(6), cplx(1.0));
    for (int n : {1, 5, 10})
        for (int k = 0; k <= n; ++k) {
            const auto st = dicke(n, k);
            const auto rep = build_spin_rep(SpinQuantum::from_two_s(n));
            EXPECT_NEAR(st.amplitudes.dot(rep.sz * st.amplitudes).real(), k - 0.5 * n, 1e-12);
            EXPECT_NEAR(st.amplitudes.squaredNorm(), 1.0, 1e-15);
        }
    EXPECT_THROW(dicke(4, 5), ValidationError);
    EXPECT_THROW(dicke(4, -1), ValidationError);
}

TEST(Separable, Construction) {
    CMatrix up = CMatrix::Zero(2, 2), dn = CMatrix::Zero(2, 2);
    up(0, 0) = 1.0;
    dn(1, 1) = 1.0;
    const auto single = separable_mixture({{1.0, up, dn}});
    EXPECT_LT(linalg::max_abs(single.rho() - product_basis_state(SpinQuantum::from_two_s(1), 1,
                                                                 SpinQuantum::from_two_s(1), -1).density_matrix()),
              1e-15);
    const auto mix = separable_mixture({{0.3, up, up}, {0.7, dn, dn}});
    Eigen::SelfAdjointEigenSolver<CMatrix> es(mix.rho());
    int rank = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) rank += es.eigenvalues()(k) > 1e-12;
    EXPECT_EQ(rank, 2);
    EXPECT_NEAR(mix.rho().trace().real(), 1.0, 1e-12);
    EXPECT_THROW(separable_mixture({{0.3, up, up}, {0.6, dn, dn}}), ValidationError);
    EXPECT_THROW(separable_mixture({{1.0, CMatrix(2 * up), up}}), ValidationError);
}

TEST(BipartiteStateTest, Invariants) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 20; ++t) {
        const auto sa = SpinQuantum::from_two_s(1 + t % 4), sb = SpinQuantum::from_two_s(1 + t % 3);
        expect_valid(oracle::random_pure(rng, sa, sb));
        expect_valid(oracle::random_mixed(rng, sa, sb));
        expect_valid(oracle::random_separable(rng, sa, sb, 3));
    }
    expect_valid(angular_momentum_eigenstate(3, 2, 1.5, -0.5));
    expect_valid(product_basis_state(SpinQuantum::from_two_s(2), 0, SpinQuantum::from_two_s(3), -3));
}

TEST(BipartiteStateTest, RejectsInvalid) {
    const auto s = SpinQuantum::from_two_s(1);
    EXPECT_THROW(BipartiteState::pure(s, s, CMatrix::Identity(2, 2), {}), ValidationError);
    EXPECT_THROW(BipartiteState::pure(s, s, CMatrix::Identity(3, 3) / std::sqrt(3.0), {}), ValidationError);
    CMatrix bad = CMatrix::Identity(4, 4) / 4.0;
    bad(0, 0) = -0.25;
    bad(1, 1) = 0.75;
    EXPECT_THROW(BipartiteState::mixed(s, s, bad, {}), ValidationError);
    EXPECT_THROW(BipartiteState::mixed(s, s, CMatrix::Identity(4, 4) / 2.0, {}), ValidationError);
}

TEST(BipartiteStateTest, GlobalPhaseConvention) {
    CMatrix psi = CMatrix::Zero(2, 2);
    psi(0, 1) = cplx{0.0, kInvSqrt2};
    psi(1, 0) = cplx{-kInvSqrt2, 0.0};
    const auto st = pure_state(SpinQuantum::from_two_s(1), SpinQuantum::from_two_s(1), psi);
    EXPECT_NEAR(st.coefficients()(0, 1).real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(st.coefficients()(0, 1).imag(), 0.0, 1e-15);
    EXPECT_NEAR(st.coefficients()(1, 0).imag(), kInvSqrt2, 1e-15);
}

} // namespace
