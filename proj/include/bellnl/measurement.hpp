#pragma once

// Quantum measurement statistics on bipartite states: correlators, joint and
// marginal outcome probabilities, conditioned states, sign-binned tables and
// the uncertainty margin.

#include "bellnl/errors.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"

#include <cmath>
#include <string>

namespace bellnl {

enum class Side { a, b };

inline const char* to_string(Side s) { return s == Side::a ? "A" : "B"; }

/// Subsystem label, measured spin direction and how the zero outcome is binned.
struct MeasurementSetting {
    Side side = Side::a;
    UnitVector direction;
    ZeroPolicy zero_policy = ZeroPolicy::plus;
};

namespace detail {

inline void check_dims(const BipartiteState& st, Eigen::Index da, Eigen::Index db) {
    if (da != st.d_a() || db != st.d_b())
        throw ValidationError("observable dimensions do not match the state (" + std::to_string(da) + "x" +
                              std::to_string(db) + " vs " + std::to_string(st.d_a()) + "x" + std::to_string(st.d_b()) + ")");
}

inline Eigen::Index side_dim(const BipartiteState& st, Side side) { return side == Side::a ? st.d_a() : st.d_b(); }

} // namespace detail

/// <A (x) B> = Tr((A (x) B) rho).
///
/// Pure states use Tr(A Psi B^T Psi^dagger) at O(d^3); mixed states contract
/// the density matrix blockwise without forming the Kronecker product.
inline double correlator(const BipartiteState& st, const CMatrix& a, const CMatrix& b) {
    detail::check_dims(st, a.rows(), b.rows());
    if (st.is_pure()) {
        const CMatrix& psi = st.coefficients();
        const CMatrix apb = a * psi * b.transpose();
        return (psi.adjoint() * apb).trace().real();
    }
    const CMatrix& rho = st.rho();
    const Eigen::Index da = st.d_a(), db = st.d_b();
    // T(k, i) = Tr(B rho_{k,i}); result = Tr(A T).
    CMatrix t(da, da);
    for (Eigen::Index k = 0; k < da; ++k)
        for (Eigen::Index i = 0; i < da; ++i) t(k, i) = (b * rho.block(k * db, i * db, db, db)).trace();
    return (a * t).trace().real();
}

inline double correlator(const BipartiteState& st, const HermitianObservable& a, const HermitianObservable& b) {
    return correlator(st, a.matrix(), b.matrix());
}

/// Complex <X (x) Y> for arbitrary (not necessarily Hermitian) local operators.
inline cplx correlator_complex(const BipartiteState& st, const CMatrix& x, const CMatrix& y) {
    detail::check_dims(st, x.rows(), y.rows());
    if (st.is_pure()) {
        const CMatrix& psi = st.coefficients();
        return (psi.adjoint() * x * psi * y.transpose()).trace();
    }
    const CMatrix& rho = st.rho();
    const Eigen::Index da = st.d_a(), db = st.d_b();
    CMatrix t(da, da);
    for (Eigen::Index k = 0; k < da; ++k)
        for (Eigen::Index i = 0; i < da; ++i) t(k, i) = (y * rho.block(k * db, i * db, db, db)).trace();
    return (x * t).trace();
}

/// <op> on one subsystem.
inline cplx local_expectation(const BipartiteState& st, Side side, const CMatrix& op) {
    if (op.rows() != detail::side_dim(st, side)) throw ValidationError("local_expectation: dimension mismatch");
    const CMatrix red = side == Side::a ? st.reduced_a() : st.reduced_b();
    return (op * red).trace();
}

/// Full joint outcome table P(alpha_i, beta_j), rows / columns ordered as the
/// observables' ascending spectra.
inline RMatrix joint_distribution(const BipartiteState& st, const HermitianObservable& a, const HermitianObservable& b) {
    detail::check_dims(st, a.dim(), b.dim());
    const auto& ga = a.groups();
    const auto& gb = b.groups();
    RMatrix table = RMatrix::Zero(static_cast<Eigen::Index>(ga.size()), static_cast<Eigen::Index>(gb.size()));
    if (st.is_pure()) {
        const CMatrix& psi = st.coefficients();
        for (std::size_t i = 0; i < ga.size(); ++i) {
            const CMatrix left = ga[i].basis.adjoint() * psi;
            for (std::size_t j = 0; j < gb.size(); ++j)
                table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    (left * gb[j].basis.conjugate()).squaredNorm();
        }
        return table;
    }
    // Rotate B into its eigenbasis blockwise, then read diagonal blocks for A.
    const Eigen::Index da = st.d_a(), db = st.d_b();
    CMatrix wb(db, db);
    std::vector<Eigen::Index> b_group_of(static_cast<std::size_t>(db));
    {
        Eigen::Index c = 0;
        for (std::size_t j = 0; j < gb.size(); ++j)
            for (Eigen::Index k = 0; k < gb[j].basis.cols(); ++k, ++c) {
                wb.col(c) = gb[j].basis.col(k);
                b_group_of[static_cast<std::size_t>(c)] = static_cast<Eigen::Index>(j);
            }
    }
    const CMatrix& rho = st.rho();
    std::vector<CMatrix> per_b(static_cast<std::size_t>(db), CMatrix::Zero(da, da));
    for (Eigen::Index k = 0; k < da; ++k)
        for (Eigen::Index i = 0; i < da; ++i) {
            const CMatrix rot = wb.adjoint() * rho.block(k * db, i * db, db, db) * wb;
            for (Eigen::Index c = 0; c < db; ++c) per_b[static_cast<std::size_t>(c)](k, i) = rot(c, c);
        }
    for (Eigen::Index c = 0; c < db; ++c) {
        const Eigen::Index j = b_group_of[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < ga.size(); ++i) {
            const auto& v = ga[i].basis;
            table(static_cast<Eigen::Index>(i), j) += (v.adjoint() * per_b[static_cast<std::size_t>(c)] * v).trace().real();
        }
    }
    return table;
}

/// P(alpha, beta) = Tr((Pi_alpha (x) Pi_beta) rho).
inline double joint_probability(const BipartiteState& st, const HermitianObservable& a, const HermitianObservable& b,
                                double alpha, double beta) {
    detail::check_dims(st, a.dim(), b.dim());
    const auto ia = a.find_outcome(alpha);
    const auto ib = b.find_outcome(beta);
    if (!ia) throw ValidationError("joint_probability: alpha is not in the spectrum of the A observable");
    if (!ib) throw ValidationError("joint_probability: beta is not in the spectrum of the B observable");
    const auto& va = a.groups()[*ia].basis;
    const auto& vb = b.groups()[*ib].basis;
    if (st.is_pure()) return (va.adjoint() * st.coefficients() * vb.conjugate()).squaredNorm();
    return correlator(st, va * va.adjoint(), vb * vb.adjoint());
}

/// P(alpha | Omega) on one subsystem.
inline double marginal_probability(const BipartiteState& st, Side side, const HermitianObservable& obs, double alpha) {
    if (obs.dim() != detail::side_dim(st, side)) throw ValidationError("marginal_probability: dimension mismatch");
    const auto idx = obs.find_outcome(alpha);
    if (!idx) throw ValidationError("marginal_probability: outcome is not in the spectrum");
    const auto& v = obs.groups()[*idx].basis;
    if (st.is_pure()) {
        const CMatrix& psi = st.coefficients();
        return side == Side::a ? (v.adjoint() * psi).squaredNorm() : (psi * v.conjugate()).squaredNorm();
    }
    return local_expectation(st, side, v * v.adjoint()).real();
}

inline constexpr double kMinConditioningProbability = 1e-14;

/// (Pi_alpha (x) 1) rho (Pi_alpha (x) 1) / P(alpha).
inline BipartiteState conditioned_state(const BipartiteState& st, const HermitianObservable& obs_a, double alpha) {
    if (obs_a.dim() != st.d_a()) throw ValidationError("conditioned_state: dimension mismatch");
    const auto idx = obs_a.find_outcome(alpha);
    if (!idx) throw ValidationError("conditioned_state: outcome is not in the spectrum");
    const double p = marginal_probability(st, Side::a, obs_a, alpha);
    if (!(p > kMinConditioningProbability))
        throw DegenerateConditionError("conditioned_state: outcome has zero probability");
    const CMatrix proj = obs_a.projector(*idx);
    StateMeta meta = st.meta();
    meta.family += "|conditioned";
    meta.params.emplace_back("alpha", alpha);
    if (st.is_pure()) {
        CMatrix psi = proj * st.coefficients();
        psi /= std::sqrt(p);
        // renormalize away rounding before the strict constructor check
        psi /= psi.norm();
        return BipartiteState::pure(st.s_a(), st.s_b(), std::move(psi), std::move(meta));
    }
    const Eigen::Index da = st.d_a(), db = st.d_b();
    const CMatrix left = linalg::apply_left_a(proj, st.rho(), da, db);
    CMatrix out = linalg::apply_left_a(proj, left.adjoint(), da, db).adjoint();
    out /= out.trace().real();
    return BipartiteState::mixed(st.s_a(), st.s_b(), std::move(out), std::move(meta));
}

/// Sign-binned joint table.
struct BinnedTable {
    double pp = 0.0;
    double pm = 0.0;
    double mp = 0.0;
    double mm = 0.0;

    [[nodiscard]] double sum() const { return pp + pm + mp + mm; }
    [[nodiscard]] double plus_a() const { return pp + pm; }
    [[nodiscard]] double plus_b() const { return pp + mp; }
};

inline BinnedTable binned_joint_probability(const BipartiteState& st, const HermitianObservable& a,
                                            const HermitianObservable& b, ZeroPolicy zero_a = ZeroPolicy::plus,
                                            ZeroPolicy zero_b = ZeroPolicy::plus) {
    detail::check_dims(st, a.dim(), b.dim());
    const auto ba = sign_bases(a, zero_a);
    const auto bb = sign_bases(b, zero_b);
    auto prob = [&](const CMatrix& va, const CMatrix& vb) -> double {
        if (va.cols() == 0 || vb.cols() == 0) return 0.0;
        if (st.is_pure()) return (va.adjoint() * st.coefficients() * vb.conjugate()).squaredNorm();
        return correlator(st, va * va.adjoint(), vb * vb.adjoint());
    };
    BinnedTable t;
    t.pp = prob(ba.plus, bb.plus);
    t.pm = prob(ba.plus, bb.minus);
    t.mp = prob(ba.minus, bb.plus);
    t.mm = prob(ba.minus, bb.minus);
    return t;
}

inline BinnedTable binned_joint_probability(const BipartiteState& st, const MeasurementSetting& sa,
                                            const MeasurementSetting& sb) {
    if (sa.side != Side::a || sb.side != Side::b)
        throw ValidationError("binned_joint_probability: settings must reference subsystems A and B in that order");
    const auto rep_a = build_spin_rep(st.s_a());
    const auto rep_b = build_spin_rep(st.s_b());
    return binned_joint_probability(st, spin_component(rep_a, sa.direction), spin_component(rep_b, sb.direction),
                                    sa.zero_policy, sb.zero_policy);
}

/// Probability of the '+' bin for one subsystem.
inline double binned_marginal_plus(const BipartiteState& st, Side side, const HermitianObservable& obs,
                                   ZeroPolicy zero = ZeroPolicy::plus) {
    if (obs.dim() != detail::side_dim(st, side)) throw ValidationError("binned_marginal_plus: dimension mismatch");
    const auto bases = sign_bases(obs, zero);
    const CMatrix& v = bases.plus;
    if (v.cols() == 0) return 0.0;
    if (st.is_pure()) {
        const CMatrix& psi = st.coefficients();
        return side == Side::a ? (v.adjoint() * psi).squaredNorm() : (psi * v.conjugate()).squaredNorm();
    }
    return local_expectation(st, side, v * v.adjoint()).real();
}

/// Delta Omega_1 * Delta Omega_2 - |<M>| / 2 with M = -i [Omega_1, Omega_2], both on `side`.
inline double uncertainty_margin(const BipartiteState& st, Side side, const CMatrix& o1, const CMatrix& o2) {
    const Eigen::Index d = detail::side_dim(st, side);
    if (o1.rows() != d || o2.rows() != d) throw ValidationError("uncertainty_margin: dimension mismatch");
    const CMatrix red = side == Side::a ? st.reduced_a() : st.reduced_b();
    auto ex = [&](const CMatrix& op) { return (op * red).trace().real(); };
    const double m1 = ex(o1), m2 = ex(o2);
    const double var1 = std::max(0.0, ex(o1 * o1) - m1 * m1);
    const double var2 = std::max(0.0, ex(o2 * o2) - m2 * m2);
    const CMatrix m = -kI * linalg::commutator(o1, o2);
    return std::sqrt(var1 * var2) - 0.5 * std::abs(ex(m));
}

} // namespace bellnl
