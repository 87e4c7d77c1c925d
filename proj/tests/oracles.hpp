#pragma once

// Independent reference computations for the test suites. Each one takes a
// different route from the library code it checks (explicit tensor products,
// recursions, exhaustive enumeration).

#include "bellnl/bellnl.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>
#include <vector>

namespace oracle {

using namespace bellnl;

inline CMatrix random_psi(std::mt19937_64& rng, Eigen::Index da, Eigen::Index db) {
    std::normal_distribution<double> n;
    CMatrix psi(da, db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j) psi(i, j) = cplx{n(rng), n(rng)};
    return psi / psi.norm();
}

inline CMatrix random_density(std::mt19937_64& rng, Eigen::Index d, int rank) {
    CMatrix g = random_psi(rng, d, rank);
    CMatrix rho = g * g.adjoint();
    return rho / rho.trace().real();
}

inline UnitVector random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    for (;;) {
        const double x = n(rng), y = n(rng), z = n(rng);
        if (x * x + y * y + z * z > 1e-6) return UnitVector::normalized(x, y, z);
    }
}

inline BipartiteState random_pure(std::mt19937_64& rng, SpinQuantum sa, SpinQuantum sb) {
    return pure_state(sa, sb, random_psi(rng, sa.dim(), sb.dim()), "random");
}

inline BipartiteState random_mixed(std::mt19937_64& rng, SpinQuantum sa, SpinQuantum sb, int rank = 3) {
    return BipartiteState::mixed(sa, sb, random_density(rng, sa.dim() * sb.dim(), rank), StateMeta{"random", {}, sa.two_s, sb.two_s});
}

inline BipartiteState random_separable(std::mt19937_64& rng, SpinQuantum sa, SpinQuantum sb, int components) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    std::vector<double> w(static_cast<std::size_t>(components));
    double total = 0.0;
    for (auto& x : w) total += (x = u(rng));
    std::vector<SeparableComponent> parts;
    for (int k = 0; k < components; ++k)
        parts.push_back(SeparableComponent{w[static_cast<std::size_t>(k)] / total, random_density(rng, sa.dim(), 2),
                                           random_density(rng, sb.dim(), 2)});
    // Renormalize the rounding of the weights.
    double s = 0.0;
    for (const auto& p : parts) s += p.weight;
    parts.back().weight += 1.0 - s;
    return separable_mixture(parts);
}

/// Tr((A (x) B) rho) with the full Kronecker product.
inline double full_correlator(const BipartiteState& st, const CMatrix& a, const CMatrix& b) {
    return (linalg::kron(a, b) * st.density_matrix()).trace().real();
}

/// Largest |eigenvalue| of the CHSH operator for the given directions.
inline double chsh_operator_norm(SpinQuantum sa, SpinQuantum sb, const UnitVector& u1, const UnitVector& u2,
                                 const UnitVector& v1, const UnitVector& v2) {
    const auto ra = build_spin_rep(sa), rb = build_spin_rep(sb);
    const CMatrix a1 = spin_matrix(ra, u1), a2 = spin_matrix(ra, u2);
    const CMatrix b1 = spin_matrix(rb, v1), b2 = spin_matrix(rb, v2);
    const CMatrix op = linalg::kron(a1, b1) + linalg::kron(a1, b2) + linalg::kron(a2, b1) - linalg::kron(a2, b2);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(op);
    return std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(es.eigenvalues().size() - 1)));
}

/// Clebsch-Gordan coefficients from the highest-weight vector (kernel of J_+
/// in the M = J sector, phase fixed by <j1 j1; j2 J-j1|J J> > 0) followed by
/// repeated application of J_-.
inline std::vector<double> coupled_vector(int two_j1, int two_j2, int two_J, int two_M) {
    const auto r1 = build_spin_rep(SpinQuantum::from_two_s(two_j1));
    const auto r2 = build_spin_rep(SpinQuantum::from_two_s(two_j2));
    const Eigen::Index d1 = two_j1 + 1, d2 = two_j2 + 1;
    const CMatrix i1 = CMatrix::Identity(d1, d1), i2 = CMatrix::Identity(d2, d2);
    const CMatrix jp = linalg::kron(r1.sx + kI * r1.sy, i2) + linalg::kron(i1, r2.sx + kI * r2.sy);
    const CMatrix jm = jp.adjoint();
    auto two_m_of = [&](Eigen::Index k) {
        const Eigen::Index a = k / d2, b = k % d2;
        return static_cast<int>((two_j1 - 2 * a) + (two_j2 - 2 * b));
    };
    std::vector<Eigen::Index> sector;
    for (Eigen::Index k = 0; k < d1 * d2; ++k)
        if (two_m_of(k) == two_J) sector.push_back(k);
    CMatrix restricted(d1 * d2, static_cast<Eigen::Index>(sector.size()));
    for (std::size_t c = 0; c < sector.size(); ++c) restricted.col(static_cast<Eigen::Index>(c)) = jp.col(sector[c]);
    Eigen::JacobiSVD<CMatrix> svd(restricted, Eigen::ComputeFullV);
    const CVector null = svd.matrixV().col(svd.matrixV().cols() - 1);
    CVector v = CVector::Zero(d1 * d2);
    for (std::size_t c = 0; c < sector.size(); ++c) v(sector[c]) = null(static_cast<Eigen::Index>(c));
    // Phase: component with m1 = j1 (index a = 0) real positive.
    const Eigen::Index b0 = (two_j2 - (two_J - two_j1)) / 2;
    const cplx ref = v(b0);
    v *= std::abs(ref) / ref;
    v /= v.norm();
    for (int two_m = two_J; two_m > two_M; two_m -= 2) {
        v = jm * v;
        v /= v.norm();
    }
    std::vector<double> out(static_cast<std::size_t>(d1 * d2));
    for (Eigen::Index k = 0; k < d1 * d2; ++k) out[static_cast<std::size_t>(k)] = v(k).real();
    return out;
}

/// <F> for F = (X - X^dagger)/2i, X = (x)_k (sigma_x + i sigma_y), built as a
/// dense 2^n x 2^n operator.
inline double mabk_brute_force(const MultiQubitState& st) {
    CMatrix sp(2, 2);
    sp << 0.0, 1.0, 1.0, 0.0;
    CMatrix sy(2, 2);
    sy << 0.0, -kI, kI, 0.0;
    const CMatrix plus = sp + kI * sy;
    CMatrix x = plus;
    for (int k = 1; k < st.n; ++k) x = linalg::kron(x, plus);
    const CMatrix f = (x - x.adjoint()) / (2.0 * kI);
    return st.amplitudes.dot(f * st.amplitudes).real();
}

/// Symmetric collective state expanded into the 2^N product basis (bit = 1 means down).
inline CVector expand_symmetric(const SymmetricState& st) {
    const int n = st.n_atoms;
    CVector v = CVector::Zero(Eigen::Index{1} << n);
    for (Eigen::Index code = 0; code < v.size(); ++code) {
        const int downs = __builtin_popcountll(static_cast<unsigned long long>(code));
        const int ups = n - downs;
        const double binom = std::exp(std::lgamma(n + 1.0) - std::lgamma(ups + 1.0) - std::lgamma(downs + 1.0));
        v(code) = st.amplitudes(n - ups) / std::sqrt(binom);
    }
    return v;
}

/// sigma . u on qubit k of an n-qubit vector.
inline CVector apply_sigma(const CVector& psi, int n, int k, const UnitVector& u) {
    const Eigen::Index bit = Eigen::Index{1} << (n - 1 - k);
    CVector out(psi.size());
    const cplx off_up = cplx{u.x(), -u.y()};  // <up| sigma.u |down>
    const cplx off_dn = cplx{u.x(), u.y()};   // <down| sigma.u |up>
    for (Eigen::Index c = 0; c < psi.size(); ++c) {
        if (c & bit) out(c) = off_dn * psi(c ^ bit) - u.z() * psi(c);
        else out(c) = u.z() * psi(c) + off_up * psi(c ^ bit);
    }
    return out;
}

struct TuraDirect {
    double s0, s00, s11, s01;
};

/// Sums over atoms of single-site outcomes +-1, in the full product space.
inline TuraDirect tura_direct(const SymmetricState& st, const UnitVector& n0, const UnitVector& n1) {
    const int n = st.n_atoms;
    const CVector psi = expand_symmetric(st);
    std::vector<CVector> a0, a1;
    for (int k = 0; k < n; ++k) {
        a0.push_back(apply_sigma(psi, n, k, n0));
        a1.push_back(apply_sigma(psi, n, k, n1));
    }
    TuraDirect t{0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        t.s0 += psi.dot(a0[static_cast<std::size_t>(i)]).real();
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            t.s00 += a0[static_cast<std::size_t>(i)].dot(a0[static_cast<std::size_t>(j)]).real();
            t.s11 += a1[static_cast<std::size_t>(i)].dot(a1[static_cast<std::size_t>(j)]).real();
            t.s01 += a0[static_cast<std::size_t>(i)].dot(a1[static_cast<std::size_t>(j)]).real();
        }
    }
    return t;
}

/// Exhaustive max/min over (A strategy, B strategy) pairs.
inline double lhv_brute_force(const BellFunctional& f, bool maximize) {
    const auto& sc = f.scenario;
    std::vector<std::size_t> ra, rb;
    std::size_t na = 1, nb = 1;
    for (const auto& o : sc.outcomes_a) na *= o.size(), ra.push_back(o.size());
    for (const auto& o : sc.outcomes_b) nb *= o.size(), rb.push_back(o.size());
    double best = maximize ? -1e300 : 1e300;
    DeterministicStrategy s;
    s.a.resize(ra.size());
    s.b.resize(rb.size());
    for (std::size_t ia = 0; ia < na; ++ia) {
        std::size_t x = ia;
        for (std::size_t k = 0; k < ra.size(); ++k) s.a[k] = x % ra[k], x /= ra[k];
        for (std::size_t ib = 0; ib < nb; ++ib) {
            std::size_t y = ib;
            for (std::size_t k = 0; k < rb.size(); ++k) s.b[k] = y % rb[k], y /= rb[k];
            const double v = strategy_value(f, s);
            best = maximize ? std::max(best, v) : std::min(best, v);
        }
    }
    return best;
}

/// Symmetric W by brute force over the 4^N per-atom strategies.
inline long long tura_brute_force(int n) {
    long long best = 0;
    bool any = false;
    for (long long code = 0; code < (1LL << (2 * n)); ++code) {
        long long p = 0, q = 0, r = 0;
        for (int k = 0; k < n; ++k) {
            const int a0 = ((code >> (2 * k)) & 1) ? 1 : -1;
            const int a1 = ((code >> (2 * k + 1)) & 1) ? 1 : -1;
            p += a0;
            q += a1;
            r += a0 * a1;
        }
        const long long w = 2 * p + p * q - r + n + (p * p + q * q) / 2;
        if (!any || w < best) best = w;
        any = true;
    }
    return best;
}

/// Symmetric W minimum over all compositions of N into the four atom types.
inline long long tura_compositions(int n) {
    long long best = 0;
    bool any = false;
    for (long long pp = 0; pp <= n; ++pp)
        for (long long pm = 0; pp + pm <= n; ++pm)
            for (long long mp = 0; pp + pm + mp <= n; ++mp) {
                const long long mm = n - pp - pm - mp;
                const long long w = tura_lhv_w(TuraCounts{pp, pm, mp, mm});
                if (!any || w < best) best = w;
                any = true;
            }
    return best;
}

} // namespace oracle
