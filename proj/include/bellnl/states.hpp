#pragma once

// Constructors for the bipartite, multi-qubit and symmetric (collective)
// states used throughout the toolkit.

#include "bellnl/errors.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/spin.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace bellnl {

inline constexpr Eigen::Index kMaxPureDim = 4097;
inline constexpr Eigen::Index kMaxMixedDim = 4096;
inline constexpr int kMaxQubits = 14;

struct StateMeta {
    std::string family;
    std::vector<std::pair<std::string, double>> params;
    int n_a = 0; // boson number 2 s_A
    int n_b = 0; // boson number 2 s_B
};

/// Pure states keep a d_A x d_B coefficient matrix (Psi(i, j) multiplies
/// |s_A, m_i>|s_B, m_j>); mixed states keep the full density matrix with row
/// index i * d_B + j.
class BipartiteState {
public:
    enum class Kind { pure, mixed };

    static BipartiteState pure(SpinQuantum s_a, SpinQuantum s_b, CMatrix psi, StateMeta meta) {
        if (s_a.dim() > kMaxPureDim || s_b.dim() > kMaxPureDim)
            throw CapacityError("BipartiteState: pure subsystem dimension exceeds " + std::to_string(kMaxPureDim));
        if (psi.rows() != s_a.dim() || psi.cols() != s_b.dim())
            throw ValidationError("BipartiteState: coefficient matrix shape does not match spins");
        const double norm2 = psi.squaredNorm();
        if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-10)
            throw ValidationError("BipartiteState: pure state is not normalized");
        fix_global_phase(psi);
        BipartiteState st(Kind::pure, s_a, s_b, std::move(meta));
        st.psi_ = std::move(psi);
        return st;
    }

    static BipartiteState mixed(SpinQuantum s_a, SpinQuantum s_b, CMatrix rho, StateMeta meta) {
        const Eigen::Index d = s_a.dim() * s_b.dim();
        if (d > kMaxMixedDim)
            throw CapacityError("BipartiteState: mixed dimension exceeds " + std::to_string(kMaxMixedDim));
        if (rho.rows() != d || rho.cols() != d)
            throw ValidationError("BipartiteState: density matrix shape does not match spins");
        if (!linalg::is_hermitian(rho, 1e-10)) throw ValidationError("BipartiteState: density matrix not Hermitian");
        if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-10)
            throw ValidationError("BipartiteState: density matrix trace is not 1");
        if (linalg::min_eigenvalue(rho) < -1e-10)
            throw ValidationError("BipartiteState: density matrix is not positive semidefinite");
        BipartiteState st(Kind::mixed, s_a, s_b, std::move(meta));
        st.rho_ = 0.5 * (rho + rho.adjoint());
        return st;
    }

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_pure() const { return kind_ == Kind::pure; }
    [[nodiscard]] SpinQuantum s_a() const { return s_a_; }
    [[nodiscard]] SpinQuantum s_b() const { return s_b_; }
    [[nodiscard]] Eigen::Index d_a() const { return s_a_.dim(); }
    [[nodiscard]] Eigen::Index d_b() const { return s_b_.dim(); }
    [[nodiscard]] const StateMeta& meta() const { return meta_; }
    /// Coefficient matrix; empty for mixed states.
    [[nodiscard]] const CMatrix& coefficients() const { return psi_; }
    /// Density matrix; empty for pure states (see density_matrix()).
    [[nodiscard]] const CMatrix& rho() const { return rho_; }

    /// Materializes |psi><psi| for pure states.
    [[nodiscard]] CMatrix density_matrix() const {
        if (!is_pure()) return rho_;
        const CVector vec = state_vector();
        return vec * vec.adjoint();
    }

    /// Row-major flattening of Psi, matching the product-basis index i * d_B + j.
    [[nodiscard]] CVector state_vector() const {
        CVector v(d_a() * d_b());
        for (Eigen::Index i = 0; i < d_a(); ++i)
            for (Eigen::Index j = 0; j < d_b(); ++j) v(i * d_b() + j) = psi_(i, j);
        return v;
    }

    [[nodiscard]] CMatrix reduced_a() const {
        if (is_pure()) return psi_ * psi_.adjoint();
        return linalg::partial_trace_b(rho_, d_a(), d_b());
    }

    [[nodiscard]] CMatrix reduced_b() const {
        if (is_pure()) return (psi_.adjoint() * psi_).transpose();
        return linalg::partial_trace_a(rho_, d_a(), d_b());
    }

    [[nodiscard]] BipartiteState with_meta(StateMeta meta) const {
        BipartiteState copy = *this;
        copy.meta_ = std::move(meta);
        return copy;
    }

private:
    BipartiteState(Kind kind, SpinQuantum s_a, SpinQuantum s_b, StateMeta meta)
        : kind_(kind), s_a_(s_a), s_b_(s_b), meta_(std::move(meta)) {
        meta_.n_a = s_a.two_s;
        meta_.n_b = s_b.two_s;
    }

    // First nonzero amplitude (row-major) made real and positive.
    static void fix_global_phase(CMatrix& psi) {
        for (Eigen::Index i = 0; i < psi.rows(); ++i)
            for (Eigen::Index j = 0; j < psi.cols(); ++j)
                if (std::abs(psi(i, j)) > 1e-14) {
                    const cplx phase = std::conj(psi(i, j)) / std::abs(psi(i, j));
                    psi *= phase;
                    return;
                }
    }

    Kind kind_;
    SpinQuantum s_a_;
    SpinQuantum s_b_;
    StateMeta meta_;
    CMatrix psi_;
    CMatrix rho_;
};

/// n qubits, basis index bit (n-1-k) = 1 meaning qubit k is down.
struct MultiQubitState {
    int n = 0;
    CVector amplitudes;
};

/// Permutation-symmetric N-atom state in the collective basis |N/2, M>,
/// index i holding M = N/2 - i.
struct SymmetricState {
    int n_atoms = 0;
    CVector amplitudes;
};

namespace detail {

inline StateMeta make_meta(std::string family, std::vector<std::pair<std::string, double>> params) {
    return StateMeta{std::move(family), std::move(params), 0, 0};
}

inline void require_positive_n(int n, const char* who) {
    if (n < 1) throw ValidationError(std::string(who) + ": n must be >= 1");
    if (n + 1 > kMaxPureDim) throw CapacityError(std::string(who) + ": dimension cap exceeded");
}

} // namespace detail

/// sum_m |s,m>|s,m> / sqrt(n+1) with s = n/2.
inline BipartiteState maximally_entangled(int n) {
    detail::require_positive_n(n, "maximally_entangled");
    const auto s = SpinQuantum::from_two_s(n);
    CMatrix psi = CMatrix::Identity(n + 1, n + 1) / std::sqrt(static_cast<double>(n + 1));
    return BipartiteState::pure(s, s, std::move(psi), detail::make_meta("maximally_entangled", {{"n", n}}));
}

/// sum_k e^{ik theta} |n/2,k>|n/2,-k> / sqrt(n+1).
inline BipartiteState relative_phase(int n, double theta) {
    detail::require_positive_n(n, "relative_phase");
    const auto s = SpinQuantum::from_two_s(n);
    CMatrix psi = CMatrix::Zero(n + 1, n + 1);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n + 1));
    for (int i = 0; i <= n; ++i) {
        const double k = s.m_at(i);
        psi(i, n - i) = std::polar(norm, k * theta);
    }
    return BipartiteState::pure(s, s, std::move(psi),
                                detail::make_meta("relative_phase", {{"n", n}, {"theta", theta}}));
}

/// Flip operator V|k>|l> = |l>|k> on C^d (x) C^d.
inline CMatrix flip_operator(Eigen::Index d) {
    CMatrix v = CMatrix::Zero(d * d, d * d);
    for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index l = 0; l < d; ++l) v(l * d + k, k * d + l) = 1.0;
    return v;
}

/// ((d - phi) 1 + (d phi - 1) V) / (d^3 - d) with d = n + 1 and -1 <= phi <= 1.
inline BipartiteState werner(int n, double phi) {
    detail::require_positive_n(n, "werner");
    if (!(phi >= -1.0 && phi <= 1.0)) throw ValidationError("werner: phi must lie in [-1, 1]");
    const auto s = SpinQuantum::from_two_s(n);
    const Eigen::Index d = n + 1;
    if (d * d > kMaxMixedDim) throw CapacityError("werner: mixed dimension cap exceeded");
    const double dd = static_cast<double>(d);
    CMatrix rho = ((dd - phi) * CMatrix::Identity(d * d, d * d) + (dd * phi - 1.0) * flip_operator(d)) /
                  (dd * dd * dd - dd);
    return BipartiteState::mixed(s, s, std::move(rho), detail::make_meta("werner", {{"n", n}, {"phi", phi}}));
}

/// sum C(N_A/2, k_A; N_B/2, k_B | J, K) |N_A/2,k_A>|N_B/2,k_B>; J and K given doubled.
inline BipartiteState angular_momentum_eigenstate2(int n_a, int n_b, int two_J, int two_K) {
    detail::require_positive_n(n_a, "angular_momentum_eigenstate");
    detail::require_positive_n(n_b, "angular_momentum_eigenstate");
    if (two_J < std::abs(n_a - n_b) || two_J > n_a + n_b || ((n_a + n_b + two_J) % 2) != 0)
        throw ValidationError("angular_momentum_eigenstate: J violates the triangle rule");
    if (std::abs(two_K) > two_J || ((two_J + two_K) % 2) != 0)
        throw ValidationError("angular_momentum_eigenstate: |K| must not exceed J");
    const auto sa = SpinQuantum::from_two_s(n_a);
    const auto sb = SpinQuantum::from_two_s(n_b);
    CMatrix psi = CMatrix::Zero(sa.dim(), sb.dim());
    for (Eigen::Index i = 0; i < sa.dim(); ++i) {
        const int two_ma = n_a - 2 * static_cast<int>(i);
        const int two_mb = two_K - two_ma;
        if (std::abs(two_mb) > n_b) continue;
        psi(i, sb.index_of_two_m(two_mb)) = clebsch_gordan2(n_a, two_ma, n_b, two_mb, two_J, two_K);
    }
    psi /= psi.norm();
    return BipartiteState::pure(
        sa, sb, std::move(psi),
        detail::make_meta("angular_momentum_eigenstate", {{"N_A", n_a}, {"N_B", n_b}, {"J", 0.5 * two_J}, {"K", 0.5 * two_K}}));
}

inline BipartiteState angular_momentum_eigenstate(int n_a, int n_b, double J, double K) {
    return angular_momentum_eigenstate2(n_a, n_b, detail::to_twice(J), detail::to_twice(K));
}

/// sum_m r_m |s,m>|s,m>, renormalized.
inline BipartiteState rm_weighted(SpinQuantum s, const std::vector<double>& r) {
    if (s.two_s < 1) throw ValidationError("rm_weighted: requires 2s >= 1");
    if (static_cast<Eigen::Index>(r.size()) != s.dim())
        throw ValidationError("rm_weighted: weight vector must have length 2s+1");
    double n2 = 0.0;
    for (double x : r) n2 += x * x;
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw ValidationError("rm_weighted: weights must not all vanish");
    CMatrix psi = CMatrix::Zero(s.dim(), s.dim());
    const double inv = 1.0 / std::sqrt(n2);
    for (Eigen::Index i = 0; i < s.dim(); ++i) psi(i, i) = r[static_cast<std::size_t>(i)] * inv;
    std::vector<std::pair<std::string, double>> params{{"two_s", s.two_s}};
    for (std::size_t i = 0; i < r.size(); ++i) params.emplace_back("r" + std::to_string(i), r[i]);
    return BipartiteState::pure(s, s, std::move(psi), detail::make_meta("rm_weighted", std::move(params)));
}

/// |s_A, m_A>|s_B, m_B> with m values doubled.
inline BipartiteState product_basis_state(SpinQuantum s_a, int two_m_a, SpinQuantum s_b, int two_m_b) {
    detail::check_angular(s_a.two_s, two_m_a, "product state A");
    detail::check_angular(s_b.two_s, two_m_b, "product state B");
    CMatrix psi = CMatrix::Zero(s_a.dim(), s_b.dim());
    psi(s_a.index_of_two_m(two_m_a), s_b.index_of_two_m(two_m_b)) = 1.0;
    return BipartiteState::pure(s_a, s_b, std::move(psi),
                                detail::make_meta("product", {{"two_s_a", s_a.two_s},
                                                              {"two_m_a", two_m_a},
                                                              {"two_s_b", s_b.two_s},
                                                              {"two_m_b", two_m_b}}));
}

/// Arbitrary normalized coefficient matrix (used for random and custom states).
inline BipartiteState pure_state(SpinQuantum s_a, SpinQuantum s_b, CMatrix psi, std::string family = "custom") {
    const double n = psi.norm();
    if (!(n > 0.0)) throw ValidationError("pure_state: zero coefficient matrix");
    psi /= n;
    return BipartiteState::pure(s_a, s_b, std::move(psi), detail::make_meta(std::move(family), {}));
}

/// (|up...up> + i |down...down>) / sqrt(2).
inline MultiQubitState ghz(int n) {
    if (n < 2 || n > kMaxQubits) throw CapacityError("ghz: party count must lie in [2, 14]");
    MultiQubitState st;
    st.n = n;
    st.amplitudes = CVector::Zero(Eigen::Index{1} << n);
    st.amplitudes(0) = 1.0 / std::sqrt(2.0);
    st.amplitudes(st.amplitudes.size() - 1) = kI / std::sqrt(2.0);
    return st;
}

/// Collective basis vector |J = N/2, M = k - N/2>; k counts excited (up) atoms.
inline SymmetricState dicke(int n_atoms, int k) {
    if (n_atoms < 1) throw ValidationError("dicke: N must be >= 1");
    if (n_atoms + 1 > kMaxPureDim) throw CapacityError("dicke: dimension cap exceeded");
    if (k < 0 || k > n_atoms) throw ValidationError("dicke: k must lie in [0, N]");
    SymmetricState st;
    st.n_atoms = n_atoms;
    st.amplitudes = CVector::Zero(n_atoms + 1);
    st.amplitudes(n_atoms - k) = 1.0;
    return st;
}

struct SeparableComponent {
    double weight;
    CMatrix rho_a;
    CMatrix rho_b;
};

namespace detail {

inline void check_density(const CMatrix& rho, const char* who) {
    if (rho.rows() != rho.cols() || rho.rows() < 2)
        throw ValidationError(std::string(who) + ": factor must be a square matrix of dimension >= 2");
    if (!linalg::is_hermitian(rho, 1e-10)) throw ValidationError(std::string(who) + ": factor not Hermitian");
    if (std::abs(rho.trace() - cplx{1.0, 0.0}) > 1e-10) throw ValidationError(std::string(who) + ": factor trace != 1");
    if (linalg::min_eigenvalue(rho) < -1e-10) throw ValidationError(std::string(who) + ": factor not PSD");
}

} // namespace detail

/// sum_R P_R rho_R^A (x) rho_R^B.
inline BipartiteState separable_mixture(const std::vector<SeparableComponent>& components) {
    if (components.empty()) throw ValidationError("separable_mixture: no components");
    const Eigen::Index da = components.front().rho_a.rows();
    const Eigen::Index db = components.front().rho_b.rows();
    if (da * db > kMaxMixedDim) throw CapacityError("separable_mixture: mixed dimension cap exceeded");
    double total = 0.0;
    CMatrix rho = CMatrix::Zero(da * db, da * db);
    for (const auto& c : components) {
        if (!(c.weight >= 0.0)) throw ValidationError("separable_mixture: weights must be non-negative");
        if (c.rho_a.rows() != da || c.rho_b.rows() != db)
            throw ValidationError("separable_mixture: inconsistent factor dimensions");
        detail::check_density(c.rho_a, "separable_mixture");
        detail::check_density(c.rho_b, "separable_mixture");
        total += c.weight;
        rho += c.weight * linalg::kron(c.rho_a, c.rho_b);
    }
    if (std::abs(total - 1.0) > 1e-10) throw ValidationError("separable_mixture: weights must sum to 1");
    return BipartiteState::mixed(SpinQuantum::from_two_s(static_cast<int>(da) - 1),
                                 SpinQuantum::from_two_s(static_cast<int>(db) - 1), std::move(rho),
                                 detail::make_meta("separable_mixture", {{"components", static_cast<double>(components.size())}}));
}

} // namespace bellnl
