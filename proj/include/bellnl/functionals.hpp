#pragma once

// Named Bell functionals evaluated on quantum states.

#include "bellnl/errors.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/measurement.hpp"
#include "bellnl/report.hpp"
#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

namespace bellnl {

// ---------------------------------------------------------------- CHSH

/// Classical bound 1/2 N_A N_B; reduces to 1/2 for two spin-1/2 parties.
inline double half_product_of_numbers(const BipartiteState& st) {
    return 0.5 * static_cast<double>(st.s_a().two_s) * static_cast<double>(st.s_b().two_s);
}

inline ViolationReport chsh_value(const BipartiteState& st, const SpinRep& rep_a, const SpinRep& rep_b,
                                  const UnitVector& u1, const UnitVector& u2, const UnitVector& v1,
                                  const UnitVector& v2) {
    if (rep_a.s.two_s != st.s_a().two_s || rep_b.s.two_s != st.s_b().two_s)
        throw ValidationError("chsh_value: spin representation does not match the state");
    const CMatrix a1 = spin_matrix(rep_a, u1), a2 = spin_matrix(rep_a, u2);
    const CMatrix b1 = spin_matrix(rep_b, v1), b2 = spin_matrix(rep_b, v2);
    const double s = correlator(st, a1, b1) + correlator(st, a1, b2) + correlator(st, a2, b1) - correlator(st, a2, b2);
    auto r = make_report("chsh", s, half_product_of_numbers(st), BoundSense::abs_upper);
    r.settings = {u1, u2, v1, v2};
    r.state = st.meta();
    return r;
}

inline ViolationReport chsh_value(const BipartiteState& st, const UnitVector& u1, const UnitVector& u2,
                                  const UnitVector& v1, const UnitVector& v2) {
    return chsh_value(st, build_spin_rep(st.s_a()), build_spin_rep(st.s_b()), u1, u2, v1, v2);
}

// ---------------------------------------------------------------- Mermin

/// How the left side s|<S_Aa> - <S_Bb>| is read.
///   squared_difference:     s <(S_Aa - S_Bb)^2>
///   absolute_of_difference: s <|S_Aa - S_Bb|> from the joint distribution
///   literal:                s |<S_Aa> - <S_Bb>|
enum class MerminReading { squared_difference, absolute_of_difference, literal };

inline const char* to_string(MerminReading r) {
    switch (r) {
    case MerminReading::squared_difference: return "squared_difference";
    case MerminReading::absolute_of_difference: return "absolute_of_difference";
    case MerminReading::literal: return "literal";
    }
    return "?";
}

inline MerminReading mermin_reading_from_string(const std::string& s) {
    if (s == "squared_difference") return MerminReading::squared_difference;
    if (s == "absolute_of_difference") return MerminReading::absolute_of_difference;
    if (s == "literal") return MerminReading::literal;
    throw ValidationError("unknown Mermin reading '" + s + "'");
}

struct MerminSettings {
    UnitVector a, b, c;
};

/// Coplanar triple in the x-z plane: c = z, a and b at pi/2 + theta from c.
inline MerminSettings mermin_coplanar(double sin_theta) {
    if (!(sin_theta >= -1.0 && sin_theta <= 1.0)) throw ValidationError("mermin_coplanar: |sin theta| > 1");
    const double cos_theta = std::sqrt(std::max(0.0, 1.0 - sin_theta * sin_theta));
    return MerminSettings{UnitVector::normalized(cos_theta, 0.0, -sin_theta),
                          UnitVector::normalized(-cos_theta, 0.0, -sin_theta), UnitVector::make(0.0, 0.0, 1.0)};
}

inline ViolationReport mermin_check(const BipartiteState& st, const UnitVector& a, const UnitVector& b,
                                    const UnitVector& c, MerminReading reading = MerminReading::squared_difference) {
    if (st.s_a().two_s != st.s_b().two_s) throw ValidationError("mermin_check: subsystems must share the same spin");
    const double s = st.s_a().value();
    const auto rep = build_spin_rep(st.s_a());
    const auto a_a = spin_component(rep, a);
    const auto a_b = spin_component(rep, b);
    const auto b_b = spin_component(rep, b);
    const auto b_c = spin_component(rep, c);

    double lhs = 0.0;
    switch (reading) {
    case MerminReading::squared_difference: {
        const CMatrix& x = a_a.matrix();
        const CMatrix& y = b_b.matrix();
        lhs = s * (local_expectation(st, Side::a, x * x).real() + local_expectation(st, Side::b, y * y).real() -
                   2.0 * correlator(st, x, y));
        break;
    }
    case MerminReading::absolute_of_difference: {
        const RMatrix p = joint_distribution(st, a_a, b_b);
        for (Eigen::Index i = 0; i < p.rows(); ++i)
            for (Eigen::Index j = 0; j < p.cols(); ++j)
                lhs += p(i, j) * std::abs(a_a.groups()[static_cast<std::size_t>(i)].value -
                                          b_b.groups()[static_cast<std::size_t>(j)].value);
        lhs *= s;
        break;
    }
    case MerminReading::literal:
        lhs = s * std::abs(local_expectation(st, Side::a, a_a.matrix()).real() -
                           local_expectation(st, Side::b, b_b.matrix()).real());
        break;
    }
    const double rhs = correlator(st, a_a, b_c) + correlator(st, a_b, b_c);
    auto r = make_report("mermin", lhs, rhs, BoundSense::lower);
    r.settings = {a, b, c};
    r.state = st.meta();
    r.extras = {{"lhs", lhs}, {"rhs", rhs}};
    return r;
}

// ---------------------------------------------------------------- Drummond

/// 3 g(theta) - g(3 theta) - 2 with g(theta) = exp(-J theta^2 / 2).
inline double drummond_margin(double j, double theta) {
    if (!(j >= 1.0)) throw ValidationError("drummond_margin: J must be >= 1");
    auto g = [j](double t) { return std::exp(-0.5 * j * t * t); };
    return 3.0 * g(theta) - g(3.0 * theta) - 2.0;
}

struct Bracket {
    double lo = 0.0; // margin > 0
    double hi = 0.0; // margin <= 0
    int iterations = 0;
};

/// Bisection on f over [lo, hi] with f(lo) > 0 >= f(hi).
template <class F>
Bracket bisect_sign_change(F&& f, double lo, double hi, double tol) {
    if (!(f(lo) > 0.0) || f(hi) > 0.0) throw ValidationError("bisect_sign_change: endpoints do not bracket a sign change");
    Bracket b{lo, hi, 0};
    while (b.hi - b.lo > tol && b.iterations < 200) {
        const double mid = 0.5 * (b.lo + b.hi);
        (f(mid) > 0.0 ? b.lo : b.hi) = mid;
        ++b.iterations;
    }
    return b;
}

/// Upper end of the positive-theta window where drummond_margin > 0.
inline Bracket drummond_window_end(double j, double tol = 1e-8) {
    const double scale = 1.0 / std::sqrt(j);
    return bisect_sign_change([j](double t) { return drummond_margin(j, t); }, 1e-3 * scale, 3.0 * scale, tol);
}

// ---------------------------------------------------------------- MABK

/// <F> with F = (X - X^dagger) / 2i and X = prod_k (sigma_x + i sigma_y)_k.
/// X = prod 2 sigma_+ only links |down...down> to |up...up>, so <X> = 2^n conj(c_0) c_last.
inline double mabk_expectation(const MultiQubitState& st) {
    if (st.n < 1 || st.n > kMaxQubits) throw CapacityError("mabk_expectation: party count out of range");
    if (st.amplitudes.size() != (Eigen::Index{1} << st.n))
        throw ValidationError("mabk_expectation: amplitude vector has wrong length");
    const cplx x = std::ldexp(1.0, st.n) * std::conj(st.amplitudes(0)) * st.amplitudes(st.amplitudes.size() - 1);
    return x.imag();
}

inline double mabk_bound(int n) { return std::pow(2.0, 0.5 * n); }

inline ViolationReport mabk_value(const MultiQubitState& st) {
    auto r = make_report("mabk", mabk_expectation(st), mabk_bound(st.n), BoundSense::abs_upper);
    r.state.family = "ghz";
    r.state.params = {{"n", static_cast<double>(st.n)}};
    return r;
}

inline ViolationReport mabk_value(int n) { return mabk_value(ghz(n)); }

// ---------------------------------------------------------------- Reid

/// Direction of S_z cos 2t + S_x sin 2t.
inline UnitVector reid_direction(double t) { return UnitVector::normalized(std::sin(2.0 * t), 0.0, std::cos(2.0 * t)); }

inline ViolationReport reid_ratio(const BipartiteState& st, const SpinRep& rep_a, const SpinRep& rep_b, double theta,
                                  double theta_star, double phi, double phi_star,
                                  ZeroPolicy zero = ZeroPolicy::plus) {
    const auto at = spin_component(rep_a, reid_direction(theta));
    const auto ats = spin_component(rep_a, reid_direction(theta_star));
    const auto bp = spin_component(rep_b, reid_direction(phi));
    const auto bps = spin_component(rep_b, reid_direction(phi_star));
    const double num = binned_joint_probability(st, at, bp, zero, zero).pp -
                       binned_joint_probability(st, at, bps, zero, zero).pp +
                       binned_joint_probability(st, ats, bp, zero, zero).pp +
                       binned_joint_probability(st, ats, bps, zero, zero).pp;
    const double den = binned_marginal_plus(st, Side::a, ats, zero) + binned_marginal_plus(st, Side::b, bp, zero);
    if (!(den > 1e-12)) throw DegenerateConditionError("reid_ratio: vanishing denominator");
    auto r = make_report("reid", num / den, 1.0, BoundSense::upper);
    r.settings = {reid_direction(theta), reid_direction(theta_star), reid_direction(phi), reid_direction(phi_star)};
    r.parameters = {{"theta", theta}, {"theta_star", theta_star}, {"phi", phi}, {"phi_star", phi_star}};
    r.extras = {{"numerator", num}, {"denominator", den}};
    r.state = st.meta();
    return r;
}

inline ViolationReport reid_ratio(const BipartiteState& st, double theta, double theta_star, double phi,
                                  double phi_star, ZeroPolicy zero = ZeroPolicy::plus) {
    return reid_ratio(st, build_spin_rep(st.s_a()), build_spin_rep(st.s_b()), theta, theta_star, phi, phi_star, zero);
}

// ---------------------------------------------------------------- CFRD

/// <(A1^2 + A2^2)(B1^2 + B2^2)> - |<A1 B1 + A2 B2> + i <A2 B1 - A1 B2>|^2.
inline ViolationReport cfrd_margin(const BipartiteState& st, const CMatrix& a1, const CMatrix& a2, const CMatrix& b1,
                                   const CMatrix& b2) {
    if (a1.rows() != st.d_a() || a2.rows() != st.d_a() || b1.rows() != st.d_b() || b2.rows() != st.d_b())
        throw ValidationError("cfrd_margin: observable dimension mismatch");
    const double lhs = correlator(st, a1 * a1 + a2 * a2, b1 * b1 + b2 * b2);
    const cplx z{correlator(st, a1, b1) + correlator(st, a2, b2), correlator(st, a2, b1) - correlator(st, a1, b2)};
    const double rhs = std::norm(z);
    auto r = make_report("cfrd", lhs, rhs, BoundSense::lower);
    r.extras = {{"lhs", lhs}, {"rhs", rhs}};
    r.state = st.meta();
    return r;
}

/// Spin choice: A1 = S_x^A, A2 = S_y^A and likewise on B.
inline ViolationReport cfrd_spin_margin(const BipartiteState& st) {
    const auto ra = build_spin_rep(st.s_a());
    const auto rb = build_spin_rep(st.s_b());
    auto r = cfrd_margin(st, ra.sx, ra.sy, rb.sx, rb.sy);
    r.settings = {UnitVector::make(1, 0, 0), UnitVector::make(0, 1, 0), UnitVector::make(1, 0, 0),
                  UnitVector::make(0, 1, 0)};
    return r;
}

/// <dJ_x^2> + <dJ_y^2> + 1/4 for the total spin J = S_A + S_B.
inline double cfrd_quadrature_margin(const BipartiteState& st) {
    const auto ra = build_spin_rep(st.s_a());
    const auto rb = build_spin_rep(st.s_b());
    auto variance = [&](const CMatrix& a, const CMatrix& b) {
        const double ma = local_expectation(st, Side::a, a).real();
        const double mb = local_expectation(st, Side::b, b).real();
        const double second = local_expectation(st, Side::a, a * a).real() +
                              local_expectation(st, Side::b, b * b).real() + 2.0 * correlator(st, a, b);
        return second - (ma + mb) * (ma + mb);
    };
    return variance(ra.sx, rb.sx) + variance(ra.sy, rb.sy) + 0.25;
}

// ---------------------------------------------------------------- Tura

struct TuraCorrelators {
    double s0 = 0.0;
    double s00 = 0.0;
    double s11 = 0.0;
    double s01 = 0.0;
    double imaginary_residual = 0.0;
};

/// Collective-operator evaluation; each atom's outcomes are +-1 = 2 x (spin 1/2 outcome).
inline TuraCorrelators tura_correlators(const SymmetricState& st, const SpinRep& rep, const UnitVector& n0,
                                        const UnitVector& n1) {
    const int n = st.n_atoms;
    if (rep.s.two_s != n || st.amplitudes.size() != n + 1)
        throw ValidationError("tura_correlators: collective representation does not match the state");
    if (std::abs(st.amplitudes.squaredNorm() - 1.0) > 1e-10) throw ValidationError("tura_correlators: state not normalized");
    const CVector& psi = st.amplitudes;
    const CVector v0 = spin_matrix(rep, n0) * psi;
    const CVector v1 = spin_matrix(rep, n1) * psi;
    const auto cr = n0.cross(n1);
    const CVector vc = (cr[0] * rep.sx + cr[1] * rep.sy + cr[2] * rep.sz) * psi;

    const cplx j01 = v0.dot(v1); // <(J.n0)(J.n1)>
    TuraCorrelators t;
    t.s0 = 2.0 * psi.dot(v0).real();
    t.s00 = 4.0 * v0.squaredNorm() - n;
    t.s11 = 4.0 * v1.squaredNorm() - n;
    t.s01 = 4.0 * j01.real() - n * n0.dot(n1);
    // 4 Im<(J.n0)(J.n1)> - 2 <J.(n0 x n1)> must vanish.
    t.imaginary_residual = std::abs(4.0 * j01.imag() - 2.0 * psi.dot(vc).real());
    if (t.imaginary_residual > 1e-10 * std::max(1.0, static_cast<double>(n) * n))
        throw std::logic_error("tura_correlators: imaginary part failed to cancel");
    return t;
}

inline double tura_w(const TuraCorrelators& c, int n) {
    return 2.0 * c.s0 + c.s01 + 2.0 * n + 0.5 * (c.s00 + c.s11);
}

inline ViolationReport tura_value(const SymmetricState& st, const SpinRep& rep, const UnitVector& n0,
                                  const UnitVector& n1) {
    const auto c = tura_correlators(st, rep, n0, n1);
    auto r = make_report("tura", tura_w(c, st.n_atoms), 0.0, BoundSense::lower);
    r.settings = {n0, n1};
    r.extras = {{"S0", c.s0}, {"S00", c.s00}, {"S11", c.s11}, {"S01", c.s01}};
    r.state.family = "symmetric";
    r.state.params = {{"N", static_cast<double>(st.n_atoms)}};
    return r;
}

inline ViolationReport tura_value(const SymmetricState& st, const UnitVector& n0, const UnitVector& n1) {
    return tura_value(st, build_spin_rep(SpinQuantum::from_two_s(st.n_atoms)), n0, n1);
}

/// First and second moments of the collective spin; the Tura correlators for any
/// pair of directions follow from these alone.
struct TuraMoments {
    int n_atoms = 0;
    std::array<double, 3> mean{};                  // <J_i>
    std::array<std::array<double, 3>, 3> second{}; // Re <J_i J_j>
};

inline TuraMoments tura_moments(const SymmetricState& st, const SpinRep& rep) {
    const int n = st.n_atoms;
    if (rep.s.two_s != n || st.amplitudes.size() != n + 1)
        throw ValidationError("tura_moments: collective representation does not match the state");
    if (std::abs(st.amplitudes.squaredNorm() - 1.0) > 1e-10) throw ValidationError("tura_moments: state not normalized");
    const CVector& psi = st.amplitudes;
    const std::array<CVector, 3> v{rep.sx * psi, rep.sy * psi, rep.sz * psi};
    TuraMoments m;
    m.n_atoms = n;
    for (int i = 0; i < 3; ++i) {
        m.mean[i] = psi.dot(v[i]).real();
        for (int j = 0; j < 3; ++j) m.second[i][j] = v[i].dot(v[j]).real();
    }
    return m;
}

inline double tura_w(const TuraMoments& m, const UnitVector& n0, const UnitVector& n1) {
    const auto& a = n0.components();
    const auto& b = n1.components();
    double mean0 = 0.0, q00 = 0.0, q11 = 0.0, q01 = 0.0;
    for (int i = 0; i < 3; ++i) {
        mean0 += a[i] * m.mean[i];
        for (int j = 0; j < 3; ++j) {
            q00 += a[i] * a[j] * m.second[i][j];
            q11 += b[i] * b[j] * m.second[i][j];
            q01 += a[i] * b[j] * m.second[i][j];
        }
    }
    const int n = m.n_atoms;
    TuraCorrelators c;
    c.s0 = 2.0 * mean0;
    c.s00 = 4.0 * q00 - n;
    c.s11 = 4.0 * q11 - n;
    c.s01 = 4.0 * q01 - n * n0.dot(n1);
    return tura_w(c, n);
}

// ---------------------------------------------------------------- CGLMP

/// Tables ordered (A1,B1), (A1,B2), (A2,B1), (A2,B2); entry (j, l) = P(A = j, B = l).
inline double cglmp_I(const std::array<RMatrix, 4>& t, int d) {
    if (d < 2) throw ValidationError("cglmp_I: d must be >= 2");
    for (const auto& m : t) {
        if (m.rows() != d || m.cols() != d) throw ValidationError("cglmp_I: table must be d x d");
        if (m.minCoeff() < -1e-12) throw ValidationError("cglmp_I: negative probability");
        if (std::abs(m.sum() - 1.0) > 1e-9) throw ValidationError("cglmp_I: table does not sum to 1");
    }
    double i = 0.0;
    for (int j = 0; j < d; ++j) {
        i += t[0](j, j);           // A1 = B1
        i += t[2](j, (j + 1) % d); // B1 = A2 + 1
        i += t[2](j, j);           // A2 = B1
        i += t[1](j, j);           // B2 = A1
    }
    return i;
}

} // namespace bellnl
