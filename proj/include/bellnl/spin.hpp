#pragma once

// Exact angular-momentum algebra: spin matrices, direction components,
// sign-bin projectors and Clebsch-Gordan coefficients. hbar = 1 throughout,
// basis ordered m = s, s-1, ..., -s.

#include "bellnl/errors.hpp"
#include "bellnl/linalg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bellnl {

inline constexpr int kDefaultDimensionCap = 4097;

/// Spin quantum number stored as 2s so half-integers are exact.
struct SpinQuantum {
    int two_s = 1;

    static SpinQuantum from_two_s(int two_s) {
        if (two_s < 0) throw ValidationError("spin: 2s must be non-negative, got " + std::to_string(two_s));
        return SpinQuantum{two_s};
    }

    /// Accepts s as a real number; it must be an exact integer or half-integer.
    static SpinQuantum from_value(double s) {
        const double twice = 2.0 * s;
        const double rounded = std::round(twice);
        if (s < 0.0 || std::abs(twice - rounded) > 1e-12)
            throw ValidationError("spin: s must be a non-negative integer or half-integer");
        return SpinQuantum{static_cast<int>(rounded)};
    }

    [[nodiscard]] constexpr double value() const { return 0.5 * two_s; }
    [[nodiscard]] constexpr Eigen::Index dim() const { return two_s + 1; }
    /// m value of basis index i.
    [[nodiscard]] constexpr double m_at(Eigen::Index i) const { return value() - static_cast<double>(i); }
    /// Basis index of 2m.
    [[nodiscard]] constexpr Eigen::Index index_of_two_m(int two_m) const { return (two_s - two_m) / 2; }

    friend constexpr bool operator==(SpinQuantum, SpinQuantum) = default;
};

struct SpinRep {
    SpinQuantum s;
    CMatrix sx;
    CMatrix sy;
    CMatrix sz;
};

/// Ladder-operator construction of the spin-s triple.
inline SpinRep build_spin_rep(SpinQuantum s, int dimension_cap = kDefaultDimensionCap) {
    if (s.two_s < 1) throw ValidationError("build_spin_rep: requires 2s >= 1");
    if (s.dim() > dimension_cap)
        throw CapacityError("build_spin_rep: dimension " + std::to_string(s.dim()) + " exceeds cap " +
                            std::to_string(dimension_cap));
    const Eigen::Index d = s.dim();
    const double sv = s.value();
    CMatrix raise = CMatrix::Zero(d, d);
    // <m+1| S_+ |m> = sqrt(s(s+1) - m(m+1)); index i-1 holds m+1.
    for (Eigen::Index i = 1; i < d; ++i) {
        const double m = s.m_at(i);
        raise(i - 1, i) = std::sqrt(sv * (sv + 1.0) - m * (m + 1.0));
    }
    SpinRep rep;
    rep.s = s;
    rep.sx = 0.5 * (raise + raise.adjoint());
    rep.sy = (raise - raise.adjoint()) / (2.0 * kI);
    rep.sz = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) rep.sz(i, i) = s.m_at(i);
    return rep;
}

class UnitVector {
public:
    UnitVector() = default;

    /// Validates that (x, y, z) is normalized to within `tol`.
    static UnitVector make(double x, double y, double z, double tol = 1e-12) {
        const double n2 = x * x + y * y + z * z;
        if (!std::isfinite(n2) || std::abs(n2 - 1.0) > tol)
            throw ValidationError("UnitVector: components are not normalized");
        return UnitVector(x, y, z);
    }

    static UnitVector normalized(double x, double y, double z) {
        const double n = std::sqrt(x * x + y * y + z * z);
        if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("UnitVector: cannot normalize a zero vector");
        return UnitVector(x / n, y / n, z / n);
    }

    /// Polar angle from +z, azimuth from +x.
    static UnitVector from_angles(double polar, double azimuth) {
        return normalized(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth), std::cos(polar));
    }

    [[nodiscard]] double x() const { return v_[0]; }
    [[nodiscard]] double y() const { return v_[1]; }
    [[nodiscard]] double z() const { return v_[2]; }
    [[nodiscard]] const std::array<double, 3>& components() const { return v_; }

    [[nodiscard]] double polar() const { return std::acos(std::clamp(v_[2], -1.0, 1.0)); }
    [[nodiscard]] double azimuth() const {
        const double phi = std::atan2(v_[1], v_[0]);
        return phi < 0.0 ? phi + 2.0 * std::numbers::pi : phi;
    }

    [[nodiscard]] double dot(const UnitVector& o) const { return v_[0] * o.v_[0] + v_[1] * o.v_[1] + v_[2] * o.v_[2]; }
    [[nodiscard]] std::array<double, 3> cross(const UnitVector& o) const {
        return {v_[1] * o.v_[2] - v_[2] * o.v_[1], v_[2] * o.v_[0] - v_[0] * o.v_[2], v_[0] * o.v_[1] - v_[1] * o.v_[0]};
    }
    [[nodiscard]] UnitVector operator-() const { return UnitVector(-v_[0], -v_[1], -v_[2]); }

private:
    UnitVector(double x, double y, double z) : v_{x, y, z} {}
    std::array<double, 3> v_{0.0, 0.0, 1.0};
};

/// Hermitian operator together with its spectral decomposition.
///
/// Eigenvalues closer than 1e-9 x spectral norm are grouped into one outcome;
/// each group keeps an orthonormal basis of its eigenspace so projectors are
/// formed on demand as basis * basis^dagger.
class HermitianObservable {
public:
    struct Group {
        double value;
        CMatrix basis; // d x multiplicity, orthonormal columns
    };

    static constexpr double kGroupingRelTol = 1e-9;

    static HermitianObservable from_matrix(const CMatrix& m) {
        if (m.rows() != m.cols() || m.rows() == 0) throw ValidationError("HermitianObservable: matrix must be square");
        const double scale = std::max(1.0, linalg::max_abs(m));
        if (!linalg::is_hermitian(m, 1e-10 * scale)) throw ValidationError("HermitianObservable: matrix is not Hermitian");
        const CMatrix herm = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> es(herm);
        const RVector& vals = es.eigenvalues();
        const double norm = std::max(std::abs(vals(0)), std::abs(vals(vals.size() - 1)));
        const double tol = std::max(kGroupingRelTol * norm, 1e-13);

        HermitianObservable obs;
        obs.matrix_ = herm;
        obs.tol_ = tol;
        Eigen::Index start = 0;
        while (start < vals.size()) {
            Eigen::Index end = start + 1;
            while (end < vals.size() && vals(end) - vals(end - 1) <= tol) ++end;
            const double mean = vals.segment(start, end - start).mean();
            obs.groups_.push_back(Group{mean, es.eigenvectors().middleCols(start, end - start)});
            start = end;
        }
        return obs;
    }

    [[nodiscard]] const CMatrix& matrix() const { return matrix_; }
    [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }
    [[nodiscard]] const std::vector<Group>& groups() const { return groups_; }
    [[nodiscard]] double tolerance() const { return tol_; }

    /// Distinct outcomes in ascending order.
    [[nodiscard]] std::vector<double> spectrum() const {
        std::vector<double> out;
        out.reserve(groups_.size());
        for (const auto& g : groups_) out.push_back(g.value);
        return out;
    }

    [[nodiscard]] CMatrix projector(std::size_t group) const {
        const auto& b = groups_.at(group).basis;
        return b * b.adjoint();
    }

    [[nodiscard]] std::optional<std::size_t> find_outcome(double value) const {
        const double tol = std::max(1e-9, 10.0 * tol_);
        for (std::size_t i = 0; i < groups_.size(); ++i)
            if (std::abs(groups_[i].value - value) <= tol) return i;
        return std::nullopt;
    }

    /// Replace group values by exact targets (used when the spectrum is known analytically).
    void snap_spectrum(const std::vector<double>& exact) {
        for (auto& g : groups_) {
            for (double e : exact)
                if (std::abs(g.value - e) <= 1e-8) {
                    g.value = e;
                    break;
                }
        }
    }

private:
    CMatrix matrix_;
    std::vector<Group> groups_;
    double tol_ = 0.0;
};

/// u . S as a plain matrix (no eigendecomposition).
inline CMatrix spin_matrix(const SpinRep& rep, const UnitVector& u) {
    return u.x() * rep.sx + u.y() * rep.sy + u.z() * rep.sz;
}

/// u . S as an observable whose spectrum is exactly {-s, ..., s}.
inline HermitianObservable spin_component(const SpinRep& rep, const UnitVector& u) {
    auto obs = HermitianObservable::from_matrix(spin_matrix(rep, u));
    std::vector<double> exact;
    for (Eigen::Index i = 0; i < rep.s.dim(); ++i) exact.push_back(rep.s.m_at(i));
    obs.snap_spectrum(exact);
    return obs;
}

enum class ZeroPolicy { plus, minus, exclude };

inline const char* to_string(ZeroPolicy p) {
    switch (p) {
    case ZeroPolicy::plus: return "plus";
    case ZeroPolicy::minus: return "minus";
    case ZeroPolicy::exclude: return "exclude";
    }
    return "plus";
}

inline ZeroPolicy zero_policy_from_string(const std::string& s) {
    if (s == "plus") return ZeroPolicy::plus;
    if (s == "minus") return ZeroPolicy::minus;
    if (s == "exclude") return ZeroPolicy::exclude;
    throw ValidationError("unknown zero policy '" + s + "'");
}

/// Orthonormal bases spanning the '+' and '-' outcome bins.
struct SignBases {
    CMatrix plus;
    CMatrix minus;
};

inline SignBases sign_bases(const HermitianObservable& obs, ZeroPolicy zero_policy = ZeroPolicy::plus) {
    std::vector<const CMatrix*> plus, minus;
    const double zero_tol = std::max(1e-9, 10.0 * obs.tolerance());
    for (const auto& g : obs.groups()) {
        if (std::abs(g.value) <= zero_tol) {
            if (zero_policy == ZeroPolicy::plus) plus.push_back(&g.basis);
            else if (zero_policy == ZeroPolicy::minus) minus.push_back(&g.basis);
        } else if (g.value > 0.0) {
            plus.push_back(&g.basis);
        } else {
            minus.push_back(&g.basis);
        }
    }
    auto stack = [&](const std::vector<const CMatrix*>& parts) {
        Eigen::Index cols = 0;
        for (const auto* p : parts) cols += p->cols();
        CMatrix out(obs.dim(), cols);
        Eigen::Index c = 0;
        for (const auto* p : parts) {
            out.middleCols(c, p->cols()) = *p;
            c += p->cols();
        }
        return out;
    };
    return SignBases{stack(plus), stack(minus)};
}

struct SignProjectors {
    CMatrix plus;
    CMatrix minus;
};

/// Projectors onto positive / negative outcomes. With ZeroPolicy::exclude the
/// zero eigenspace belongs to neither, so plus + minus < 1.
inline SignProjectors sign_projectors(const HermitianObservable& obs, ZeroPolicy zero_policy = ZeroPolicy::plus) {
    const auto b = sign_bases(obs, zero_policy);
    return SignProjectors{b.plus * b.plus.adjoint(), b.minus * b.minus.adjoint()};
}

namespace detail {

inline double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

inline void check_angular(int two_j, int two_m, const char* what) {
    if (two_j < 0 || std::abs(two_m) > two_j || ((two_j + two_m) % 2) != 0)
        throw ValidationError(std::string("clebsch_gordan: malformed quantum numbers for ") + what);
}

inline int to_twice(double v) {
    const double t = 2.0 * v;
    const double r = std::round(t);
    if (std::abs(t - r) > 1e-9) throw ValidationError("clebsch_gordan: argument is not an integer or half-integer");
    return static_cast<int>(r);
}

} // namespace detail

/// <j1 m1; j2 m2 | J M> in the Condon-Shortley convention, all arguments doubled.
///
/// Racah's closed form, evaluated term by term in log-factorials so that large
/// j does not overflow.
inline double clebsch_gordan2(int two_j1, int two_m1, int two_j2, int two_m2, int two_J, int two_M) {
    detail::check_angular(two_j1, two_m1, "j1,m1");
    detail::check_angular(two_j2, two_m2, "j2,m2");
    detail::check_angular(two_J, two_M, "J,M");
    if (two_J < std::abs(two_j1 - two_j2) || two_J > two_j1 + two_j2 || ((two_j1 + two_j2 + two_J) % 2) != 0)
        throw ValidationError("clebsch_gordan: triangle rule violated");
    if (two_m1 + two_m2 != two_M) return 0.0;

    // Integer combinations below are exact because of the parity checks above.
    const int jjJ = (two_j1 + two_j2 - two_J) / 2;   // j1 + j2 - J
    const int jJj = (two_j1 - two_j2 + two_J) / 2;   // j1 - j2 + J
    const int Jjj = (-two_j1 + two_j2 + two_J) / 2;  // -j1 + j2 + J
    const int sum1 = (two_j1 + two_j2 + two_J) / 2 + 1;
    const int j1m1m = (two_j1 - two_m1) / 2, j1m1p = (two_j1 + two_m1) / 2;
    const int j2m2m = (two_j2 - two_m2) / 2, j2m2p = (two_j2 + two_m2) / 2;
    const int JMm = (two_J - two_M) / 2, JMp = (two_J + two_M) / 2;

    using detail::log_factorial;
    const double log_pref = 0.5 * (std::log(two_J + 1.0) + log_factorial(jjJ) + log_factorial(jJj) +
                                   log_factorial(Jjj) - log_factorial(sum1) + log_factorial(JMp) +
                                   log_factorial(JMm) + log_factorial(j1m1m) + log_factorial(j1m1p) +
                                   log_factorial(j2m2m) + log_factorial(j2m2p));

    const int a4 = (two_J - two_j2 + two_m1) / 2; // J - j2 + m1
    const int a5 = (two_J - two_j1 - two_m2) / 2; // J - j1 - m2
    const int k_min = std::max({0, -a4, -a5});
    const int k_max = std::min({jjJ, j1m1m, j2m2p});
    double sum = 0.0;
    for (int k = k_min; k <= k_max; ++k) {
        const double log_den = log_factorial(k) + log_factorial(jjJ - k) + log_factorial(j1m1m - k) +
                               log_factorial(j2m2p - k) + log_factorial(a4 + k) + log_factorial(a5 + k);
        const double term = std::exp(log_pref - log_den);
        sum += (k % 2 == 0) ? term : -term;
    }
    return sum;
}

/// Real-valued convenience overload; every argument must be an exact integer or half-integer.
inline double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
    return clebsch_gordan2(detail::to_twice(j1), detail::to_twice(m1), detail::to_twice(j2), detail::to_twice(m2),
                           detail::to_twice(J), detail::to_twice(M));
}

} // namespace bellnl
