#pragma once

// Fast invariant checks run by `bellnl selftest`.

#include "bellnl/functional.hpp"
#include "bellnl/functionals.hpp"
#include "bellnl/lhv.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/measurement.hpp"
#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace bellnl::selftest {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline CMatrix random_psi(std::mt19937_64& rng, Eigen::Index da, Eigen::Index db) {
    std::normal_distribution<double> n;
    CMatrix psi(da, db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j) psi(i, j) = cplx{n(rng), n(rng)};
    return psi / psi.norm();
}

inline UnitVector random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    return UnitVector::normalized(n(rng), n(rng), n(rng));
}

inline CheckResult check(std::string name, const std::function<std::string()>& body) {
    try {
        const std::string failure = body();
        return CheckResult{std::move(name), failure.empty(), failure.empty() ? "ok" : failure};
    } catch (const std::exception& e) {
        return CheckResult{std::move(name), false, std::string("exception: ") + e.what()};
    }
}

} // namespace detail

inline std::vector<CheckResult> run_all(std::uint64_t seed = 20240601) {
    std::vector<CheckResult> out;
    std::mt19937_64 rng(seed);

    out.push_back(detail::check("spin algebra 2s=1..32", [] {
        for (int two_s = 1; two_s <= 32; ++two_s) {
            const auto rep = build_spin_rep(SpinQuantum::from_two_s(two_s));
            const double s = 0.5 * two_s;
            const CMatrix id = CMatrix::Identity(rep.sx.rows(), rep.sx.cols());
            if (linalg::max_abs(linalg::commutator(rep.sx, rep.sy) - kI * rep.sz) > 1e-12) return std::string("[Sx,Sy]");
            if (linalg::max_abs(rep.sx * rep.sx + rep.sy * rep.sy + rep.sz * rep.sz - s * (s + 1) * id) > 1e-12)
                return std::string("Casimir");
        }
        return std::string();
    }));

    out.push_back(detail::check("spin component spectrum", [&] {
        for (int two_s = 1; two_s <= 6; ++two_s) {
            const auto rep = build_spin_rep(SpinQuantum::from_two_s(two_s));
            const auto spec = spin_component(rep, detail::random_direction(rng)).spectrum();
            for (std::size_t k = 0; k < spec.size(); ++k)
                if (std::abs(spec[k] - (-0.5 * two_s + static_cast<double>(k))) > 1e-10) return std::string("spectrum");
        }
        return std::string();
    }));

    out.push_back(detail::check("Clebsch-Gordan unitarity", [] {
        for (int two_m = -4; two_m <= 4; two_m += 2) {
            double sum = 0.0;
            for (int m1 = -2; m1 <= 2; m1 += 2)
                for (int m2 = -2; m2 <= 2; m2 += 2) {
                    const double c = clebsch_gordan2(2, m1, 2, m2, 4, two_m);
                    sum += c * c;
                }
            if (std::abs(sum - 1.0) > 1e-10) return std::string("sum != 1");
        }
        return std::string();
    }));

    out.push_back(detail::check("correlator vs joint distribution", [&] {
        for (int trial = 0; trial < 20; ++trial) {
            const auto sa = SpinQuantum::from_two_s(1 + trial % 3), sb = SpinQuantum::from_two_s(1 + trial % 2);
            const auto st = pure_state(sa, sb, detail::random_psi(rng, sa.dim(), sb.dim()));
            const auto a = spin_component(build_spin_rep(sa), detail::random_direction(rng));
            const auto b = spin_component(build_spin_rep(sb), detail::random_direction(rng));
            const RMatrix p = joint_distribution(st, a, b);
            double e = 0.0;
            for (Eigen::Index i = 0; i < p.rows(); ++i)
                for (Eigen::Index j = 0; j < p.cols(); ++j)
                    e += p(i, j) * a.groups()[static_cast<std::size_t>(i)].value * b.groups()[static_cast<std::size_t>(j)].value;
            if (std::abs(e - correlator(st, a, b)) > 1e-9) return std::string("mismatch");
            if (std::abs(p.sum() - 1.0) > 1e-9) return std::string("normalization");
        }
        return std::string();
    }));

    out.push_back(detail::check("Bayes consistency", [&] {
        const auto s = SpinQuantum::from_two_s(2);
        const auto st = pure_state(s, s, detail::random_psi(rng, 3, 3));
        const auto rep = build_spin_rep(s);
        const auto a = spin_component(rep, detail::random_direction(rng));
        const auto b = spin_component(rep, detail::random_direction(rng));
        for (const auto& ga : a.groups()) {
            const double pa = marginal_probability(st, Side::a, a, ga.value);
            const auto cond = conditioned_state(st, a, ga.value);
            for (const auto& gb : b.groups()) {
                const double joint = joint_probability(st, a, b, ga.value, gb.value);
                const double conditional = marginal_probability(cond, Side::b, b, gb.value);
                if (std::abs(joint - conditional * pa) > 1e-10) return std::string("P(a,b) != P(b|a) P(a)");
            }
        }
        return std::string();
    }));

    out.push_back(detail::check("CHSH local bound 1/2", [] {
        const auto b = enumerate_lhv_bound(chsh_functional(SpinQuantum::from_two_s(1), SpinQuantum::from_two_s(1)));
        return std::abs(b.value - 0.5) < 1e-15 ? std::string() : std::string("bound != 1/2");
    }));

    out.push_back(detail::check("MABK on GHZ(4)", [] {
        return std::abs(mabk_value(4).value - 8.0) < 1e-9 ? std::string() : std::string("F(4) != 8");
    }));

    out.push_back(detail::check("symmetric local minimum, brute force N<=5", [] {
        for (int n = 1; n <= 5; ++n) {
            long long brute = 0;
            bool any = false;
            for (long long code = 0; code < (1LL << (2 * n)); ++code) {
                TuraCounts c;
                for (int k = 0; k < n; ++k) {
                    const int pick = static_cast<int>((code >> (2 * k)) & 3);
                    (pick == 0 ? c.pp : pick == 1 ? c.pm : pick == 2 ? c.mp : c.mm) += 1;
                }
                const long long w = tura_lhv_w(c);
                if (!any || w < brute) brute = w;
                any = true;
            }
            if (brute != symmetric_lhv_min(n).value) return "N=" + std::to_string(n);
        }
        return std::string();
    }));

    out.push_back(detail::check("quadrature margin positive", [&] {
        for (int trial = 0; trial < 50; ++trial) {
            const auto s = SpinQuantum::from_two_s(1 + trial % 4);
            const auto st = pure_state(s, s, detail::random_psi(rng, s.dim(), s.dim()));
            if (!(cfrd_quadrature_margin(st) > 0.0)) return std::string("non-positive");
        }
        return std::string();
    }));

    return out;
}

} // namespace bellnl::selftest
