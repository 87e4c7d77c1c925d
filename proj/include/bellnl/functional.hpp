#pragma once

// Declarative Bell functionals: a scenario (settings and outcome lists per
// side) plus linear terms over joint and marginal outcome distributions. The
// same description is evaluated on deterministic strategies, stochastic
// hidden-variable models and quantum states.

#include "bellnl/errors.hpp"
#include "bellnl/linalg.hpp"
#include "bellnl/measurement.hpp"
#include "bellnl/spin.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace bellnl {

struct Scenario {
    /// outcomes_a[i] lists the admissible values of A's i-th setting.
    std::vector<std::vector<double>> outcomes_a;
    std::vector<std::vector<double>> outcomes_b;

    [[nodiscard]] std::size_t settings_a() const { return outcomes_a.size(); }
    [[nodiscard]] std::size_t settings_b() const { return outcomes_b.size(); }

    void validate() const {
        if (outcomes_a.empty() || outcomes_b.empty()) throw ValidationError("Scenario: each side needs >= 1 setting");
        for (const auto& o : outcomes_a)
            if (o.empty()) throw ValidationError("Scenario: empty outcome list");
        for (const auto& o : outcomes_b)
            if (o.empty()) throw ValidationError("Scenario: empty outcome list");
    }

    /// Same outcome list for every setting.
    static Scenario uniform(std::size_t settings_a, std::vector<double> outcomes_a, std::size_t settings_b,
                            std::vector<double> outcomes_b) {
        Scenario s;
        s.outcomes_a.assign(settings_a, outcomes_a);
        s.outcomes_b.assign(settings_b, outcomes_b);
        s.validate();
        return s;
    }
};

/// {-s, ..., s} ascending.
inline std::vector<double> spin_outcomes(SpinQuantum s) {
    std::vector<double> out;
    for (Eigen::Index i = s.dim() - 1; i >= 0; --i) out.push_back(s.m_at(i));
    return out;
}

/// {0, 1, ..., d-1}.
inline std::vector<double> index_outcomes(int d) {
    std::vector<double> out;
    for (int i = 0; i < d; ++i) out.push_back(i);
    return out;
}

struct BellTerm {
    enum class Kind { joint, marginal };
    Kind kind = Kind::joint;
    std::size_t setting_a = 0; // joint, or marginal on A
    std::size_t setting_b = 0; // joint, or marginal on B
    Side side = Side::a;       // marginal only
    RMatrix joint_weights;     // |outcomes_a| x |outcomes_b|
    RVector marginal_weights;  // |outcomes of that setting|
    std::string label;
};

struct BoundRule {
    enum class Kind { constant, half_product_of_numbers, lhv_enumeration };
    Kind kind = Kind::constant;
    double constant = 0.0;
};

struct BellFunctional {
    std::string name;
    Scenario scenario;
    std::vector<BellTerm> terms;
    BoundRule bound;

    void validate() const {
        scenario.validate();
        for (const auto& t : terms) {
            if (t.kind == BellTerm::Kind::joint) {
                if (t.setting_a >= scenario.settings_a() || t.setting_b >= scenario.settings_b())
                    throw ValidationError("BellFunctional: term setting index out of range");
                if (t.joint_weights.rows() != static_cast<Eigen::Index>(scenario.outcomes_a[t.setting_a].size()) ||
                    t.joint_weights.cols() != static_cast<Eigen::Index>(scenario.outcomes_b[t.setting_b].size()))
                    throw ValidationError("BellFunctional: joint weight table shape mismatch");
            } else {
                const auto& lists = t.side == Side::a ? scenario.outcomes_a : scenario.outcomes_b;
                const std::size_t k = t.side == Side::a ? t.setting_a : t.setting_b;
                if (k >= lists.size()) throw ValidationError("BellFunctional: marginal setting index out of range");
                if (t.marginal_weights.size() != static_cast<Eigen::Index>(lists[k].size()))
                    throw ValidationError("BellFunctional: marginal weight vector length mismatch");
            }
        }
    }
};

// Term builders. Each folds its coefficient into the weight table.

/// coeff * <A_i B_j>.
inline BellTerm correlator_term(const Scenario& sc, std::size_t i, std::size_t j, double coeff) {
    const auto& oa = sc.outcomes_a.at(i);
    const auto& ob = sc.outcomes_b.at(j);
    BellTerm t;
    t.kind = BellTerm::Kind::joint;
    t.setting_a = i;
    t.setting_b = j;
    t.joint_weights.resize(static_cast<Eigen::Index>(oa.size()), static_cast<Eigen::Index>(ob.size()));
    for (std::size_t x = 0; x < oa.size(); ++x)
        for (std::size_t y = 0; y < ob.size(); ++y)
            t.joint_weights(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = coeff * oa[x] * ob[y];
    t.label = "corr(A" + std::to_string(i + 1) + ",B" + std::to_string(j + 1) + ")";
    return t;
}

inline bool in_sign_bin(double value, bool plus_bin, ZeroPolicy zero) {
    if (std::abs(value) <= 1e-12) {
        if (zero == ZeroPolicy::exclude) return false;
        return (zero == ZeroPolicy::plus) == plus_bin;
    }
    return (value > 0.0) == plus_bin;
}

/// coeff * P(bin_a, bin_b | A_i, B_j) with sign bins.
inline BellTerm binned_probability_term(const Scenario& sc, std::size_t i, std::size_t j, bool plus_a, bool plus_b,
                                        double coeff, ZeroPolicy zero = ZeroPolicy::plus) {
    const auto& oa = sc.outcomes_a.at(i);
    const auto& ob = sc.outcomes_b.at(j);
    BellTerm t;
    t.kind = BellTerm::Kind::joint;
    t.setting_a = i;
    t.setting_b = j;
    t.joint_weights = RMatrix::Zero(static_cast<Eigen::Index>(oa.size()), static_cast<Eigen::Index>(ob.size()));
    for (std::size_t x = 0; x < oa.size(); ++x)
        for (std::size_t y = 0; y < ob.size(); ++y)
            if (in_sign_bin(oa[x], plus_a, zero) && in_sign_bin(ob[y], plus_b, zero))
                t.joint_weights(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = coeff;
    t.label = std::string("P(") + (plus_a ? "+" : "-") + "," + (plus_b ? "+" : "-") + "|A" + std::to_string(i + 1) +
              ",B" + std::to_string(j + 1) + ")";
    return t;
}

/// coeff * P(B_j outcome index == A_i outcome index + shift (mod d)).
inline BellTerm shifted_equality_term(const Scenario& sc, std::size_t i, std::size_t j, int shift, double coeff) {
    const auto na = static_cast<int>(sc.outcomes_a.at(i).size());
    const auto nb = static_cast<int>(sc.outcomes_b.at(j).size());
    if (na != nb) throw ValidationError("shifted_equality_term: outcome counts differ");
    BellTerm t;
    t.kind = BellTerm::Kind::joint;
    t.setting_a = i;
    t.setting_b = j;
    t.joint_weights = RMatrix::Zero(na, nb);
    for (int x = 0; x < na; ++x) t.joint_weights(x, ((x + shift) % nb + nb) % nb) = coeff;
    t.label = "P(B" + std::to_string(j + 1) + "=A" + std::to_string(i + 1) + "+" + std::to_string(shift) + ")";
    return t;
}

/// coeff * <X_k> on one side.
inline BellTerm single_mean_term(const Scenario& sc, Side side, std::size_t k, double coeff) {
    const auto& o = (side == Side::a ? sc.outcomes_a : sc.outcomes_b).at(k);
    BellTerm t;
    t.kind = BellTerm::Kind::marginal;
    t.side = side;
    (side == Side::a ? t.setting_a : t.setting_b) = k;
    t.marginal_weights.resize(static_cast<Eigen::Index>(o.size()));
    for (std::size_t x = 0; x < o.size(); ++x) t.marginal_weights(static_cast<Eigen::Index>(x)) = coeff * o[x];
    t.label = std::string("mean(") + to_string(side) + std::to_string(k + 1) + ")";
    return t;
}

/// coeff * P(sign bin | X_k) on one side.
inline BellTerm single_bin_term(const Scenario& sc, Side side, std::size_t k, bool plus, double coeff,
                                ZeroPolicy zero = ZeroPolicy::plus) {
    const auto& o = (side == Side::a ? sc.outcomes_a : sc.outcomes_b).at(k);
    BellTerm t;
    t.kind = BellTerm::Kind::marginal;
    t.side = side;
    (side == Side::a ? t.setting_a : t.setting_b) = k;
    t.marginal_weights = RVector::Zero(static_cast<Eigen::Index>(o.size()));
    for (std::size_t x = 0; x < o.size(); ++x)
        if (in_sign_bin(o[x], plus, zero)) t.marginal_weights(static_cast<Eigen::Index>(x)) = coeff;
    t.label = std::string("P(") + (plus ? "+" : "-") + "|" + to_string(side) + std::to_string(k + 1) + ")";
    return t;
}

/// S = <A1 B1> + <A1 B2> + <A2 B1> - <A2 B2>, outcomes {-s..s} per side.
/// With s_A = s_B = 1/2 this is CHSH with bound 1/2.
inline BellFunctional chsh_functional(SpinQuantum s_a, SpinQuantum s_b) {
    BellFunctional f;
    f.name = "chsh";
    f.scenario = Scenario::uniform(2, spin_outcomes(s_a), 2, spin_outcomes(s_b));
    f.terms = {correlator_term(f.scenario, 0, 0, 1.0), correlator_term(f.scenario, 0, 1, 1.0),
               correlator_term(f.scenario, 1, 0, 1.0), correlator_term(f.scenario, 1, 1, -1.0)};
    f.bound = BoundRule{BoundRule::Kind::half_product_of_numbers, 0.0};
    return f;
}

/// I = P(A1=B1) + P(B1=A2+1) + P(A2=B1) + P(B2=A1), outcomes 0..d-1.
inline BellFunctional cglmp_functional(int d) {
    if (d < 2) throw ValidationError("cglmp_functional: d must be >= 2");
    BellFunctional f;
    f.name = "cglmp";
    f.scenario = Scenario::uniform(2, index_outcomes(d), 2, index_outcomes(d));
    f.terms = {shifted_equality_term(f.scenario, 0, 0, 0, 1.0), shifted_equality_term(f.scenario, 1, 0, 1, 1.0),
               shifted_equality_term(f.scenario, 1, 0, 0, 1.0), shifted_equality_term(f.scenario, 0, 1, 0, 1.0)};
    f.bound = BoundRule{BoundRule::Kind::constant, 3.0};
    return f;
}

/// Linear (numerator - denominator) form of the binned-ratio inequality:
/// P(++|t,p) - P(++|t,p*) + P(++|t*,p) + P(++|t*,p*) - P(+|t*) - P(+|p) <= 0.
/// Setting 0 is the unstarred angle on each side, setting 1 the starred one.
inline BellFunctional reid_linear_functional(SpinQuantum s_a, SpinQuantum s_b, ZeroPolicy zero = ZeroPolicy::plus) {
    BellFunctional f;
    f.name = "reid_linear";
    f.scenario = Scenario::uniform(2, spin_outcomes(s_a), 2, spin_outcomes(s_b));
    f.terms = {binned_probability_term(f.scenario, 0, 0, true, true, 1.0, zero),
               binned_probability_term(f.scenario, 0, 1, true, true, -1.0, zero),
               binned_probability_term(f.scenario, 1, 0, true, true, 1.0, zero),
               binned_probability_term(f.scenario, 1, 1, true, true, 1.0, zero),
               single_bin_term(f.scenario, Side::a, 1, true, -1.0, zero),
               single_bin_term(f.scenario, Side::b, 0, true, -1.0, zero)};
    f.bound = BoundRule{BoundRule::Kind::constant, 0.0};
    return f;
}

/// Value of `f` on quantum statistics: observables are matched to the
/// scenario by outcome value.
inline double evaluate_functional(const BipartiteState& st, const BellFunctional& f,
                                  const std::vector<HermitianObservable>& obs_a,
                                  const std::vector<HermitianObservable>& obs_b) {
    f.validate();
    if (obs_a.size() != f.scenario.settings_a() || obs_b.size() != f.scenario.settings_b())
        throw ValidationError("evaluate_functional: observable count does not match the scenario");

    // Map each observable outcome group to a scenario outcome index.
    auto mapping = [](const HermitianObservable& o, const std::vector<double>& outcomes) {
        std::vector<std::size_t> map;
        for (const auto& g : o.groups()) {
            std::size_t found = outcomes.size();
            for (std::size_t k = 0; k < outcomes.size(); ++k)
                if (std::abs(outcomes[k] - g.value) <= 1e-8) found = k;
            if (found == outcomes.size())
                throw ValidationError("evaluate_functional: observable outcome not admissible in the scenario");
            map.push_back(found);
        }
        return map;
    };

    double total = 0.0;
    for (const auto& t : f.terms) {
        if (t.kind == BellTerm::Kind::joint) {
            const auto& oa = obs_a[t.setting_a];
            const auto& ob = obs_b[t.setting_b];
            const auto ma = mapping(oa, f.scenario.outcomes_a[t.setting_a]);
            const auto mb = mapping(ob, f.scenario.outcomes_b[t.setting_b]);
            const RMatrix p = joint_distribution(st, oa, ob);
            for (Eigen::Index x = 0; x < p.rows(); ++x)
                for (Eigen::Index y = 0; y < p.cols(); ++y)
                    total += p(x, y) * t.joint_weights(static_cast<Eigen::Index>(ma[static_cast<std::size_t>(x)]),
                                                       static_cast<Eigen::Index>(mb[static_cast<std::size_t>(y)]));
        } else {
            const std::size_t k = t.side == Side::a ? t.setting_a : t.setting_b;
            const auto& o = t.side == Side::a ? obs_a[k] : obs_b[k];
            const auto& outcomes = t.side == Side::a ? f.scenario.outcomes_a[k] : f.scenario.outcomes_b[k];
            const auto m = mapping(o, outcomes);
            for (std::size_t g = 0; g < o.groups().size(); ++g)
                total += marginal_probability(st, t.side, o, o.groups()[g].value) *
                         t.marginal_weights(static_cast<Eigen::Index>(m[g]));
        }
    }
    return total;
}

} // namespace bellnl
