#pragma once

// Run-spec interpretation behind the `bellnl` command line: parse a JSON spec,
// dispatch to evaluators / optimizers / oracles and build the report envelope.

#include "bellnl/errors.hpp"
#include "bellnl/functional.hpp"
#include "bellnl/functionals.hpp"
#include "bellnl/io.hpp"
#include "bellnl/lhv.hpp"
#include "bellnl/report.hpp"
#include "bellnl/search.hpp"
#include "bellnl/selftest.hpp"
#include "bellnl/states.hpp"
#include "bellnl/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace bellnl::cli {

using json = io::json;

enum ExitCode : int { kOk = 0, kFailure = 1, kMalformed = 2, kUnknownName = 3, kCapacity = 4, kUnwritable = 5 };

/// Structurally invalid spec (missing field, wrong type, arity mismatch).
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Family or functional name not known to the tool.
class UnknownNameError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnwritableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string command;                // overrides spec.command when set
    std::optional<std::string> out;     // overrides spec.output.path
    std::optional<std::string> format;  // overrides spec.output.format
    std::optional<std::uint64_t> seed;  // overrides spec.search.seed
    unsigned threads = 0;
};

struct Outcome {
    json envelope;
    std::string summary;
    std::optional<ScanTable> table;
    std::optional<ViolationReport> report;
};

// ---------------------------------------------------------------- spec access

namespace detail {

inline const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
    return obj.at(key);
}

inline double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw SchemaError(what + ": expected a number");
    return v.get<double>();
}

inline int integer(const json& v, const std::string& what) {
    const double d = number(v, what);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw SchemaError(what + ": expected an integer");
    return static_cast<int>(d);
}

/// Exactly the listed keys (optional ones may be absent).
inline void check_keys(const json& obj, const std::set<std::string>& required, const std::set<std::string>& optional,
                       const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& k : required)
        if (!obj.contains(k)) throw SchemaError(where + ": missing parameter '" + k + "'");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!required.count(it.key()) && !optional.count(it.key()))
            throw SchemaError(where + ": unexpected parameter '" + it.key() + "'");
}

inline json params_of(const json& node) {
    if (!node.is_object()) throw SchemaError("expected an object");
    if (!node.contains("params")) return json::object();
    const json& p = node.at("params");
    if (!p.is_object()) throw SchemaError("params: expected an object");
    return p;
}

inline UnitVector direction(const json& v, const std::string& what) {
    if (v.is_array()) {
        if (v.size() != 3) throw SchemaError(what + ": direction needs three components");
        const double x = number(v[0], what), y = number(v[1], what), z = number(v[2], what);
        const double n = std::sqrt(x * x + y * y + z * z);
        if (std::abs(n - 1.0) > 1e-9) throw ValidationError(what + ": direction is not a unit vector");
        return UnitVector::normalized(x, y, z);
    }
    if (v.is_object()) {
        check_keys(v, {"polar", "azimuth"}, {}, what);
        return UnitVector::from_angles(number(v.at("polar"), what), number(v.at("azimuth"), what));
    }
    throw SchemaError(what + ": direction must be [x,y,z] or {polar, azimuth}");
}

} // namespace detail

// ---------------------------------------------------------------- states

using AnyState = std::variant<BipartiteState, MultiQubitState, SymmetricState>;

inline const std::set<std::string>& known_families() {
    static const std::set<std::string> f{"maximally_entangled", "relative_phase", "werner",
                                         "angular_momentum_eigenstate", "rm_weighted", "product", "ghz", "dicke"};
    return f;
}

inline AnyState build_state(const json& node) {
    using detail::check_keys;
    using detail::integer;
    using detail::number;
    const std::string family = detail::require(node, "family", "state").get<std::string>();
    if (!known_families().count(family)) throw UnknownNameError("unknown state family '" + family + "'");
    const json p = detail::params_of(node);
    if (family == "maximally_entangled") {
        check_keys(p, {"n"}, {}, family);
        return maximally_entangled(integer(p.at("n"), "n"));
    }
    if (family == "relative_phase") {
        check_keys(p, {"n", "theta"}, {}, family);
        return relative_phase(integer(p.at("n"), "n"), number(p.at("theta"), "theta"));
    }
    if (family == "werner") {
        check_keys(p, {"n", "phi"}, {}, family);
        return werner(integer(p.at("n"), "n"), number(p.at("phi"), "phi"));
    }
    if (family == "angular_momentum_eigenstate") {
        check_keys(p, {"N_A", "N_B", "J", "K"}, {}, family);
        return angular_momentum_eigenstate(integer(p.at("N_A"), "N_A"), integer(p.at("N_B"), "N_B"),
                                           number(p.at("J"), "J"), number(p.at("K"), "K"));
    }
    if (family == "rm_weighted") {
        check_keys(p, {"s", "r"}, {}, family);
        if (!p.at("r").is_array()) throw SchemaError("rm_weighted: r must be an array");
        std::vector<double> r;
        for (const auto& v : p.at("r")) r.push_back(number(v, "r"));
        return rm_weighted(SpinQuantum::from_value(number(p.at("s"), "s")), r);
    }
    if (family == "product") {
        check_keys(p, {"s_a", "m_a", "s_b", "m_b"}, {}, family);
        const auto sa = SpinQuantum::from_value(number(p.at("s_a"), "s_a"));
        const auto sb = SpinQuantum::from_value(number(p.at("s_b"), "s_b"));
        return product_basis_state(sa, bellnl::detail::to_twice(number(p.at("m_a"), "m_a")), sb,
                                   bellnl::detail::to_twice(number(p.at("m_b"), "m_b")));
    }
    if (family == "ghz") {
        check_keys(p, {"n"}, {}, family);
        return ghz(integer(p.at("n"), "n"));
    }
    check_keys(p, {"N", "k"}, {}, family);
    return dicke(integer(p.at("N"), "N"), integer(p.at("k"), "k"));
}

template <class T>
const T& expect_state(const AnyState& s, const std::string& functional) {
    if (const T* p = std::get_if<T>(&s)) return *p;
    throw SchemaError("functional '" + functional + "' cannot be evaluated on this state family");
}

// ---------------------------------------------------------------- functionals

inline const std::set<std::string>& known_functionals() {
    static const std::set<std::string> f{"chsh",     "chsh_generalized", "mermin", "drummond", "mabk",
                                         "reid",     "reid_linear",      "cfrd",   "cfrd_quadrature",
                                         "cfrd_weights", "tura",         "cglmp",  "custom"};
    return f;
}

inline std::string functional_name(const json& spec) {
    const json& f = detail::require(spec, "functional", "spec");
    const std::string name = detail::require(f, "name", "functional").get<std::string>();
    if (!known_functionals().count(name)) throw UnknownNameError("unknown functional '" + name + "'");
    return name;
}

inline SearchConfig search_config(const json& spec, const Options& opt, bool seed_required) {
    SearchConfig cfg;
    cfg.threads = opt.threads;
    const json s = spec.contains("search") ? spec.at("search") : json::object();
    detail::check_keys(s, {}, {"restarts", "max_evals_per_restart", "tolerance", "seed", "coplanar"}, "search");
    if (s.contains("restarts")) cfg.restarts = detail::integer(s.at("restarts"), "restarts");
    if (s.contains("max_evals_per_restart"))
        cfg.max_evals_per_restart = detail::integer(s.at("max_evals_per_restart"), "max_evals_per_restart");
    if (s.contains("tolerance")) cfg.tolerance = detail::number(s.at("tolerance"), "tolerance");
    if (s.contains("coplanar")) cfg.coplanar = s.at("coplanar").get<bool>();
    if (opt.seed) {
        cfg.seed = *opt.seed;
    } else if (s.contains("seed")) {
        if (!s.at("seed").is_number_unsigned()) throw SchemaError("search.seed must be a non-negative integer");
        cfg.seed = s.at("seed").get<std::uint64_t>();
    } else if (seed_required) {
        throw SchemaError("optimize specs must carry search.seed (or --seed)");
    }
    cfg.validate();
    return cfg;
}

inline bool wants_optimization(const json& spec) {
    return spec.contains("settings") && spec.at("settings").is_string() && spec.at("settings") == "optimize";
}

/// Evaluate with explicit settings.
inline ViolationReport evaluate_fixed(const std::string& name, const json& spec) {
    const json f = spec.at("functional");
    const json p = detail::params_of(f);
    const json settings = spec.contains("settings") ? spec.at("settings") : json::object();
    auto dir = [&](const char* key) { return detail::direction(detail::require(settings, key, "settings"), key); };
    auto state = [&]() { return build_state(detail::require(spec, "state", "spec")); };

    if (name == "chsh" || name == "chsh_generalized") {
        detail::check_keys(p, {}, {}, name);
        detail::check_keys(settings, {"u1", "u2", "v1", "v2"}, {}, "settings");
        const auto s = state();
        auto r = chsh_value(expect_state<BipartiteState>(s, name), dir("u1"), dir("u2"), dir("v1"), dir("v2"));
        r.functional = name;
        return r;
    }
    if (name == "mermin") {
        detail::check_keys(p, {}, {"reading"}, name);
        const auto reading =
            p.contains("reading") ? mermin_reading_from_string(p.at("reading").get<std::string>()) : MerminReading::squared_difference;
        const auto s = state();
        const auto& st = expect_state<BipartiteState>(s, name);
        if (settings.contains("sin_theta")) {
            detail::check_keys(settings, {"sin_theta"}, {}, "settings");
            const auto m = mermin_coplanar(detail::number(settings.at("sin_theta"), "sin_theta"));
            auto r = mermin_check(st, m.a, m.b, m.c, reading);
            r.parameters = {{"sin_theta", settings.at("sin_theta").get<double>()}};
            return r;
        }
        detail::check_keys(settings, {"a", "b", "c"}, {}, "settings");
        return mermin_check(st, dir("a"), dir("b"), dir("c"), reading);
    }
    if (name == "drummond") {
        detail::check_keys(p, {"J", "theta"}, {}, name);
        const double j = detail::number(p.at("J"), "J"), th = detail::number(p.at("theta"), "theta");
        auto r = make_report("drummond", drummond_margin(j, th), 0.0, BoundSense::upper);
        r.parameters = {{"J", j}, {"theta", th}};
        return r;
    }
    if (name == "mabk") {
        detail::check_keys(p, {}, {}, name);
        const auto s = state();
        return mabk_value(expect_state<MultiQubitState>(s, name));
    }
    if (name == "reid") {
        detail::check_keys(p, {}, {"zero_policy"}, name);
        detail::check_keys(settings, {"theta", "theta_star", "phi", "phi_star"}, {}, "settings");
        const auto zero = p.contains("zero_policy") ? zero_policy_from_string(p.at("zero_policy").get<std::string>())
                                                    : ZeroPolicy::plus;
        const auto s = state();
        return reid_ratio(expect_state<BipartiteState>(s, name), detail::number(settings.at("theta"), "theta"),
                          detail::number(settings.at("theta_star"), "theta_star"),
                          detail::number(settings.at("phi"), "phi"), detail::number(settings.at("phi_star"), "phi_star"),
                          zero);
    }
    if (name == "cfrd") {
        detail::check_keys(p, {}, {}, name);
        const auto s = state();
        const auto& st = expect_state<BipartiteState>(s, name);
        if (settings.empty()) return cfrd_spin_margin(st);
        detail::check_keys(settings, {"a1", "a2", "b1", "b2"}, {}, "settings");
        const auto ra = build_spin_rep(st.s_a()), rb = build_spin_rep(st.s_b());
        auto r = cfrd_margin(st, spin_matrix(ra, dir("a1")), spin_matrix(ra, dir("a2")), spin_matrix(rb, dir("b1")),
                             spin_matrix(rb, dir("b2")));
        r.settings = {dir("a1"), dir("a2"), dir("b1"), dir("b2")};
        return r;
    }
    if (name == "cfrd_quadrature") {
        detail::check_keys(p, {}, {}, name);
        const auto s = state();
        const auto& st = expect_state<BipartiteState>(s, name);
        auto r = make_report("cfrd_quadrature", cfrd_quadrature_margin(st), 0.0, BoundSense::lower);
        r.state = st.meta();
        return r;
    }
    if (name == "tura") {
        detail::check_keys(p, {}, {}, name);
        detail::check_keys(settings, {"n0", "n1"}, {}, "settings");
        const auto s = state();
        return tura_value(expect_state<SymmetricState>(s, name), dir("n0"), dir("n1"));
    }
    if (name == "cglmp") {
        detail::check_keys(p, {"d", "tables"}, {}, name);
        const int d = detail::integer(p.at("d"), "d");
        const json& t = p.at("tables");
        if (!t.is_array() || t.size() != 4) throw SchemaError("cglmp: tables must hold four d x d tables");
        std::array<RMatrix, 4> tables;
        for (std::size_t k = 0; k < 4; ++k) {
            if (!t[k].is_array() || t[k].size() != static_cast<std::size_t>(d))
                throw SchemaError("cglmp: table row count must equal d");
            tables[k].resize(d, d);
            for (int i = 0; i < d; ++i) {
                const json& row = t[k][static_cast<std::size_t>(i)];
                if (!row.is_array() || row.size() != static_cast<std::size_t>(d))
                    throw SchemaError("cglmp: table column count must equal d");
                for (int j = 0; j < d; ++j) tables[k](i, j) = detail::number(row[static_cast<std::size_t>(j)], "table");
            }
        }
        auto r = make_report("cglmp", cglmp_I(tables, d), 3.0, BoundSense::upper);
        r.extras = {{"stated_bound", 3.0}, {"general_bound", 4.0}};
        r.parameters = {{"d", static_cast<double>(d)}};
        return r;
    }
    throw SchemaError("functional '" + name + "' has no fixed-settings evaluation");
}

inline ViolationReport optimize(const std::string& name, const json& spec, const Options& opt) {
    const auto cfg = search_config(spec, opt, true);
    const json p = detail::params_of(spec.at("functional"));
    if (name == "cfrd_weights") {
        detail::check_keys(p, {"s"}, {}, name);
        return optimize_weights_cfrd(SpinQuantum::from_value(detail::number(p.at("s"), "s")), cfg);
    }
    const auto s = build_state(detail::require(spec, "state", "spec"));
    if (name == "tura") {
        detail::check_keys(p, {}, {}, name);
        return optimize_tura(expect_state<SymmetricState>(s, name), cfg);
    }
    const auto& st = expect_state<BipartiteState>(s, name);
    if (name == "chsh" || name == "chsh_generalized") {
        detail::check_keys(p, {}, {}, name);
        auto r = optimize_chsh(st, cfg);
        r.functional = name;
        return r;
    }
    if (name == "mermin") {
        detail::check_keys(p, {}, {"reading"}, name);
        const auto reading =
            p.contains("reading") ? mermin_reading_from_string(p.at("reading").get<std::string>()) : MerminReading::squared_difference;
        return optimize_mermin(st, cfg, reading);
    }
    if (name == "reid") {
        detail::check_keys(p, {}, {"zero_policy"}, name);
        const auto zero = p.contains("zero_policy") ? zero_policy_from_string(p.at("zero_policy").get<std::string>())
                                                    : ZeroPolicy::plus;
        return optimize_reid(st, cfg, zero);
    }
    if (name == "cfrd") {
        detail::check_keys(p, {}, {}, name);
        return optimize_cfrd(st, cfg);
    }
    throw SchemaError("functional '" + name + "' has no settings search");
}

// ---------------------------------------------------------------- lhv-bound

inline BellFunctional custom_functional(const json& f) {
    detail::check_keys(f, {"name", "scenario", "terms"}, {"params"}, "custom functional");
    const json& sc = f.at("scenario");
    detail::check_keys(sc, {"outcomes_a", "outcomes_b"}, {}, "scenario");
    BellFunctional out;
    out.name = "custom";
    auto lists = [](const json& v, const char* what) {
        if (!v.is_array()) throw SchemaError(std::string(what) + ": expected an array of outcome lists");
        std::vector<std::vector<double>> l;
        for (const auto& row : v) {
            if (!row.is_array()) throw SchemaError(std::string(what) + ": expected an outcome list");
            std::vector<double> o;
            for (const auto& x : row) o.push_back(detail::number(x, what));
            l.push_back(o);
        }
        return l;
    };
    out.scenario.outcomes_a = lists(sc.at("outcomes_a"), "outcomes_a");
    out.scenario.outcomes_b = lists(sc.at("outcomes_b"), "outcomes_b");
    out.scenario.validate();
    if (!f.at("terms").is_array()) throw SchemaError("terms: expected an array");
    auto index = [&](const json& t, const char* key, std::size_t limit) {
        const int i = detail::integer(detail::require(t, key, "term"), key);
        if (i < 0 || static_cast<std::size_t>(i) >= limit) throw ValidationError(std::string("term: ") + key + " out of range");
        return static_cast<std::size_t>(i);
    };
    for (const auto& t : f.at("terms")) {
        const std::string kind = detail::require(t, "kind", "term").get<std::string>();
        const double coeff = t.contains("coeff") ? detail::number(t.at("coeff"), "coeff") : 1.0;
        if (kind == "correlator") {
            detail::check_keys(t, {"kind", "a", "b"}, {"coeff"}, "term");
            out.terms.push_back(correlator_term(out.scenario, index(t, "a", out.scenario.settings_a()),
                                                index(t, "b", out.scenario.settings_b()), coeff));
        } else if (kind == "binned") {
            detail::check_keys(t, {"kind", "a", "b", "bins"}, {"coeff", "zero_policy"}, "term");
            const auto bins = t.at("bins").get<std::vector<std::string>>();
            if (bins.size() != 2) throw SchemaError("binned term needs two bins");
            const auto zero = t.contains("zero_policy") ? zero_policy_from_string(t.at("zero_policy").get<std::string>())
                                                        : ZeroPolicy::plus;
            out.terms.push_back(binned_probability_term(out.scenario, index(t, "a", out.scenario.settings_a()),
                                                        index(t, "b", out.scenario.settings_b()), bins[0] == "+",
                                                        bins[1] == "+", coeff, zero));
        } else if (kind == "shift") {
            detail::check_keys(t, {"kind", "a", "b", "shift"}, {"coeff"}, "term");
            out.terms.push_back(shifted_equality_term(out.scenario, index(t, "a", out.scenario.settings_a()),
                                                      index(t, "b", out.scenario.settings_b()),
                                                      detail::integer(t.at("shift"), "shift"), coeff));
        } else if (kind == "mean") {
            detail::check_keys(t, {"kind", "side", "setting"}, {"coeff"}, "term");
            const std::string side = t.at("side").get<std::string>();
            if (side != "A" && side != "B") throw SchemaError("mean term: side must be A or B");
            const Side sd = side == "A" ? Side::a : Side::b;
            out.terms.push_back(single_mean_term(out.scenario, sd,
                                                 index(t, "setting", sd == Side::a ? out.scenario.settings_a()
                                                                                   : out.scenario.settings_b()),
                                                 coeff));
        } else {
            throw SchemaError("unknown term kind '" + kind + "'");
        }
    }
    out.bound = BoundRule{BoundRule::Kind::lhv_enumeration, 0.0};
    out.validate();
    return out;
}

inline json lhv_bound(const std::string& name, const json& spec, const Options& opt) {
    const json& f = spec.at("functional");
    const json p = detail::params_of(f);
    json out = json::object();
    auto spin = [&](const char* key) {
        return p.contains(key) ? SpinQuantum::from_value(detail::number(p.at(key), key)) : SpinQuantum::from_two_s(1);
    };
    auto emit = [&](const BellFunctional& fn, Extremum ext) {
        const auto b = enumerate_lhv_bound(fn, ext, opt.threads);
        out["functional"] = name;
        out["extremum"] = ext == Extremum::max ? "max" : "min";
        out["value"] = io::number(b.value);
        out["witness"] = io::strategy_json(fn.scenario, b.witness);
        out["strategies"] = b.strategies;
        return b;
    };
    if (name == "chsh" || name == "chsh_generalized") {
        detail::check_keys(p, {}, {"s_a", "s_b"}, name);
        const auto sa = spin("s_a"), sb = spin("s_b");
        const auto b = emit(chsh_functional(sa, sb), Extremum::max);
        const double printed = 0.5 * sa.two_s * sb.two_s;
        out["half_product_of_numbers"] = io::number(printed);
        out["matches_half_product"] = std::abs(b.value - printed) <= 1e-12;
        return out;
    }
    if (name == "reid_linear" || name == "reid") {
        detail::check_keys(p, {}, {"s_a", "s_b", "zero_policy"}, name);
        const auto zero = p.contains("zero_policy") ? zero_policy_from_string(p.at("zero_policy").get<std::string>())
                                                    : ZeroPolicy::plus;
        emit(reid_linear_functional(spin("s_a"), spin("s_b"), zero), Extremum::max);
        return out;
    }
    if (name == "cglmp") {
        detail::check_keys(p, {"d"}, {}, name);
        const auto a = cglmp_adjudicate(detail::integer(p.at("d"), "d"), opt.threads);
        out["functional"] = name;
        out["extremum"] = "max";
        out["value"] = io::number(a.computed);
        out["witness"] = io::strategy_json(cglmp_functional(a.d).scenario, a.witness);
        out["stated_bound"] = io::number(a.stated);
        out["general_bound"] = io::number(a.general);
        out["agrees_with_stated"] = a.agrees_with_stated;
        out["within_general"] = a.within_general;
        out["verdict"] = a.verdict();
        return out;
    }
    if (name == "tura") {
        detail::check_keys(p, {"N"}, {}, name);
        const auto m = symmetric_lhv_min(detail::integer(p.at("N"), "N"));
        out["functional"] = name;
        out["extremum"] = "min";
        out["value"] = m.value;
        out["witness"] = json{{"pp", m.witness.pp}, {"pm", m.witness.pm}, {"mp", m.witness.mp}, {"mm", m.witness.mm}};
        out["respects_zero"] = m.value >= 0;
        return out;
    }
    if (name == "custom") {
        const std::string ext = p.contains("extremum") ? p.at("extremum").get<std::string>() : "max";
        if (ext != "max" && ext != "min") throw SchemaError("extremum must be max or min");
        emit(custom_functional(f), ext == "max" ? Extremum::max : Extremum::min);
        return out;
    }
    throw SchemaError("functional '" + name + "' has no local-bound oracle");
}

// ---------------------------------------------------------------- scan

inline std::vector<double> scan_grid(const json& g) {
    if (g.is_array()) {
        std::vector<double> v;
        for (const auto& x : g) v.push_back(detail::number(x, "grid"));
        return v;
    }
    detail::check_keys(g, {"start", "stop", "points"}, {}, "grid");
    return linear_grid(detail::number(g.at("start"), "start"), detail::number(g.at("stop"), "stop"),
                       detail::integer(g.at("points"), "points"));
}

/// Point `path` ("state.<param>" or "settings.<key>") of a spec copy at value v.
inline json spec_at(json spec, const std::string& path, double v) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) throw SchemaError("scan.parameter must be state.<name> or settings.<name>");
    const std::string head = path.substr(0, dot), key = path.substr(dot + 1);
    if (head == "state") {
        json& st = spec["state"];
        if (!st.is_object()) throw SchemaError("scan: spec has no state");
        st["params"][key] = v;
    } else if (head == "settings") {
        if (!spec.contains("settings") || !spec["settings"].is_object()) spec["settings"] = json::object();
        spec["settings"][key] = v;
    } else if (head == "functional") {
        spec["functional"]["params"][key] = v;
    } else {
        throw SchemaError("scan.parameter must start with state., settings. or functional.");
    }
    return spec;
}

inline ScanTable scan(const std::string& name, const json& spec, const Options& opt) {
    const json& s = detail::require(spec, "scan", "spec");
    detail::check_keys(s, {"parameter", "grid"}, {"optimize"}, "scan");
    const std::string path = s.at("parameter").get<std::string>();
    const bool per_point = s.contains("optimize") && s.at("optimize").get<bool>();
    if (per_point) search_config(spec, opt, true);
    ScanSpec ss;
    ss.parameter = path;
    ss.grid = scan_grid(s.at("grid"));
    ss.evaluate = [&](double v) {
        const json at = spec_at(spec, path, v);
        return per_point ? optimize(name, at, opt) : evaluate_fixed(name, at);
    };
    return scan_parameter(ss);
}

// ---------------------------------------------------------------- dispatch

inline Outcome execute(const std::string& command, json spec, const Options& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!spec.is_object()) throw SchemaError("spec must be a JSON object");
    spec["command"] = command;
    if (opt.seed) spec["search"]["seed"] = *opt.seed;

    Outcome out;
    json env = json::object();
    env["tool"] = kToolName;
    env["version"] = kVersion;
    env["command"] = command;

    if (command == "selftest") {
        const auto checks = selftest::run_all();
        json arr = json::array();
        bool all = true;
        for (const auto& c : checks) {
            arr.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            all = all && c.passed;
        }
        env["spec"] = spec;
        env["seed"] = nullptr;
        env["selftest"] = json{{"passed", all}, {"checks", arr}};
        out.summary = std::string("selftest: ") + (all ? "all checks passed" : "FAILURES");
    } else {
        const std::string name = functional_name(spec);
        // Unknown names take precedence over schema problems elsewhere in the spec.
        if (spec.contains("state") && spec["state"].is_object() && spec["state"].contains("family") &&
            spec["state"]["family"].is_string() && !known_families().count(spec["state"]["family"].get<std::string>()))
            throw UnknownNameError("unknown state family '" + spec["state"]["family"].get<std::string>() + "'");
        if (command == "evaluate") {
            const bool opt_mode = wants_optimization(spec);
            out.report = opt_mode ? optimize(name, spec, opt) : evaluate_fixed(name, spec);
            if (opt_mode) out.report->seed = search_config(spec, opt, true).seed;
        } else if (command == "optimize") {
            out.report = optimize(name, spec, opt);
        } else if (command == "lhv-bound") {
            env["bound"] = lhv_bound(name, spec, opt);
            out.summary = "lhv-bound " + name + ": " + env["bound"]["value"].dump();
        } else if (command == "scan") {
            out.table = scan(name, spec, opt);
            out.summary = "scan " + name + ": " + std::to_string(out.table->rows.size()) + " rows";
        } else {
            throw SchemaError("unknown command '" + command + "'");
        }
        env["spec"] = spec;
        const bool has_seed = spec.contains("search") && spec["search"].contains("seed");
        env["seed"] = has_seed ? spec["search"]["seed"] : json(nullptr);
        if (out.report) {
            env["report"] = io::report_json(*out.report);
            out.summary = out.report->functional + ": value " + io::format12(out.report->value) + ", bound " +
                          io::format12(out.report->bound) + ", margin " + io::format12(out.report->margin) +
                          (out.report->violated ? " (violated)" : " (not violated)");
        }
        if (out.table) env["table"] = io::table_json(*out.table);
    }
    env["wall_time_s"] = io::number(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    out.envelope = std::move(env);
    return out;
}

inline std::string render(const Outcome& o, const std::string& format) {
    if (format == "json") return o.envelope.dump(2) + "\n";
    if (format == "csv") {
        if (o.table) return io::table_csv(*o.table);
        if (o.report) return io::report_csv(*o.report);
        throw SchemaError("csv output is only available for reports and scan tables");
    }
    throw SchemaError("unknown output format '" + format + "'");
}

/// Full pipeline: parse `spec_text`, execute, write. Returns the exit code;
/// diagnostics and the human summary go to `err`.
inline int run(const std::string& spec_text, const Options& opt, std::ostream& err, std::ostream& stdout_sink) {
    try {
        json spec;
        try {
            spec = json::parse(spec_text);
        } catch (const json::parse_error& e) {
            err << "error: malformed JSON spec: " << e.what() << "\n";
            return kMalformed;
        }
        std::string command = opt.command;
        if (command.empty()) {
            if (!spec.is_object() || !spec.contains("command") || !spec.at("command").is_string())
                throw SchemaError("no command given");
            command = spec.at("command").get<std::string>();
        }
        std::string format = "json";
        std::optional<std::string> path;
        if (spec.is_object() && spec.contains("output")) {
            const json& o = spec.at("output");
            detail::check_keys(o, {}, {"path", "format"}, "output");
            if (o.contains("format")) format = o.at("format").get<std::string>();
            if (o.contains("path")) path = o.at("path").get<std::string>();
        }
        if (opt.format) format = *opt.format;
        if (opt.out) path = opt.out;
        if (format != "json" && format != "csv") throw SchemaError("unknown output format '" + format + "'");

        const Outcome o = execute(command, spec, opt);
        const std::string text = render(o, format);
        if (path) {
            std::ofstream f(*path, std::ios::binary);
            if (!f) throw UnwritableError("cannot open '" + *path + "' for writing");
            f << text;
            f.close();
            if (!f) throw UnwritableError("failed writing '" + *path + "'");
        } else {
            stdout_sink << text;
        }
        err << o.summary << "\n";
        if (o.envelope.contains("selftest") && !o.envelope["selftest"]["passed"].get<bool>()) return kFailure;
        return kOk;
    } catch (const UnknownNameError& e) {
        err << "error: " << e.what() << "\n";
        return kUnknownName;
    } catch (const CapacityError& e) {
        err << "error: capacity exceeded: " << e.what() << "\n";
        return kCapacity;
    } catch (const UnwritableError& e) {
        err << "error: " << e.what() << "\n";
        return kUnwritable;
    } catch (const SchemaError& e) {
        err << "error: invalid spec: " << e.what() << "\n";
        return kMalformed;
    } catch (const ValidationError& e) {
        err << "error: invalid input: " << e.what() << "\n";
        return kMalformed;
    } catch (const DegenerateConditionError& e) {
        err << "error: degenerate input: " << e.what() << "\n";
        return kMalformed;
    } catch (const json::exception& e) {
        err << "error: invalid spec: " << e.what() << "\n";
        return kMalformed;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
}

} // namespace bellnl::cli
