#pragma once

// JSON and CSV serialization of reports, bounds and scan tables.

#include "bellnl/lhv.hpp"
#include "bellnl/report.hpp"
#include "bellnl/search.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace bellnl::io {

using json = nlohmann::ordered_json;

inline constexpr int kSignificantDigits = 12;

/// Round to 12 significant digits so the printed value parses back exactly.
inline double round12(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
    return std::strtod(buf, nullptr);
}

inline std::string format12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", kSignificantDigits, v);
    return buf;
}

inline json number(double v) {
    if (!std::isfinite(v)) return json(nullptr);
    return json(round12(v));
}

inline json vector_json(const UnitVector& u) { return json::array({number(u.x()), number(u.y()), number(u.z())}); }

inline json pairs_json(const std::vector<std::pair<std::string, double>>& p) {
    json o = json::object();
    for (const auto& [k, v] : p) o[k] = number(v);
    return o;
}

inline json state_json(const StateMeta& m) {
    json o = json::object();
    o["family"] = m.family;
    o["params"] = pairs_json(m.params);
    o["N_A"] = m.n_a;
    o["N_B"] = m.n_b;
    return o;
}

inline json report_json(const ViolationReport& r) {
    json o = json::object();
    o["functional"] = r.functional;
    o["value"] = number(r.value);
    o["bound"] = number(r.bound);
    o["margin"] = number(r.margin);
    o["sense"] = to_string(r.sense);
    o["violated"] = r.violated;
    o["tolerance"] = number(r.tolerance);
    json s = json::array();
    for (const auto& u : r.settings) s.push_back(vector_json(u));
    o["settings"] = s;
    o["parameters"] = pairs_json(r.parameters);
    o["extras"] = pairs_json(r.extras);
    o["state"] = state_json(r.state);
    if (r.seed) o["seed"] = *r.seed;
    else o["seed"] = nullptr;
    return o;
}

inline json strategy_json(const Scenario& sc, const DeterministicStrategy& s) {
    json o = json::object();
    json a = json::array(), b = json::array();
    for (std::size_t i = 0; i < s.a.size(); ++i) a.push_back(number(sc.outcomes_a[i][s.a[i]]));
    for (std::size_t j = 0; j < s.b.size(); ++j) b.push_back(number(sc.outcomes_b[j][s.b[j]]));
    o["A"] = a;
    o["B"] = b;
    return o;
}

inline json table_json(const ScanTable& t) {
    json o = json::object();
    o["parameter"] = t.parameter;
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::object();
        row["parameter"] = number(r.parameter);
        row["report"] = report_json(r.report);
        rows.push_back(row);
    }
    o["rows"] = rows;
    return o;
}

inline std::string settings_csv(const std::vector<UnitVector>& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (k) out += ' ';
        out += format12(s[k].x()) + ':' + format12(s[k].y()) + ':' + format12(s[k].z());
    }
    return out;
}

/// Header plus one row per grid point.
inline std::string table_csv(const ScanTable& t) {
    std::ostringstream os;
    os << t.parameter << ",value,bound,margin,violated,settings\n";
    for (const auto& r : t.rows)
        os << format12(r.parameter) << ',' << format12(r.report.value) << ',' << format12(r.report.bound) << ','
           << format12(r.report.margin) << ',' << (r.report.violated ? 1 : 0) << ',' << settings_csv(r.report.settings)
           << '\n';
    return os.str();
}

inline std::string report_csv(const ViolationReport& r) {
    std::ostringstream os;
    os << "functional,value,bound,margin,violated,settings\n";
    os << r.functional << ',' << format12(r.value) << ',' << format12(r.bound) << ',' << format12(r.margin) << ','
       << (r.violated ? 1 : 0) << ',' << settings_csv(r.settings) << '\n';
    return os.str();
}

} // namespace bellnl::io
