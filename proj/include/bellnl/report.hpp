#pragma once

#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bellnl {

inline constexpr double kViolationTolerance = 1e-9;

/// How a functional's classical bound reads.
///   abs_upper: |value| <= bound
///   upper:     value <= bound
///   lower:     value >= bound
enum class BoundSense { abs_upper, upper, lower };

inline const char* to_string(BoundSense s) {
    switch (s) {
    case BoundSense::abs_upper: return "abs_upper";
    case BoundSense::upper: return "upper";
    case BoundSense::lower: return "lower";
    }
    return "?";
}

inline std::optional<BoundSense> bound_sense_from_string(const std::string& s) {
    if (s == "abs_upper") return BoundSense::abs_upper;
    if (s == "upper") return BoundSense::upper;
    if (s == "lower") return BoundSense::lower;
    return std::nullopt;
}

struct ViolationReport {
    std::string functional;
    double value = 0.0;
    double bound = 0.0;
    double margin = 0.0;
    BoundSense sense = BoundSense::abs_upper;
    double tolerance = kViolationTolerance;
    bool violated = false;
    std::vector<UnitVector> settings;
    std::vector<std::pair<std::string, double>> parameters;
    std::vector<std::pair<std::string, double>> extras;
    StateMeta state;
    std::optional<std::uint64_t> seed;
    double wall_time_s = 0.0;

    /// Positive exactly when the bound is broken, in every sense.
    [[nodiscard]] double violation_amount() const { return sense == BoundSense::lower ? -margin : margin; }

    [[nodiscard]] std::optional<double> extra(const std::string& key) const {
        for (const auto& [k, v] : extras)
            if (k == key) return v;
        return std::nullopt;
    }
};

inline ViolationReport make_report(std::string functional, double value, double bound, BoundSense sense,
                                   double tolerance = kViolationTolerance) {
    ViolationReport r;
    r.functional = std::move(functional);
    r.value = value;
    r.bound = bound;
    r.sense = sense;
    r.tolerance = tolerance;
    r.margin = sense == BoundSense::abs_upper ? std::abs(value) - bound : value - bound;
    r.violated = r.violation_amount() > tolerance;
    return r;
}

} // namespace bellnl
