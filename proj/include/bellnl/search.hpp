#pragma once

// Multi-start pattern search over measurement angles (and CFRD weights),
// plus parameter scans.

#include "bellnl/errors.hpp"
#include "bellnl/functionals.hpp"
#include "bellnl/report.hpp"
#include "bellnl/spin.hpp"
#include "bellnl/states.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace bellnl {

struct SearchConfig {
    int restarts = 32;
    int max_evals_per_restart = 2000;
    double tolerance = 1e-8;
    std::uint64_t seed = 0;
    bool coplanar = false; // directions restricted to the x-z plane
    unsigned threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (restarts < 1) throw ValidationError("SearchConfig: restarts must be >= 1");
        if (max_evals_per_restart < 1) throw ValidationError("SearchConfig: max_evals_per_restart must be >= 1");
        if (!(tolerance > 0.0)) throw ValidationError("SearchConfig: tolerance must be > 0");
    }
};

/// Independent generator for one restart.
inline std::mt19937_64 restart_stream(std::uint64_t seed, int restart) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(restart), 0x6a09e667u};
    return std::mt19937_64(seq);
}

struct LocalResult {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    int evals = 0;
};

/// Coordinate-wise pattern search (minimizes f). Steps start at `step` and
/// halve after every sweep without improvement.
inline LocalResult pattern_search(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                  int max_evals, double tol, double step = 0.5) {
    LocalResult r;
    r.fx = f(x);
    r.evals = 1;
    while (step >= tol && r.evals < max_evals) {
        bool improved = false;
        for (std::size_t k = 0; k < x.size() && r.evals < max_evals; ++k) {
            for (const double dir : {+1.0, -1.0}) {
                if (r.evals >= max_evals) break;
                const double keep = x[k];
                x[k] = keep + dir * step;
                const double fy = f(x);
                ++r.evals;
                if (fy < r.fx) {
                    r.fx = fy;
                    improved = true;
                    break;
                }
                x[k] = keep;
            }
        }
        if (!improved) step *= 0.5;
    }
    r.x = std::move(x);
    return r;
}

struct MultiStartResult {
    LocalResult best;
    int best_restart = 0;
    std::vector<double> per_restart; // final objective of every restart
};

/// Restarts run concurrently; the winner is the lowest objective, ties to the
/// lowest restart index, so the result is independent of scheduling.
inline MultiStartResult multistart_minimize(const std::function<double(const std::vector<double>&)>& f,
                                            const std::function<std::vector<double>(std::mt19937_64&)>& start,
                                            const SearchConfig& cfg) {
    cfg.validate();
    std::vector<LocalResult> results(static_cast<std::size_t>(cfg.restarts));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next++; i < cfg.restarts; i = next++) {
            auto rng = restart_stream(cfg.seed, i);
            results[static_cast<std::size_t>(i)] =
                pattern_search(f, start(rng), cfg.max_evals_per_restart, cfg.tolerance);
        }
    };
    unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.restarts));
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    MultiStartResult out;
    for (int i = 0; i < cfg.restarts; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        out.per_restart.push_back(r.fx);
        if (i == 0 || r.fx < out.best.fx) {
            out.best = r;
            out.best_restart = i;
        }
    }
    return out;
}

// ---------------------------------------------------------------- angle helpers

namespace detail {

/// Objective wrapper turning NaN or thrown degeneracies into +inf.
template <class F>
double guarded(F&& f) {
    try {
        const double v = f();
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const DegenerateConditionError&) {
        return std::numeric_limits<double>::infinity();
    }
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

} // namespace detail

/// Directions from angles: two per vector (polar, azimuth), or one (x-z plane) when coplanar.
inline std::vector<UnitVector> directions_from_angles(const std::vector<double>& x, std::size_t count, bool coplanar) {
    std::vector<UnitVector> out;
    for (std::size_t k = 0; k < count; ++k) {
        if (coplanar) out.push_back(UnitVector::normalized(std::sin(x[k]), 0.0, std::cos(x[k])));
        else out.push_back(UnitVector::from_angles(x[2 * k], x[2 * k + 1]));
    }
    return out;
}

/// Isotropic random start in the matching angle layout.
inline std::vector<double> random_direction_angles(std::mt19937_64& rng, std::size_t count, bool coplanar) {
    std::vector<double> x;
    for (std::size_t k = 0; k < count; ++k) {
        if (coplanar) {
            x.push_back(detail::uniform(rng, 0.0, 2.0 * std::numbers::pi));
        } else {
            x.push_back(std::acos(detail::uniform(rng, -1.0, 1.0)));
            x.push_back(detail::uniform(rng, 0.0, 2.0 * std::numbers::pi));
        }
    }
    return x;
}

/// Canonical (polar in [0, pi], azimuth in [0, 2 pi)) angles of a direction.
inline std::vector<std::pair<std::string, double>> angle_parameters(const std::vector<UnitVector>& dirs,
                                                                    const std::vector<std::string>& names) {
    std::vector<std::pair<std::string, double>> p;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        double az = dirs[k].azimuth();
        if (az < 0.0) az += 2.0 * std::numbers::pi;
        p.emplace_back(names[k] + ".polar", dirs[k].polar());
        p.emplace_back(names[k] + ".azimuth", az);
    }
    return p;
}

/// Run a direction search: `eval` maps directions to a report; the objective
/// is the negated violation amount.
inline ViolationReport optimize_directions(std::size_t count, const std::vector<std::string>& names,
                                           const std::function<ViolationReport(const std::vector<UnitVector>&)>& eval,
                                           const SearchConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    auto objective = [&](const std::vector<double>& x) {
        return detail::guarded([&] { return -eval(directions_from_angles(x, count, cfg.coplanar)).violation_amount(); });
    };
    auto start = [&](std::mt19937_64& rng) { return random_direction_angles(rng, count, cfg.coplanar); };
    const auto ms = multistart_minimize(objective, start, cfg);
    const auto dirs = directions_from_angles(ms.best.x, count, cfg.coplanar);
    ViolationReport r = eval(dirs);
    r.settings = dirs;
    r.parameters = angle_parameters(dirs, names);
    r.seed = cfg.seed;
    r.extras.emplace_back("restarts", cfg.restarts);
    r.extras.emplace_back("best_restart", ms.best_restart);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------- per-functional searches

inline ViolationReport optimize_chsh(const BipartiteState& st, const SearchConfig& cfg) {
    const auto ra = build_spin_rep(st.s_a());
    const auto rb = build_spin_rep(st.s_b());
    return optimize_directions(
        4, {"u1", "u2", "v1", "v2"},
        [&](const std::vector<UnitVector>& d) { return chsh_value(st, ra, rb, d[0], d[1], d[2], d[3]); }, cfg);
}

inline ViolationReport optimize_mermin(const BipartiteState& st, const SearchConfig& cfg,
                                       MerminReading reading = MerminReading::squared_difference) {
    return optimize_directions(
        3, {"a", "b", "c"},
        [&](const std::vector<UnitVector>& d) { return mermin_check(st, d[0], d[1], d[2], reading); }, cfg);
}

/// Four angles theta, theta*, phi, phi* entering S_z cos 2t + S_x sin 2t.
inline ViolationReport optimize_reid(const BipartiteState& st, const SearchConfig& cfg,
                                     ZeroPolicy zero = ZeroPolicy::plus) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto ra = build_spin_rep(st.s_a());
    const auto rb = build_spin_rep(st.s_b());
    auto eval = [&](const std::vector<double>& x) { return reid_ratio(st, ra, rb, x[0], x[1], x[2], x[3], zero); };
    auto objective = [&](const std::vector<double>& x) {
        return detail::guarded([&] { return -eval(x).violation_amount(); });
    };
    auto start = [](std::mt19937_64& rng) {
        std::vector<double> x(4);
        for (auto& v : x) v = detail::uniform(rng, 0.0, std::numbers::pi);
        return x;
    };
    const auto ms = multistart_minimize(objective, start, cfg);
    auto r = eval(ms.best.x);
    r.seed = cfg.seed;
    r.extras.emplace_back("restarts", cfg.restarts);
    r.extras.emplace_back("best_restart", ms.best_restart);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

/// CFRD with four spin components along searched directions.
inline ViolationReport optimize_cfrd(const BipartiteState& st, const SearchConfig& cfg) {
    const auto ra = build_spin_rep(st.s_a());
    const auto rb = build_spin_rep(st.s_b());
    return optimize_directions(
        4, {"a1", "a2", "b1", "b2"},
        [&](const std::vector<UnitVector>& d) {
            auto r = cfrd_margin(st, spin_matrix(ra, d[0]), spin_matrix(ra, d[1]), spin_matrix(rb, d[2]),
                                 spin_matrix(rb, d[3]));
            r.settings = d;
            return r;
        },
        cfg);
}

inline ViolationReport optimize_tura(const SymmetricState& st, const SearchConfig& cfg) {
    const auto rep = build_spin_rep(SpinQuantum::from_two_s(st.n_atoms));
    const auto moments = tura_moments(st, rep);
    auto best = optimize_directions(
        2, {"n0", "n1"},
        [&](const std::vector<UnitVector>& d) {
            auto r = make_report("tura", tura_w(moments, d[0], d[1]), 0.0, BoundSense::lower);
            r.settings = {d[0], d[1]};
            return r;
        },
        cfg);
    // Full report at the optimum from the operator path.
    auto full = tura_value(st, rep, best.settings[0], best.settings[1]);
    best.value = full.value;
    best.margin = full.margin;
    best.violated = full.violated;
    best.extras.insert(best.extras.begin(), full.extras.begin(), full.extras.end());
    best.state = full.state;
    return best;
}

/// Dispatch by functional name for bipartite states.
inline ViolationReport optimize_settings(const BipartiteState& st, const std::string& functional,
                                         const SearchConfig& cfg) {
    if (functional == "chsh") return optimize_chsh(st, cfg);
    if (functional == "mermin") return optimize_mermin(st, cfg);
    if (functional == "reid") return optimize_reid(st, cfg);
    if (functional == "cfrd") return optimize_cfrd(st, cfg);
    throw ValidationError("optimize_settings: functional '" + functional + "' has no bipartite settings search");
}

// ---------------------------------------------------------------- CFRD weights

/// Unit vector from d - 1 hyperspherical angles.
inline std::vector<double> hyperspherical(const std::vector<double>& angles) {
    std::vector<double> r(angles.size() + 1);
    double carry = 1.0;
    for (std::size_t k = 0; k < angles.size(); ++k) {
        r[k] = carry * std::cos(angles[k]);
        carry *= std::sin(angles[k]);
    }
    r.back() = carry;
    return r;
}

inline constexpr double kMaxCfrdSpin = 10.0;

/// Searches weights r_m of sum_m r_m |s,m>|s,m> together with the four spin
/// directions, minimizing the CFRD margin.
inline ViolationReport optimize_weights_cfrd(SpinQuantum s, const SearchConfig& cfg) {
    cfg.validate();
    if (s.value() > kMaxCfrdSpin) throw ValidationError("optimize_weights_cfrd: s must be <= 10");
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = build_spin_rep(s);
    const auto nw = static_cast<std::size_t>(s.dim() - 1);

    auto eval = [&](const std::vector<double>& x) {
        const std::vector<double> w = hyperspherical(std::vector<double>(x.begin(), x.begin() + static_cast<long>(nw)));
        const auto dirs =
            directions_from_angles(std::vector<double>(x.begin() + static_cast<long>(nw), x.end()), 4, cfg.coplanar);
        const auto st = rm_weighted(s, w);
        auto r = cfrd_margin(st, spin_matrix(rep, dirs[0]), spin_matrix(rep, dirs[1]), spin_matrix(rep, dirs[2]),
                             spin_matrix(rep, dirs[3]));
        r.settings = dirs;
        for (std::size_t m = 0; m < w.size(); ++m) r.parameters.emplace_back("r" + std::to_string(m), w[m]);
        return r;
    };
    auto objective = [&](const std::vector<double>& x) {
        return detail::guarded([&] { return -eval(x).violation_amount(); });
    };
    auto start = [&](std::mt19937_64& rng) {
        std::vector<double> x;
        for (std::size_t k = 0; k < nw; ++k) x.push_back(detail::uniform(rng, 0.0, std::numbers::pi));
        const auto d = random_direction_angles(rng, 4, cfg.coplanar);
        x.insert(x.end(), d.begin(), d.end());
        return x;
    };
    const auto ms = multistart_minimize(objective, start, cfg);
    auto r = eval(ms.best.x);
    r.functional = "cfrd";
    r.seed = cfg.seed;
    r.state.family = "rm_weighted";
    r.state.n_a = r.state.n_b = s.two_s;
    r.extras.emplace_back("restarts", cfg.restarts);
    r.extras.emplace_back("best_restart", ms.best_restart);
    r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

// ---------------------------------------------------------------- scans

struct ScanRow {
    double parameter = 0.0;
    ViolationReport report;
};

struct ScanTable {
    std::string parameter;
    std::vector<ScanRow> rows;
};

/// Evenly spaced grid, both ends included.
inline std::vector<double> linear_grid(double lo, double hi, int points) {
    if (points < 1) throw ValidationError("linear_grid: need at least one point");
    std::vector<double> g;
    for (int i = 0; i < points; ++i)
        g.push_back(points == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
}

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ValidationError("scan: grid is empty");
    if (grid.size() < 2) return;
    const bool up = grid[1] > grid[0];
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (up ? !(grid[i] > grid[i - 1]) : !(grid[i] < grid[i - 1]))
            throw ValidationError("scan: grid must be strictly monotone");
}

struct ScanSpec {
    std::string parameter;
    std::vector<double> grid;
    std::function<ViolationReport(double)> evaluate; // fixed settings or per-point optimization inside
};

inline ScanTable scan_parameter(const ScanSpec& spec) {
    check_grid(spec.grid);
    if (!spec.evaluate) throw ValidationError("scan: no evaluator");
    ScanTable t;
    t.parameter = spec.parameter;
    for (double p : spec.grid) t.rows.push_back(ScanRow{p, spec.evaluate(p)});
    return t;
}

/// Adjacent grid points where the violation flag flips.
inline std::vector<std::pair<double, double>> violation_transitions(const ScanTable& t) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i < t.rows.size(); ++i)
        if (t.rows[i].report.violated != t.rows[i - 1].report.violated)
            out.emplace_back(t.rows[i - 1].parameter, t.rows[i].parameter);
    return out;
}

/// Bisection on violation_amount between a violating and a non-violating parameter.
inline Bracket refine_boundary(const std::function<ViolationReport(double)>& evaluate, double violating,
                               double non_violating, double tol) {
    auto g = [&](double u) {
        const double p = violating + u * (non_violating - violating);
        return evaluate(p).violation_amount();
    };
    const auto b = bisect_sign_change(g, 0.0, 1.0, tol / std::abs(non_violating - violating));
    const double span = non_violating - violating;
    return Bracket{violating + b.lo * span, violating + b.hi * span, b.iterations};
}

} // namespace bellnl
