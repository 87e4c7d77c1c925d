// Optimized CHSH value of the spin-1/2 singlet against the local bound.

#include "bellnl/bellnl.hpp"

#include <cstdio>

int main() {
    using namespace bellnl;
    const auto singlet = angular_momentum_eigenstate(1, 1, 0.0, 0.0);
    SearchConfig cfg;
    cfg.seed = 1;
    cfg.restarts = 8;
    const auto r = optimize_chsh(singlet, cfg);
    std::printf("|S| = %.9f  bound = %.3f  violated = %s\n", std::abs(r.value), r.bound, r.violated ? "yes" : "no");
    for (const auto& u : r.settings) std::printf("  (%+.6f, %+.6f, %+.6f)\n", u.x(), u.y(), u.z());
}
