// Settings search for the symmetric two-setting functional on Dicke states.

#include "bellnl/bellnl.hpp"

#include <cstdio>

int main(int argc, char** argv) {
    using namespace bellnl;
    const int n = argc > 1 ? std::atoi(argv[1]) : 10;
    SearchConfig cfg;
    cfg.seed = 7;
    cfg.restarts = 16;
    for (int k = 0; k <= n; ++k) {
        const auto r = optimize_tura(dicke(n, k), cfg);
        std::printf("N = %d, k = %2d: min W = %+.6f%s\n", n, k, r.value, r.violated ? "  (violated)" : "");
    }
}
