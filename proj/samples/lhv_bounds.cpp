// Local bounds by deterministic-strategy enumeration.

#include "bellnl/bellnl.hpp"

#include <cstdio>

int main() {
    using namespace bellnl;
    for (int two_s = 1; two_s <= 4; ++two_s) {
        const auto s = SpinQuantum::from_two_s(two_s);
        const auto b = enumerate_lhv_bound(chsh_functional(s, s));
        std::printf("generalized CHSH, s = %.1f: max = %g (1/2 N_A N_B = %g)\n", s.value(), b.value,
                    0.5 * two_s * two_s);
    }
    for (int d = 2; d <= 5; ++d) std::printf("%s\n", cglmp_adjudicate(d).verdict().c_str());
    for (int n : {1, 10, 100}) std::printf("symmetric W, N = %d: min = %lld\n", n, symmetric_lhv_min(n).value);
}
