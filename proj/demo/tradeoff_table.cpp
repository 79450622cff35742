// Acceptance fraction needed for F >= 0.9, rephasing against post-selection.
#include <iostream>

#include "rephase/rephase.hpp"

int main() {
    using rephase::Strategy;
    std::vector<rephase::StrategyParams> sets = {
        {Strategy::rephase, 0.01}, {Strategy::rephase, 0.1}, {Strategy::rephase, 1.0},
        {Strategy::postselect, 0.1}, {Strategy::postselect, 1.0}, {Strategy::postselect, 10.0},
    };
    rephase::write_tradeoff_table(std::cout, rephase::compare(sets, 0.9));

    // Monte Carlo check of one point.
    auto e = rephase::mc_strategy({Strategy::rephase, 0.1}, 0.5, 200000, 1);
    std::cout << "\nmc x=0.1 f_A=0.5: " << e.mean << " +- " << e.stderr_ << "  (closed form " << rephase::f_rp(0.1, 0.5)
              << ")\n";
}
