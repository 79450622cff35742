// Prints the heralded relative phase of every built-in sequence and the part
// of it that depends on unknown emitter frequencies.
#include <iostream>

#include "rephase/rephase.hpp"

int main() {
    rephase::RunOptions opts;
    opts.assume_correlated_shelf = true;
    for (auto name : rephase::kBuiltinNames) {
        auto r = rephase::run(rephase::builtin(name), rephase::EmitterPair{}, opts);
        std::cout << name << "\n  phase:    " << r.report.relative_phase << "\n  unknown:  " << r.report.unknown_part
                  << "\n";
    }
}
