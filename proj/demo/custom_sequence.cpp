// Parses a hand-written sequence, runs it symbolically and numerically.
#include <iostream>

#include "rephase/rephase.hpp"

int main() {
    const char *text = R"(
        rg alpha
        ro pi
        emit w1
        detect D- tau
        wait T
        rg pi
        ro pi
        wait t1
        ro pi
        wait T - t1
    )";
    rephase::Sequence seq = rephase::parse(text, "hand_written");
    rephase::EmitterPair p;
    auto r = rephase::run(seq, p);
    std::cout << rephase::render(seq) << "\nphase:   " << r.report.relative_phase
              << "\nunknown: " << r.report.unknown_part << "\nsign:    " << r.report.heralded_sign << "\n";
}
