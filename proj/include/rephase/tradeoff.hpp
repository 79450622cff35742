#pragma once

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rephase/fidelity.hpp"

namespace rephase {

struct TradeoffResult {
    StrategyParams params;
    double target = 0.0;
    double f_a_max = 0.0;
    double t_c = 0.0;
    double relative_rate = 0.0;  // accepted events per attempt, i.e. f_a_max
    bool unreachable = false;
};

/// Largest acceptance fraction whose mean fidelity still meets `target`,
/// by bisection on the non-increasing curve F(f_A).
inline TradeoffResult max_acceptance(const StrategyParams &p, double target, double tol = 1e-9) {
    p.validate();
    if (!(target > 0.5 && target < 1.0)) {
        throw std::invalid_argument("invalid target fidelity: must lie in (0.5, 1)");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("tolerance must be positive");
    }
    TradeoffResult r{p, target, 0.0, 0.0, 0.0, false};
    auto F = [&](double f) { return fidelity(p, f); };
    if (F(1.0) >= target) {
        r.f_a_max = 1.0;
    } else if (F(std::min(tol, 1e-12)) < target) {
        r.unreachable = true;
    } else {
        double lo = 0.0;  // F(0+) = 1 >= target
        double hi = 1.0;  // F(hi) < target
        while (hi - lo > tol) {
            double mid = 0.5 * (lo + hi);
            (F(mid) >= target ? lo : hi) = mid;
        }
        r.f_a_max = lo;
    }
    r.relative_rate = r.f_a_max;
    r.t_c = r.f_a_max > 0.0 ? acceptance_to_cutoff(r.f_a_max, p.gamma_b) : 0.0;
    return r;
}

/// One result per strategy point, best rate first. Ties keep input order.
inline std::vector<TradeoffResult> compare(const std::vector<StrategyParams> &sets, double target, double tol = 1e-9) {
    if (sets.empty()) {
        throw std::invalid_argument("compare needs at least one strategy");
    }
    std::vector<TradeoffResult> out;
    out.reserve(sets.size());
    for (const auto &p : sets) {
        out.push_back(max_acceptance(p, target, tol));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const TradeoffResult &a, const TradeoffResult &b) { return a.relative_rate > b.relative_rate; });
    return out;
}

inline void write_tradeoff_csv(std::ostream &os, const std::vector<TradeoffResult> &rows) {
    os << "strategy,x_or_theta,target_F,f_A_max,t_c,relative_rate,reachable\n";
    for (const auto &r : rows) {
        os << to_string(r.params.strategy) << ',' << format_double(r.params.param) << ',' << format_double(r.target)
           << ',' << format_double(r.f_a_max) << ',' << format_double(r.t_c) << ',' << format_double(r.relative_rate)
           << ',' << (r.unreachable ? "no" : "yes") << '\n';
    }
}

inline void write_tradeoff_table(std::ostream &os, const std::vector<TradeoffResult> &rows) {
    auto cell = [](double v) {
        std::ostringstream s;
        s << std::setprecision(10) << v;
        return s.str();
    };
    os << std::left << std::setw(12) << "strategy" << std::setw(14) << "x_or_theta" << std::setw(14) << "target_F"
       << std::setw(18) << "f_A_max" << std::setw(18) << "t_c" << "relative_rate\n";
    for (const auto &r : rows) {
        os << std::left << std::setw(12) << to_string(r.params.strategy) << std::setw(14) << cell(r.params.param)
           << std::setw(14) << cell(r.target) << std::setw(18) << cell(r.f_a_max) << std::setw(18) << cell(r.t_c)
           << cell(r.relative_rate) << (r.unreachable ? "  (unreachable)" : "") << '\n';
    }
}

}  // namespace rephase
