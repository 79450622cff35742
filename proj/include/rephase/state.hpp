#pragma once

#include <cmath>
#include <compare>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rephase/phase.hpp"
#include "rephase/sequence.hpp"

namespace rephase {

/// Single-emitter basis, in the diagonal order of the rotating-frame
/// Hamiltonian: up_e, down_e, up_g, down_g.
enum class Level : std::uint8_t { up_e, down_e, up_g, down_g };

struct Ket {
    Level first;
    Level second;

    [[nodiscard]] Level at(int emitter) const { return emitter == 1 ? first : second; }
    [[nodiscard]] Ket with(int emitter, Level l) const {
        Ket k = *this;
        (emitter == 1 ? k.first : k.second) = l;
        return k;
    }
    friend auto operator<=>(const Ket &, const Ket &) = default;
};

inline std::string to_string(Level l) {
    switch (l) {
        case Level::up_e:
            return "↑e";
        case Level::down_e:
            return "↓e";
        case Level::up_g:
            return "↑g";
        case Level::down_g:
            return "↓g";
    }
    return "?";
}

inline std::string to_string(const Ket &k) { return "|" + to_string(k.first) + to_string(k.second) + "⟩"; }

class EngineError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Raised when a detection event is inconsistent with every coherent ket.
class HeraldError : public EngineError {
  public:
    using EngineError::EngineError;
};

/// Exact phases: each ket carries a LinearPhase and time bookkeeping stays
/// symbolic.
struct SymbolicPhases {
    using phase_type = LinearPhase;
    using time_type = TimeExpr;

    [[nodiscard]] time_type time(const TimeExpr &e) const { return e; }
    void add(phase_type &p, FreqSymbol f, const time_type &t, const Rational &c = 1) const {
        p += LinearPhase::product(FreqExpr(f), t, c);
    }
    void add_pi(phase_type &p, const Rational &c) const { p.add_pi(c); }
    [[nodiscard]] std::optional<bool> second_not_earlier(TimeSymbol, TimeSymbol) const { return std::nullopt; }
    void check_duration(const time_type &) const {}

    /// Coherent sum of two amplitudes landing on the same ket. Only possible
    /// when the symbolic parts agree and the constants differ by a multiple
    /// of pi, so the result stays a real magnitude times a phase.
    [[nodiscard]] std::pair<double, phase_type> merge(double ma, const phase_type &pa, double mb,
                                                      const phase_type &pb) const {
        if (pa.symbolic_part() != pb.symbolic_part()) {
            throw EngineError("interference between kets with different symbolic phases is not representable");
        }
        Rational diff = pb.pi_constant() - pa.pi_constant();
        if (!diff.is_integer()) {
            throw EngineError("interference with a non-real relative constant phase is not representable");
        }
        double m = ma + ((diff.num() % 2 == 0) ? mb : -mb);
        phase_type p = pa;
        if (m < 0) {
            m = -m;
            p.add_pi(1);
        }
        return {m, p};
    }
};

/// Numeric phases in radians for one concrete assignment of all symbols.
struct NumericPhases {
    using phase_type = double;
    using time_type = double;

    Valuation values;

    [[nodiscard]] time_type time(const TimeExpr &e) const { return evaluate(e, values); }
    void add(phase_type &p, FreqSymbol f, time_type t, const Rational &c = 1) const {
        p += c.to_double() * values.get(f) * t;
    }
    void add_pi(phase_type &p, const Rational &c) const { p += c.to_double() * std::numbers::pi; }
    [[nodiscard]] std::optional<bool> second_not_earlier(TimeSymbol first, TimeSymbol second) const {
        return values.get(second) >= values.get(first);
    }
    void check_duration(time_type d) const {
        if (d < 0.0) {
            throw EngineError("negative wait duration");
        }
    }
    [[nodiscard]] std::pair<double, phase_type> merge(double ma, phase_type pa, double mb, phase_type pb) const {
        std::complex<double> z = std::polar(ma, -pa) + std::polar(mb, -pb);
        return {std::abs(z), -std::arg(z)};
    }
};

/// Amplitude of one basis ket: magnitude * exp(-i phase).
template <class Policy>
struct Amplitude {
    double magnitude = 1.0;
    typename Policy::phase_type phase{};
    int origin = 0;                            // emitter that produced the first heralding photon, 0 before
    typename Policy::time_type shelf_time{};   // time spent in up_e (decays at gamma_a)
    typename Policy::time_type excited_time{}; // time spent in down_e outside emission windows (gamma_b)
};

struct Click {
    Detector detector;
    TimeSymbol time;
    std::string window;
};

/// Joint two-emitter state: a coherent superposition plus an incoherent
/// record of herald-impurity branches (kets where both emitters emitted but
/// only one photon was counted).
template <class Policy>
struct JointState {
    std::map<Ket, Amplitude<Policy>> kets;
    std::map<Ket, double> impurity;
    std::vector<Click> clicks;
    typename Policy::time_type clock{};

    static JointState initial() {
        JointState s;
        s.kets.emplace(Ket{Level::up_g, Level::up_g}, Amplitude<Policy>{});
        return s;
    }

    [[nodiscard]] double norm() const {
        double n = 0.0;
        for (const auto &[k, a] : kets) {
            n += a.magnitude * a.magnitude;
        }
        for (const auto &[k, w] : impurity) {
            n += w;
        }
        return n;
    }

    [[nodiscard]] double impurity_weight() const {
        double w = 0.0;
        for (const auto &[k, v] : impurity) {
            w += v;
        }
        return w;
    }
};

}  // namespace rephase
