#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rephase/phase.hpp"
#include "rephase/rational.hpp"
#include "rephase/symbols.hpp"

namespace rephase {

enum class Transition { ground, excited, optical };
enum class Angle { alpha, half_pi, pi };
enum class Detector { plus, minus };

/// Coefficient affine in the magnetic-moment ratio r: constant + r_coeff * r.
struct RCoeff {
    Rational constant;
    Rational r_coeff;

    [[nodiscard]] Rational resolve(const Rational &r) const { return constant + r_coeff * r; }
    [[nodiscard]] bool is_zero() const { return constant.is_zero() && r_coeff.is_zero(); }
    friend bool operator==(const RCoeff &, const RCoeff &) = default;
};

/// Wait duration: linear combination of time symbols whose coefficients may
/// depend on r. Numeric seconds are stored on the unit symbol.
class Duration {
  public:
    Duration() = default;
    explicit Duration(TimeSymbol s) { add(s, RCoeff{1, 0}); }

    Duration &add(TimeSymbol s, const RCoeff &c) {
        RCoeff &slot = terms_[s];
        slot.constant += c.constant;
        slot.r_coeff += c.r_coeff;
        if (slot.is_zero()) {
            terms_.erase(s);
        }
        return *this;
    }
    [[nodiscard]] const std::map<TimeSymbol, RCoeff> &terms() const { return terms_; }
    [[nodiscard]] bool depends_on_r() const {
        for (const auto &[s, c] : terms_) {
            if (!c.r_coeff.is_zero()) {
                return true;
            }
        }
        return false;
    }
    [[nodiscard]] TimeExpr resolve(const Rational &r) const {
        TimeExpr out;
        for (const auto &[s, c] : terms_) {
            out.add(s, c.resolve(r));
        }
        return out;
    }
    friend bool operator==(const Duration &, const Duration &) = default;

  private:
    std::map<TimeSymbol, RCoeff> terms_;
};

struct Instruction;

struct Rotate {
    Transition which;
    Angle angle;
    friend bool operator==(const Rotate &, const Rotate &) = default;
};

struct Wait {
    Duration duration;
    friend bool operator==(const Wait &, const Wait &) = default;
};

struct EmitWindow {
    std::string label;
    friend bool operator==(const EmitWindow &, const EmitWindow &) = default;
};

struct DetectEvent {
    Detector detector;
    TimeSymbol time;
    friend bool operator==(const DetectEvent &, const DetectEvent &) = default;
};

/// Chooses a branch from the click record: `then_branch` when the second
/// detection time is not earlier than the first.
struct BranchOnOrder {
    std::vector<Instruction> then_branch;
    std::vector<Instruction> else_branch;
    friend bool operator==(const BranchOnOrder &, const BranchOnOrder &) = default;
};

struct Instruction {
    std::variant<Rotate, Wait, EmitWindow, DetectEvent, BranchOnOrder> op;

    template <class T>
    [[nodiscard]] bool is() const {
        return std::holds_alternative<T>(op);
    }
    template <class T>
    [[nodiscard]] const T &as() const {
        return std::get<T>(op);
    }
    friend bool operator==(const Instruction &, const Instruction &) = default;
};

inline Instruction rot(Transition which, Angle angle) { return {Rotate{which, angle}}; }
inline Instruction wait(Duration d) { return {Wait{std::move(d)}}; }
inline Instruction wait(TimeSymbol s) { return {Wait{Duration(s)}}; }
inline Instruction emit(std::string label) { return {EmitWindow{std::move(label)}}; }
inline Instruction detect(Detector d, TimeSymbol t) { return {DetectEvent{d, t}}; }
inline Instruction branch_order(std::vector<Instruction> then_branch, std::vector<Instruction> else_branch) {
    return {BranchOnOrder{std::move(then_branch), std::move(else_branch)}};
}

class SequenceError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void check_pairing(const std::vector<Instruction> &body, int &pending) {
    for (const Instruction &ins : body) {
        if (ins.is<EmitWindow>()) {
            ++pending;
        } else if (ins.is<DetectEvent>()) {
            if (pending != 1) {
                throw SequenceError(pending == 0 ? "detect without a preceding emit window"
                                                 : "detect preceded by more than one unmatched emit window");
            }
            pending = 0;
        } else if (ins.is<BranchOnOrder>()) {
            int then_pending = pending;
            int else_pending = pending;
            check_pairing(ins.as<BranchOnOrder>().then_branch, then_pending);
            check_pairing(ins.as<BranchOnOrder>().else_branch, else_pending);
            pending = then_pending;
        }
    }
}

inline void collect_time_symbols(const std::vector<Instruction> &body, std::set<TimeSymbol> &out) {
    for (const Instruction &ins : body) {
        if (ins.is<Wait>()) {
            for (const auto &[s, c] : ins.as<Wait>().duration.terms()) {
                out.insert(s);
            }
        } else if (ins.is<DetectEvent>()) {
            out.insert(ins.as<DetectEvent>().time);
        } else if (ins.is<BranchOnOrder>()) {
            collect_time_symbols(ins.as<BranchOnOrder>().then_branch, out);
            collect_time_symbols(ins.as<BranchOnOrder>().else_branch, out);
        }
    }
}

}  // namespace detail

/// A validated, immutable pulse-sequence program.
class Sequence {
  public:
    Sequence(std::string name, std::vector<Instruction> instructions)
        : name_(std::move(name)), instructions_(std::move(instructions)) {
        if (instructions_.empty()) {
            throw SequenceError("empty sequence");
        }
        int pending = 0;
        detail::check_pairing(instructions_, pending);
    }

    [[nodiscard]] const std::string &name() const { return name_; }
    [[nodiscard]] const std::vector<Instruction> &instructions() const { return instructions_; }

    /// Time symbols referenced by waits and detections, including inside branches.
    [[nodiscard]] std::set<TimeSymbol> time_symbols() const {
        std::set<TimeSymbol> out;
        detail::collect_time_symbols(instructions_, out);
        return out;
    }

    /// Number of detection events on any single execution path.
    [[nodiscard]] int detection_count() const {
        int n = 0;
        for (const Instruction &ins : instructions_) {
            n += ins.is<DetectEvent>() ? 1 : 0;
        }
        return n;
    }

    /// True when an optical excitation follows the last detection, i.e. the
    /// program shelves the heralded state to correct its phase.
    [[nodiscard]] bool rephases() const {
        bool after_detect = false;
        bool found = false;
        auto scan = [&](auto &&self, const std::vector<Instruction> &body) -> void {
            for (const Instruction &ins : body) {
                if (ins.is<DetectEvent>()) {
                    after_detect = true;
                    found = false;
                } else if (ins.is<Rotate>() && after_detect && ins.as<Rotate>().which == Transition::optical) {
                    found = true;
                } else if (ins.is<BranchOnOrder>()) {
                    self(self, ins.as<BranchOnOrder>().then_branch);
                }
            }
        };
        scan(scan, instructions_);
        return found;
    }

    friend bool operator==(const Sequence &, const Sequence &) = default;

  private:
    std::string name_;
    std::vector<Instruction> instructions_;
};

// ---------------------------------------------------------------------------
// Rendering to the text format accepted by parse().
// ---------------------------------------------------------------------------

inline std::string render(Angle a) {
    switch (a) {
        case Angle::alpha:
            return "alpha";
        case Angle::half_pi:
            return "pi/2";
        case Angle::pi:
            return "pi";
    }
    return "";
}

inline std::string render(const RCoeff &c) {
    if (c.r_coeff.is_zero()) {
        return c.constant.str();
    }
    std::string r_part = c.r_coeff == Rational(1) ? "r" : c.r_coeff == Rational(-1) ? "-r" : c.r_coeff.str() + "*r";
    if (c.constant.is_zero()) {
        return "(" + r_part + ")";
    }
    if (r_part[0] != '-') {
        r_part = "+" + r_part;
    }
    return "(" + c.constant.str() + r_part + ")";
}

inline std::string render(const Duration &d) {
    if (d.terms().empty()) {
        return "0";
    }
    std::string out;
    bool first = true;
    for (const auto &[s, c] : d.terms()) {
        RCoeff mag = c;
        bool negative = c.constant < Rational(0) || (c.constant.is_zero() && c.r_coeff < Rational(0));
        if (negative) {
            mag = RCoeff{-c.constant, -c.r_coeff};
        }
        if (!first) {
            out += negative ? " - " : " + ";
        } else if (negative) {
            out += "-";
        }
        first = false;
        if (s == TimeSymbol::unit) {
            out += render(mag);
        } else if (mag == RCoeff{1, 0}) {
            out += std::string(name(s));
        } else {
            out += render(mag) + "*" + std::string(name(s));
        }
    }
    return out;
}

namespace detail {

inline void render_body(const std::vector<Instruction> &body, std::string &out, const std::string &sep) {
    bool first = true;
    for (const Instruction &ins : body) {
        if (!first) {
            out += sep;
        }
        first = false;
        std::visit(
            [&](const auto &op) {
                using T = std::decay_t<decltype(op)>;
                if constexpr (std::is_same_v<T, Rotate>) {
                    const char *kw = op.which == Transition::ground ? "rg" : op.which == Transition::excited ? "re" : "ro";
                    out += std::string(kw) + " " + render(op.angle);
                } else if constexpr (std::is_same_v<T, Wait>) {
                    out += "wait " + render(op.duration);
                } else if constexpr (std::is_same_v<T, EmitWindow>) {
                    out += "emit " + op.label;
                } else if constexpr (std::is_same_v<T, DetectEvent>) {
                    out += std::string("detect ") + (op.detector == Detector::plus ? "D+ " : "D- ") +
                           std::string(name(op.time));
                } else {
                    out += "branch_order { ";
                    render_body(op.then_branch, out, "; ");
                    out += " } { ";
                    render_body(op.else_branch, out, "; ");
                    out += " }";
                }
            },
            ins.op);
    }
}

}  // namespace detail

/// One statement per line, each terminated by ';'.
inline std::string render(const Sequence &seq) {
    std::string out;
    detail::render_body(seq.instructions(), out, ";\n");
    out += ";\n";
    return out;
}

}  // namespace rephase
