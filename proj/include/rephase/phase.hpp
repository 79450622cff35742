#pragma once

#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rephase/rational.hpp"
#include "rephase/symbols.hpp"

namespace rephase {

/// Linear combination of symbols with exact rational coefficients, kept in
/// canonical form: no zero coefficients, keys in enumeration order.
template <class Symbol>
class Linear {
  public:
    Linear() = default;
    explicit Linear(Symbol s, Rational c = 1) { add(s, c); }

    Linear &add(Symbol s, const Rational &c) {
        if (c.is_zero()) {
            return *this;
        }
        auto [it, inserted] = terms_.try_emplace(s, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                terms_.erase(it);
            }
        }
        return *this;
    }

    [[nodiscard]] Rational coefficient(Symbol s) const {
        auto it = terms_.find(s);
        return it == terms_.end() ? Rational(0) : it->second;
    }
    [[nodiscard]] const std::map<Symbol, Rational> &terms() const { return terms_; }
    [[nodiscard]] bool is_zero() const { return terms_.empty(); }
    [[nodiscard]] bool contains(Symbol s) const { return terms_.count(s) != 0; }

    Linear &operator+=(const Linear &o) {
        for (const auto &[s, c] : o.terms_) {
            add(s, c);
        }
        return *this;
    }
    Linear &operator-=(const Linear &o) {
        for (const auto &[s, c] : o.terms_) {
            add(s, -c);
        }
        return *this;
    }
    friend Linear operator+(Linear a, const Linear &b) { return a += b; }
    friend Linear operator-(Linear a, const Linear &b) { return a -= b; }
    friend Linear operator*(const Rational &k, const Linear &a) {
        Linear out;
        for (const auto &[s, c] : a.terms_) {
            out.add(s, k * c);
        }
        return out;
    }
    friend bool operator==(const Linear &, const Linear &) = default;

  private:
    std::map<Symbol, Rational> terms_;
};

using TimeExpr = Linear<TimeSymbol>;
using FreqExpr = Linear<FreqSymbol>;

/// A duration of `seconds` as a multiple of the unit time symbol.
inline TimeExpr seconds(const Rational &s) { return TimeExpr(TimeSymbol::unit, s); }

/// Phase bilinear in frequency and time symbols, plus a constant multiple of
/// pi. Used as the argument of exp(-i phase) on a ket.
class LinearPhase {
  public:
    using Key = std::pair<FreqSymbol, TimeSymbol>;

    LinearPhase() = default;

    static LinearPhase term(FreqSymbol f, TimeSymbol t, const Rational &c = 1) {
        LinearPhase p;
        p.add_term(f, t, c);
        return p;
    }
    static LinearPhase product(const FreqExpr &f, const TimeExpr &t, const Rational &scale = 1) {
        LinearPhase p;
        for (const auto &[fs, fc] : f.terms()) {
            for (const auto &[ts, tc] : t.terms()) {
                p.add_term(fs, ts, scale * fc * tc);
            }
        }
        return p;
    }
    static LinearPhase pi_multiple(const Rational &c) {
        LinearPhase p;
        p.pi_ = c;
        return p;
    }

    LinearPhase &add_term(FreqSymbol f, TimeSymbol t, const Rational &c) {
        if (c.is_zero()) {
            return *this;
        }
        auto [it, inserted] = terms_.try_emplace(Key{f, t}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) {
                terms_.erase(it);
            }
        }
        return *this;
    }
    LinearPhase &add_pi(const Rational &c) {
        pi_ += c;
        return *this;
    }

    [[nodiscard]] const std::map<Key, Rational> &terms() const { return terms_; }
    [[nodiscard]] const Rational &pi_constant() const { return pi_; }
    [[nodiscard]] Rational coefficient(FreqSymbol f, TimeSymbol t) const {
        auto it = terms_.find(Key{f, t});
        return it == terms_.end() ? Rational(0) : it->second;
    }
    [[nodiscard]] bool is_zero() const { return terms_.empty() && pi_.is_zero(); }
    [[nodiscard]] bool contains_time(TimeSymbol t) const {
        for (const auto &[k, c] : terms_) {
            if (k.second == t) {
                return true;
            }
        }
        return false;
    }
    [[nodiscard]] bool contains_freq(FreqSymbol f) const {
        for (const auto &[k, c] : terms_) {
            if (k.first == f) {
                return true;
            }
        }
        return false;
    }

    /// Same symbolic terms with the constant dropped.
    [[nodiscard]] LinearPhase symbolic_part() const {
        LinearPhase p = *this;
        p.pi_ = 0;
        return p;
    }

    LinearPhase &operator+=(const LinearPhase &o) {
        for (const auto &[k, c] : o.terms_) {
            add_term(k.first, k.second, c);
        }
        pi_ += o.pi_;
        return *this;
    }
    LinearPhase &operator-=(const LinearPhase &o) {
        for (const auto &[k, c] : o.terms_) {
            add_term(k.first, k.second, -c);
        }
        pi_ -= o.pi_;
        return *this;
    }
    friend LinearPhase operator+(LinearPhase a, const LinearPhase &b) { return a += b; }
    friend LinearPhase operator-(LinearPhase a, const LinearPhase &b) { return a -= b; }
    friend LinearPhase operator*(const Rational &k, const LinearPhase &a) {
        LinearPhase out;
        for (const auto &[key, c] : a.terms_) {
            out.add_term(key.first, key.second, k * c);
        }
        out.pi_ = k * a.pi_;
        return out;
    }
    LinearPhase operator-() const { return Rational(-1) * *this; }
    friend bool operator==(const LinearPhase &, const LinearPhase &) = default;

  private:
    std::map<Key, Rational> terms_;
    Rational pi_;
};

/// a + sign * b.
inline LinearPhase combine(const LinearPhase &a, const LinearPhase &b, int sign) {
    if (sign != 1 && sign != -1) {
        throw std::invalid_argument("combine: sign must be +1 or -1");
    }
    return sign == 1 ? a + b : a - b;
}

/// Rewrite rules for time and frequency symbols. Rules may refer to other
/// ruled symbols; they are expanded to a fixpoint when applied, and a cycle is
/// an error.
class Substitution {
  public:
    Substitution &set(TimeSymbol lhs, TimeExpr rhs) {
        time_rules_[lhs] = std::move(rhs);
        return *this;
    }
    Substitution &set(FreqSymbol lhs, FreqExpr rhs) {
        freq_rules_[lhs] = std::move(rhs);
        return *this;
    }
    [[nodiscard]] const std::map<TimeSymbol, TimeExpr> &time_rules() const { return time_rules_; }
    [[nodiscard]] const std::map<FreqSymbol, FreqExpr> &freq_rules() const { return freq_rules_; }
    [[nodiscard]] bool empty() const { return time_rules_.empty() && freq_rules_.empty(); }

    /// Rules from `other` override rules of this substitution on the same symbol.
    Substitution &merge(const Substitution &other) {
        for (const auto &[k, v] : other.time_rules_) {
            time_rules_[k] = v;
        }
        for (const auto &[k, v] : other.freq_rules_) {
            freq_rules_[k] = v;
        }
        return *this;
    }

    /// Fully expanded right-hand side for a symbol (the symbol itself when unruled).
    [[nodiscard]] TimeExpr expand(TimeSymbol s) const { return expand_impl(s, time_rules_); }
    [[nodiscard]] FreqExpr expand(FreqSymbol s) const { return expand_impl(s, freq_rules_); }

    /// Throws std::invalid_argument if the rules contain a cycle.
    void check_acyclic() const {
        for (const auto &[k, v] : time_rules_) {
            (void)expand(k);
        }
        for (const auto &[k, v] : freq_rules_) {
            (void)expand(k);
        }
    }

  private:
    template <class Symbol>
    static Linear<Symbol> expand_impl(Symbol root, const std::map<Symbol, Linear<Symbol>> &rules) {
        std::map<Symbol, Linear<Symbol>> done;
        std::vector<Symbol> stack;
        auto rec = [&](auto &&self, Symbol s) -> Linear<Symbol> {
            if (auto it = done.find(s); it != done.end()) {
                return it->second;
            }
            auto rule = rules.find(s);
            if (rule == rules.end()) {
                return Linear<Symbol>(s);
            }
            for (Symbol on_stack : stack) {
                if (on_stack == s) {
                    throw std::invalid_argument("cyclic substitution through symbol '" + std::string(name(s)) + "'");
                }
            }
            stack.push_back(s);
            Linear<Symbol> out;
            for (const auto &[sym, c] : rule->second.terms()) {
                out += c * self(self, sym);
            }
            stack.pop_back();
            done.emplace(s, out);
            return out;
        };
        return rec(rec, root);
    }

    std::map<TimeSymbol, TimeExpr> time_rules_;
    std::map<FreqSymbol, FreqExpr> freq_rules_;
};

inline TimeExpr substitute(const TimeExpr &e, const Substitution &s) {
    TimeExpr out;
    for (const auto &[sym, c] : e.terms()) {
        out += c * s.expand(sym);
    }
    return out;
}

inline FreqExpr substitute(const FreqExpr &e, const Substitution &s) {
    FreqExpr out;
    for (const auto &[sym, c] : e.terms()) {
        out += c * s.expand(sym);
    }
    return out;
}

inline LinearPhase substitute(const LinearPhase &p, const Substitution &s) {
    s.check_acyclic();
    LinearPhase out = LinearPhase::pi_multiple(p.pi_constant());
    for (const auto &[key, c] : p.terms()) {
        out += LinearPhase::product(s.expand(key.first), s.expand(key.second), c);
    }
    return out;
}

/// Terms whose frequency symbol is classified unknown. The constant is never
/// part of the residual.
inline LinearPhase unknown_residual(const LinearPhase &p, const Classification &cls = {}) {
    LinearPhase out;
    for (const auto &[key, c] : p.terms()) {
        if (cls.is_unknown(key.first)) {
            out.add_term(key.first, key.second, c);
        }
    }
    return out;
}

inline LinearPhase known_part(const LinearPhase &p, const Classification &cls = {}) {
    return p - unknown_residual(p, cls);
}

/// Numeric values for symbols, in rad/s and s. The unit time symbol is
/// always 1.
class Valuation {
  public:
    Valuation() { time_[static_cast<std::size_t>(TimeSymbol::unit)] = 1.0; }

    Valuation &set(FreqSymbol f, double v) {
        freq_[static_cast<std::size_t>(f)] = v;
        return *this;
    }
    Valuation &set(TimeSymbol t, double v) {
        if (t != TimeSymbol::unit) {
            time_[static_cast<std::size_t>(t)] = v;
        }
        return *this;
    }
    [[nodiscard]] bool has(FreqSymbol f) const { return freq_[static_cast<std::size_t>(f)].has_value(); }
    [[nodiscard]] bool has(TimeSymbol t) const { return time_[static_cast<std::size_t>(t)].has_value(); }
    [[nodiscard]] double get(FreqSymbol f) const {
        const auto &v = freq_[static_cast<std::size_t>(f)];
        if (!v) {
            throw std::out_of_range("no value for frequency symbol '" + std::string(name(f)) + "'");
        }
        return *v;
    }
    [[nodiscard]] double get(TimeSymbol t) const {
        const auto &v = time_[static_cast<std::size_t>(t)];
        if (!v) {
            throw std::out_of_range("no value for time symbol '" + std::string(name(t)) + "'");
        }
        return *v;
    }

  private:
    std::array<std::optional<double>, kNumFreqSymbols> freq_{};
    std::array<std::optional<double>, kNumTimeSymbols> time_{};
};

inline double evaluate(const TimeExpr &e, const Valuation &v) {
    double acc = 0.0;
    for (const auto &[sym, c] : e.terms()) {
        acc += c.to_double() * v.get(sym);
    }
    return acc;
}

inline double evaluate(const FreqExpr &e, const Valuation &v) {
    double acc = 0.0;
    for (const auto &[sym, c] : e.terms()) {
        acc += c.to_double() * v.get(sym);
    }
    return acc;
}

/// Numeric phase in radians, constant included.
inline double evaluate(const LinearPhase &p, const Valuation &v) {
    double acc = p.pi_constant().to_double() * std::numbers::pi;
    for (const auto &[key, c] : p.terms()) {
        acc += c.to_double() * v.get(key.first) * v.get(key.second);
    }
    return acc;
}

/// Flattened form of a phase for repeated evaluation in hot loops.
class CompiledPhase {
  public:
    CompiledPhase() = default;
    explicit CompiledPhase(const LinearPhase &p) : constant_(p.pi_constant().to_double() * std::numbers::pi) {
        for (const auto &[key, c] : p.terms()) {
            terms_.push_back({c.to_double(), key.first, key.second});
        }
    }
    [[nodiscard]] double operator()(const Valuation &v) const {
        double acc = constant_;
        for (const auto &t : terms_) {
            acc += t.coeff * v.get(t.freq) * v.get(t.time);
        }
        return acc;
    }

  private:
    struct Term {
        double coeff;
        FreqSymbol freq;
        TimeSymbol time;
    };
    double constant_ = 0.0;
    std::vector<Term> terms_;
};

namespace detail {

inline std::string coefficient_prefix(const Rational &c, bool first) {
    std::string out;
    Rational mag = c;
    if (c < Rational(0)) {
        out = first ? "-" : " - ";
        mag = -c;
    } else if (!first) {
        out = " + ";
    }
    if (mag != Rational(1)) {
        out += mag.str() + "·";
    }
    return out;
}

}  // namespace detail

/// Human-readable form grouped by time symbol, e.g. "-(Δ₂ - Δ₁)·ε".
inline std::string to_string(const LinearPhase &p) {
    std::map<TimeSymbol, FreqExpr> by_time;
    for (const auto &[key, c] : p.terms()) {
        by_time[key.second].add(key.first, c);
    }
    std::string out;
    bool first = true;
    for (const auto &[t, f] : by_time) {
        std::string time_part = t == TimeSymbol::unit ? "" : "·" + std::string(pretty_name(t));
        if (f.terms().size() == 1) {
            const auto &[fs, c] = *f.terms().begin();
            out += detail::coefficient_prefix(c, first) + std::string(pretty_name(fs)) + time_part;
        } else {
            // Factor out a leading minus so "(Δ₂ - Δ₁)" reads naturally.
            Rational lead = f.terms().begin()->second;
            Rational sign = lead < Rational(0) ? Rational(-1) : Rational(1);
            std::string inner;
            bool inner_first = true;
            for (const auto &[fs, c] : f.terms()) {
                inner += detail::coefficient_prefix(sign * c, inner_first) + std::string(pretty_name(fs));
                inner_first = false;
            }
            out += detail::coefficient_prefix(sign, first) + "(" + inner + ")" + time_part;
        }
        first = false;
    }
    if (!p.pi_constant().is_zero()) {
        out += detail::coefficient_prefix(p.pi_constant(), first) + "π";
        first = false;
    }
    return first ? "0" : out;
}

inline std::ostream &operator<<(std::ostream &os, const LinearPhase &p) { return os << to_string(p); }

}  // namespace rephase
