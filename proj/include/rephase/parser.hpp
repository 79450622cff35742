#pragma once

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rephase/rational.hpp"
#include "rephase/sequence.hpp"
#include "rephase/symbols.hpp"

namespace rephase {

/// Syntax or validation error with a 1-based source position.
class ParseError : public std::runtime_error {
  public:
    ParseError(int line, int column, const std::string &message)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}
    [[nodiscard]] int line() const { return line_; }
    [[nodiscard]] int column() const { return column_; }

  private:
    int line_;
    int column_;
};

namespace detail {

enum class Tok { ident, number, punct, separator, end };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

inline std::vector<Token> tokenize(std::string_view src) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '#') {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
        } else if (c == '\n' || c == ';') {
            out.push_back({Tok::separator, std::string(1, c), line, col});
            advance(1);
        } else if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
                ++j;
            }
            out.push_back({Tok::ident, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) {
                ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
                    ++k;
                }
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                        ++j;
                    }
                }
            }
            out.push_back({Tok::number, std::string(src.substr(i, j - i)), line, col});
            advance(j - i);
        } else if (std::string_view("+-*/(){}").find(c) != std::string_view::npos) {
            out.push_back({Tok::punct, std::string(1, c), line, col});
            advance(1);
        } else {
            throw ParseError(line, col, "unexpected character '" + std::string(1, c) + "'");
        }
    }
    out.push_back({Tok::end, "", line, col});
    return out;
}

class Parser {
  public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    std::vector<Instruction> program(bool nested) {
        std::vector<Instruction> body;
        skip_separators();
        while (!at_end() && !(nested && is_punct("}"))) {
            body.push_back(statement());
            if (at_end() || (nested && is_punct("}"))) {
                break;
            }
            if (peek().kind != Tok::separator) {
                fail(peek(), "expected ';' or newline, found '" + peek().text + "'");
            }
            skip_separators();
        }
        return body;
    }

    [[nodiscard]] const Token &peek() const { return toks_[pos_]; }
    [[nodiscard]] bool at_end() const { return peek().kind == Tok::end; }

    [[noreturn]] static void fail(const Token &t, const std::string &msg) { throw ParseError(t.line, t.column, msg); }

  private:
    const Token &next() { return toks_[pos_ == toks_.size() - 1 ? pos_ : pos_++]; }
    [[nodiscard]] bool is_punct(std::string_view p) const { return peek().kind == Tok::punct && peek().text == p; }
    void skip_separators() {
        while (peek().kind == Tok::separator) {
            ++pos_;
        }
    }
    void expect_punct(std::string_view p) {
        if (!is_punct(p)) {
            fail(peek(), "expected '" + std::string(p) + "'");
        }
        ++pos_;
    }

    Instruction statement() {
        const Token &kw = next();
        if (kw.kind != Tok::ident) {
            fail(kw, "expected an instruction keyword, found '" + kw.text + "'");
        }
        if (kw.text == "rg" || kw.text == "re" || kw.text == "ro") {
            Transition which = kw.text == "rg" ? Transition::ground : kw.text == "re" ? Transition::excited : Transition::optical;
            return rot(which, angle());
        }
        if (kw.text == "wait") {
            return wait(duration());
        }
        if (kw.text == "emit") {
            const Token &label = next();
            if (label.kind != Tok::ident) {
                fail(label, "expected an emit window label");
            }
            ++pending_;
            return emit(label.text);
        }
        if (kw.text == "detect") {
            if (pending_ != 1) {
                fail(kw, pending_ == 0 ? "detect without a preceding emit window"
                                       : "detect preceded by more than one unmatched emit window");
            }
            pending_ = 0;
            const Token &d = next();
            if (d.kind != Tok::ident || d.text != "D" || !(is_punct("+") || is_punct("-"))) {
                fail(d, "expected detector D+ or D-");
            }
            Detector det = next().text == "+" ? Detector::plus : Detector::minus;
            const Token &sym = next();
            if (sym.kind != Tok::ident) {
                fail(sym, "expected a detection time symbol");
            }
            auto t = parse_time_symbol(sym.text);
            if (!t) {
                fail(sym, "unknown time symbol '" + sym.text + "'");
            }
            return detect(det, *t);
        }
        if (kw.text == "branch_order") {
            skip_separators();
            expect_punct("{");
            int saved = pending_;
            auto then_branch = program(true);
            expect_punct("}");
            int after_then = pending_;
            pending_ = saved;
            skip_separators();
            expect_punct("{");
            auto else_branch = program(true);
            expect_punct("}");
            pending_ = after_then;
            return branch_order(std::move(then_branch), std::move(else_branch));
        }
        fail(kw, "unknown instruction '" + kw.text + "'");
    }

    Angle angle() {
        const Token &t = next();
        if (t.kind == Tok::ident && t.text == "alpha") {
            return Angle::alpha;
        }
        if (t.kind == Tok::ident && t.text == "pi") {
            if (is_punct("/")) {
                ++pos_;
                const Token &two = next();
                if (two.kind != Tok::number || two.text != "2") {
                    fail(two, "only pi/2 is supported as a fractional angle");
                }
                return Angle::half_pi;
            }
            return Angle::pi;
        }
        fail(t, "expected angle pi, pi/2 or alpha");
    }

    Rational number() {
        const Token &t = next();
        if (t.kind != Tok::number) {
            fail(t, "expected a number");
        }
        try {
            Rational value = Rational::parse(t.text);
            if (is_punct("/") && toks_[pos_ + 1].kind == Tok::number) {
                ++pos_;
                const Token &den = next();
                Rational d = Rational::parse(den.text);
                if (d.is_zero()) {
                    fail(den, "division by zero");
                }
                value = value / d;
            }
            return value;
        } catch (const ParseError &) {
            throw;
        } catch (const std::exception &e) {
            fail(t, e.what());
        }
    }

    // affine := ["-"] aterm (("+"|"-") aterm)* ; aterm := number ["*" "r"] | "r"
    RCoeff affine() {
        RCoeff out;
        bool first = true;
        while (true) {
            Rational sign = 1;
            if (is_punct("+") || is_punct("-")) {
                sign = next().text == "-" ? Rational(-1) : Rational(1);
            } else if (!first) {
                break;
            }
            first = false;
            if (peek().kind == Tok::ident && peek().text == "r") {
                ++pos_;
                out.r_coeff += sign;
            } else {
                Rational v = number();
                if (is_punct("*") && toks_[pos_ + 1].kind == Tok::ident && toks_[pos_ + 1].text == "r") {
                    pos_ += 2;
                    out.r_coeff += sign * v;
                } else {
                    out.constant += sign * v;
                }
            }
        }
        return out;
    }

    // duration := ["-"] term (("+"|"-") term)*
    // term := coeff "*" timesym | timesym | number ; coeff := number | "r" | "(" affine ")"
    Duration duration() {
        Duration out;
        bool first = true;
        while (true) {
            Rational sign = 1;
            if (is_punct("+") || is_punct("-")) {
                sign = next().text == "-" ? Rational(-1) : Rational(1);
            } else if (!first) {
                break;
            }
            first = false;
            const Token &start = peek();
            RCoeff coeff{1, 0};
            bool has_coeff = false;
            if (is_punct("(")) {
                ++pos_;
                coeff = affine();
                expect_punct(")");
                has_coeff = true;
            } else if (start.kind == Tok::number) {
                coeff = RCoeff{number(), 0};
                has_coeff = true;
            } else if (start.kind == Tok::ident && start.text == "r") {
                ++pos_;
                coeff = RCoeff{0, 1};
                has_coeff = true;
            }
            TimeSymbol sym = TimeSymbol::unit;
            if (has_coeff && is_punct("*")) {
                ++pos_;
                sym = time_symbol();
            } else if (!has_coeff) {
                sym = time_symbol();
            } else if (!coeff.r_coeff.is_zero()) {
                fail(start, "a coefficient involving r must multiply a time symbol");
            }
            out.add(sym, RCoeff{sign * coeff.constant, sign * coeff.r_coeff});
        }
        return out;
    }

    TimeSymbol time_symbol() {
        const Token &t = next();
        if (t.kind != Tok::ident) {
            fail(t, "expected a time symbol");
        }
        auto s = parse_time_symbol(t.text);
        if (!s) {
            fail(t, "unknown time symbol '" + t.text + "'");
        }
        return *s;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    int pending_ = 0;  // unmatched emit windows
};

}  // namespace detail

/// Parses a pulse-sequence program. Statements are separated by ';' or
/// newlines and '#' starts a comment.
///
///     program := stmt (";" stmt)*
///     stmt    := ("rg" | "re" | "ro") angle | "wait" duration | "emit" label
///              | "detect" ("D+" | "D-") timesym
///              | "branch_order" "{" program "}" "{" program "}"
///     angle   := "pi" | "pi/2" | "alpha"
///
/// Durations are linear combinations of time symbols and decimal seconds,
/// with coefficients that may be affine in r, e.g. `T - (1-r)*t1`.
inline Sequence parse(std::string_view text, std::string name = "") {
    auto toks = detail::tokenize(text);
    detail::Parser parser(std::move(toks));
    auto body = parser.program(false);
    if (!parser.at_end()) {
        detail::Parser::fail(parser.peek(), "unexpected '" + parser.peek().text + "'");
    }
    if (body.empty()) {
        throw ParseError(1, 1, "empty sequence");
    }
    try {
        return Sequence(std::move(name), std::move(body));
    } catch (const SequenceError &e) {
        throw ParseError(1, 1, e.what());
    }
}

}  // namespace rephase
