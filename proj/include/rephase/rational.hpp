#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rephase {

__extension__ using wide_int = __int128;

/// Exact rational number with 64-bit numerator and denominator.
///
/// Always stored in lowest terms with a positive denominator, so two equal
/// values compare equal structurally. Intermediate products are computed in
/// 128 bits; a result that does not fit 64 bits throws std::overflow_error.
class Rational {
  public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    [[nodiscard]] constexpr std::int64_t num() const { return num_; }
    [[nodiscard]] constexpr std::int64_t den() const { return den_; }
    [[nodiscard]] constexpr bool is_zero() const { return num_ == 0; }
    [[nodiscard]] constexpr bool is_integer() const { return den_ == 1; }
    [[nodiscard]] double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    /// Parses "p", "p/q", or a decimal literal such as "-1.25e-6" exactly.
    static Rational parse(std::string_view text);

    friend Rational operator+(const Rational &a, const Rational &b) {
        wide_int n = static_cast<wide_int>(a.num_) * b.den_ + static_cast<wide_int>(b.num_) * a.den_;
        wide_int d = static_cast<wide_int>(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational &a, const Rational &b) { return a + (-b); }
    friend Rational operator*(const Rational &a, const Rational &b) {
        return from_wide(static_cast<wide_int>(a.num_) * b.num_, static_cast<wide_int>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational &a, const Rational &b) {
        if (b.num_ == 0) {
            throw std::domain_error("rational division by zero");
        }
        return from_wide(static_cast<wide_int>(a.num_) * b.den_, static_cast<wide_int>(a.den_) * b.num_);
    }
    Rational operator-() const {
        if (num_ == INT64_MIN) {
            throw std::overflow_error("rational overflow");
        }
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational &operator+=(const Rational &o) { return *this = *this + o; }
    Rational &operator-=(const Rational &o) { return *this = *this - o; }
    Rational &operator*=(const Rational &o) { return *this = *this * o; }

    friend bool operator==(const Rational &, const Rational &) = default;
    friend bool operator<(const Rational &a, const Rational &b) {
        return static_cast<wide_int>(a.num_) * b.den_ < static_cast<wide_int>(b.num_) * a.den_;
    }

    [[nodiscard]] std::string str() const {
        return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
    }
    friend std::ostream &operator<<(std::ostream &os, const Rational &r) { return os << r.str(); }

  private:
    void assign(std::int64_t n, std::int64_t d) {
        if (d == 0) {
            throw std::domain_error("rational with zero denominator");
        }
        *this = from_wide(n, d);
    }

    static Rational from_wide(wide_int n, wide_int d) {
        if (d < 0) {
            n = -n;
            d = -d;
        }
        wide_int a = n < 0 ? -n : n;
        wide_int b = d;
        while (b != 0) {
            wide_int t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        if (n > INT64_MAX || n < -INT64_MAX || d > INT64_MAX) {
            throw std::overflow_error("rational overflow");
        }
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = n == 0 ? 1 : static_cast<std::int64_t>(d);
        return r;
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&]() -> Rational { throw std::invalid_argument("not a rational number: '" + std::string(text) + "'"); };
    if (text.empty()) {
        return fail();
    }
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational n = parse(text.substr(0, slash));
        Rational d = parse(text.substr(slash + 1));
        if (!n.is_integer() || !d.is_integer() || d.is_zero()) {
            return fail();
        }
        return n / d;
    }

    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    wide_int mantissa = 0;
    int scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            any_digit = true;
            mantissa = mantissa * 10 + (c - '0');
            if (seen_point) {
                ++scale;
            }
            if (mantissa > INT64_MAX) {
                throw std::overflow_error("rational overflow parsing '" + std::string(text) + "'");
            }
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) {
        return fail();
    }
    int exponent = 0;
    if (i < text.size()) {
        if (text[i] != 'e' && text[i] != 'E') {
            return fail();
        }
        ++i;
        bool exp_negative = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_negative = text[i] == '-';
            ++i;
        }
        if (i == text.size()) {
            return fail();
        }
        for (; i < text.size(); ++i) {
            if (text[i] < '0' || text[i] > '9' || exponent > 100) {
                return fail();
            }
            exponent = exponent * 10 + (text[i] - '0');
        }
        if (exp_negative) {
            exponent = -exponent;
        }
    }
    exponent -= scale;
    Rational result(static_cast<std::int64_t>(negative ? -mantissa : mantissa));
    Rational ten(10);
    for (int k = 0; k < (exponent < 0 ? -exponent : exponent); ++k) {
        result = exponent < 0 ? result / ten : result * ten;
    }
    return result;
}

}  // namespace rephase
