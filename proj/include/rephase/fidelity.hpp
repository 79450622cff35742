#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rephase/quadrature.hpp"

namespace rephase {

enum class Strategy { rephase, postselect };

inline std::string to_string(Strategy s) { return s == Strategy::rephase ? "rephase" : "postselect"; }

inline Strategy parse_strategy(const std::string &s) {
    if (s == "rephase") {
        return Strategy::rephase;
    }
    if (s == "postselect") {
        return Strategy::postselect;
    }
    throw std::invalid_argument("unknown strategy '" + s + "' (expected rephase or postselect)");
}

/// One point of the trade-off family. `param` is x = Gamma_A / Gamma_B for
/// rephasing and theta = sigma_f / Gamma_B for post-selection.
struct StrategyParams {
    Strategy strategy = Strategy::rephase;
    double param = 0.0;
    double gamma_b = 1.0;  // 1/s

    void validate() const {
        if (!(param >= 0.0) || !std::isfinite(param)) {
            throw std::invalid_argument(strategy == Strategy::rephase ? "x must be non-negative" : "theta must be non-negative");
        }
        if (!(gamma_b > 0.0)) {
            throw std::invalid_argument("gamma_b must be positive");
        }
    }
};

namespace detail {

inline void require_acceptance(double f_a) {
    if (!(f_a > 0.0 && f_a <= 1.0)) {
        throw std::invalid_argument("acceptance fraction must lie in (0, 1]");
    }
}

inline void require_non_negative(double v, const char *what) {
    if (!(v >= 0.0)) {
        throw std::invalid_argument(std::string(what) + " must be non-negative");
    }
}

}  // namespace detail

/// Cutoff time t_c for acceptance fraction f_A; f_A = 1 gives +infinity.
inline double acceptance_to_cutoff(double f_a, double gamma_b) {
    detail::require_acceptance(f_a);
    if (!(gamma_b > 0.0)) {
        throw std::invalid_argument("gamma_b must be positive");
    }
    if (f_a == 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -std::log1p(-f_a) / gamma_b;
}

inline double cutoff_to_acceptance(double t_c, double gamma_b) {
    detail::require_non_negative(t_c, "cutoff");
    if (!(gamma_b > 0.0)) {
        throw std::invalid_argument("gamma_b must be positive");
    }
    return -std::expm1(-gamma_b * t_c);
}

/// Inhomogeneous dephasing time of the optical coherence, sigma_f in Hz.
inline double t2_star(double sigma_f) {
    if (!(sigma_f > 0.0)) {
        throw std::invalid_argument("sigma_f must be positive");
    }
    return 1.0 / (std::numbers::sqrt2 * std::numbers::pi * sigma_f);
}

/// Shelving-to-emitting lifetime ratio for a cavity resonant with the
/// emitting transition and detuned by delta_split from the shelving one.
inline double purcell_ratio(double delta_split, double kappa) {
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("kappa must be positive");
    }
    detail::require_non_negative(delta_split, "delta_split");
    double y = 2.0 * delta_split / kappa;
    return 1.0 / (1.0 + y * y);
}

inline double f_rp_given_t1(double gamma_a, double t1) {
    detail::require_non_negative(gamma_a, "gamma_a");
    detail::require_non_negative(t1, "t1");
    return std::exp(-gamma_a * t1);
}

/// Rephasing fidelity averaged over accepted emission times.
inline double f_rp(double x, double f_a) {
    detail::require_non_negative(x, "x");
    detail::require_acceptance(f_a);
    if (x == 0.0) {
        return 1.0;
    }
    if (f_a < 1e-8) {
        return 1.0 - 0.5 * x * f_a + x * (x - 1.0) * f_a * f_a / 6.0;
    }
    return -std::expm1((1.0 + x) * std::log1p(-f_a)) / (f_a * (1.0 + x));
}

inline double beta(double sigma_f) { return std::numbers::sqrt2 * 2.0 * std::numbers::pi * sigma_f; }

inline double f_ps_given_t1(double sigma_f, double t1) {
    detail::require_non_negative(sigma_f, "sigma_f");
    detail::require_non_negative(t1, "t1");
    double bt = beta(sigma_f) * t1;
    return 0.5 * (1.0 + std::exp(-0.5 * bt * bt));
}

/// Post-selection fidelity. With `normalized` the integral is divided by
/// f_A, making it the mean over accepted events; without it the integral is
/// used as typeset, which only agrees at f_A = 1.
inline double f_ps(double theta, double f_a, bool normalized = true, double tol = 1e-10) {
    detail::require_non_negative(theta, "theta");
    detail::require_acceptance(f_a);
    double c = 2.0 * std::numbers::pi * theta;
    auto integrand = [c](double f) {
        if (f >= 1.0) {
            return 0.0;
        }
        double l = c * std::log1p(-f);
        return std::exp(-l * l);
    };
    double integral = theta == 0.0 ? f_a : integrate(integrand, 0.0, f_a, tol);
    return 0.5 * (1.0 + (normalized ? integral / f_a : integral));
}

inline double fidelity(const StrategyParams &p, double f_a, bool normalized = true) {
    return p.strategy == Strategy::rephase ? f_rp(p.param, f_a) : f_ps(p.param, f_a, normalized);
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

enum class Provenance { analytic, mc };

struct CurvePoint {
    double f_a;
    double fidelity;
    std::optional<double> stderr_;
};

struct FidelityCurve {
    StrategyParams params;
    Provenance provenance = Provenance::analytic;
    std::vector<CurvePoint> points;
};

inline FidelityCurve analytic_curve(const StrategyParams &p, const std::vector<double> &f_grid, bool normalized = true) {
    p.validate();
    FidelityCurve curve{p, Provenance::analytic, {}};
    for (double f : f_grid) {
        curve.points.push_back({f, fidelity(p, f, normalized), std::nullopt});
    }
    return curve;
}

inline const char *kCurveCsvHeader = "f_A,F,stderr,strategy,x_or_theta";

inline void write_csv_rows(std::ostream &os, const FidelityCurve &c) {
    for (const auto &pt : c.points) {
        os << format_double(pt.f_a) << ',' << format_double(pt.fidelity) << ','
           << (pt.stderr_ ? format_double(*pt.stderr_) : std::string()) << ',' << to_string(c.params.strategy) << ','
           << format_double(c.params.param) << '\n';
    }
}

inline void write_csv(std::ostream &os, const std::vector<FidelityCurve> &curves) {
    os << kCurveCsvHeader << '\n';
    for (const auto &c : curves) {
        write_csv_rows(os, c);
    }
}

/// Grid "start:stop:step" (stop inclusive) or a comma-separated list.
inline std::vector<double> parse_grid(const std::string &text) {
    auto to_double = [&](const std::string &s) {
        double v = 0.0;
        auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
            throw std::invalid_argument("invalid number '" + s + "' in grid '" + text + "'");
        }
        return v;
    };
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        auto a = text.find(':');
        auto b = text.find(':', a + 1);
        if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
            throw std::invalid_argument("range grid must be start:stop:step");
        }
        double start = to_double(text.substr(0, a));
        double stop = to_double(text.substr(a + 1, b - a - 1));
        double step = to_double(text.substr(b + 1));
        if (!(step > 0.0) || stop < start) {
            throw std::invalid_argument("range grid needs step > 0 and stop >= start");
        }
        auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
        for (long k = 0; k <= n; ++k) {
            // Rounded to 12 digits so 0.01 * 7 prints as 0.07.
            out.push_back(std::round((start + k * step) * 1e12) / 1e12);
        }
    } else {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            auto comma = text.find(',', pos);
            if (comma == std::string::npos) {
                comma = text.size();
            }
            out.push_back(to_double(text.substr(pos, comma - pos)));
            pos = comma + 1;
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("empty grid");
    }
    return out;
}

}  // namespace rephase
