#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "rephase/emitter.hpp"
#include "rephase/engine.hpp"
#include "rephase/fidelity.hpp"

namespace rephase {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Flat key=value configuration. Frequencies are entered in Hz and stored
/// as angular frequencies; sigma_f stays a linewidth in Hz.
struct Config {
    EmitterPair emitters;
    StrategyParams strategy;
    bool strategy_given = false;  // x or theta was set explicitly
    std::string sequence;  // built-in name, overrides the strategy model when set
    double f_a = 1.0;
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    RunOptions run{.assume_correlated_shelf = true};
    bool normalized_postselect = true;
    std::string output;

    /// Applies one key=value pair. Unknown keys are rejected.
    void set(const std::string &key, const std::string &value);
    void validate() const;
};

namespace detail {

inline double parse_real(const std::string &key, const std::string &v) {
    double out = 0.0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        throw ConfigError("invalid number for '" + key + "': '" + v + "'");
    }
    return out;
}

inline std::uint64_t parse_count(const std::string &key, const std::string &v) {
    std::uint64_t out = 0;
    auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) {
        // Allow 1e5 style counts.
        double d = parse_real(key, v);
        if (d < 0 || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
            throw ConfigError("invalid count for '" + key + "': '" + v + "'");
        }
        return static_cast<std::uint64_t>(d);
    }
    return out;
}

inline bool parse_flag(const std::string &key, const std::string &v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") {
        return true;
    }
    if (v == "0" || v == "false" || v == "no" || v == "off") {
        return false;
    }
    throw ConfigError("invalid boolean for '" + key + "': '" + v + "'");
}

inline std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

inline void Config::set(const std::string &key, const std::string &value) {
    using detail::parse_real;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    auto per_emitter = [&](std::string_view prefix, std::array<double, 2> &arr, double scale) {
        if (key.size() == prefix.size() + 2 && key.starts_with(prefix) && key[prefix.size()] == '_' &&
            (key.back() == '1' || key.back() == '2')) {
            arr[key.back() == '1' ? 0 : 1] = scale * parse_real(key, value);
            return true;
        }
        return false;
    };
    EmitterPair &e = emitters;
    if (per_emitter("mean_frequency", e.mean_frequency, two_pi) || per_emitter("laser_frequency", e.laser_frequency, two_pi) ||
        per_emitter("ground_detuning", e.ground_detuning, two_pi) ||
        per_emitter("excited_detuning", e.excited_detuning, two_pi) ||
        per_emitter("ground_splitting", e.ground_splitting, two_pi) ||
        per_emitter("excited_splitting", e.excited_splitting, two_pi) || per_emitter("path_length", e.path_length, 1.0)) {
        return;
    }
    if (key == "gamma_b") {
        e.gamma_b = parse_real(key, value);
        strategy.gamma_b = e.gamma_b;
    } else if (key == "gamma_a") {
        e.gamma_a = parse_real(key, value);
    } else if (key == "sigma_f") {
        e.sigma_f = parse_real(key, value);
    } else if (key == "r") {
        try {
            e.r = Rational::parse(value);
        } catch (const std::exception &ex) {
            throw ConfigError("invalid rational for 'r': " + std::string(ex.what()));
        }
    } else if (key == "epsilon") {
        e.epsilon = parse_real(key, value);
    } else if (key == "alpha") {
        e.alpha = parse_real(key, value);
    } else if (key == "wait_T") {
        e.wait_T = parse_real(key, value);
    } else if (key == "strategy") {
        try {
            strategy.strategy = parse_strategy(value);
        } catch (const std::invalid_argument &ex) {
            throw ConfigError(ex.what());
        }
    } else if (key == "x") {
        strategy.strategy = Strategy::rephase;
        strategy.param = parse_real(key, value);
        strategy_given = true;
    } else if (key == "theta") {
        strategy.strategy = Strategy::postselect;
        strategy.param = parse_real(key, value);
        strategy_given = true;
    } else if (key == "sequence") {
        sequence = value;
    } else if (key == "f_a") {
        f_a = parse_real(key, value);
    } else if (key == "n") {
        n = detail::parse_count(key, value);
    } else if (key == "seed") {
        seed = detail::parse_count(key, value);
    } else if (key == "workers") {
        workers = static_cast<unsigned>(detail::parse_count(key, value));
    } else if (key == "noise_model") {
        if (value != "quasi_static") {
            throw ConfigError("noise model '" + value + "' is not supported; only quasi_static frequency noise is modelled");
        }
    } else if (key == "assume_correlated_shelf") {
        run.assume_correlated_shelf = detail::parse_flag(key, value);
    } else if (key == "alpha_as_amplitude") {
        run.alpha_as_amplitude = detail::parse_flag(key, value);
    } else if (key == "classify_path_term_unknown") {
        run.classify_path_term_unknown = detail::parse_flag(key, value);
    } else if (key == "normalized_postselect") {
        normalized_postselect = detail::parse_flag(key, value);
    } else if (key == "output") {
        output = value;
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

inline void Config::validate() const {
    try {
        emitters.validate();
        strategy.validate();
        detail::require_acceptance(f_a);
    } catch (const std::invalid_argument &ex) {
        throw ConfigError(ex.what());
    }
    if (n < 1000) {
        throw ConfigError("n must be at least 1000");
    }
}

/// Reads key=value lines; '#' starts a comment, blank lines are skipped.
inline void load_config(Config &cfg, std::istream &in, const std::string &source = "config") {
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::string t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
        }
        try {
            cfg.set(detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
        } catch (const ConfigError &ex) {
            throw ConfigError(source + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
}

inline void load_config_file(Config &cfg, const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    load_config(cfg, in, path);
}

/// Applies a "key=value" override.
inline void apply_override(Config &cfg, const std::string &kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override '" + kv + "' is not key=value");
    }
    cfg.set(detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
}

}  // namespace rephase
