#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace rephase {

/// Angular frequency symbols (rad/s). The enumeration order is the canonical
/// ordering of phase terms.
enum class FreqSymbol : std::uint8_t {
    omega_1,      // optical transition frequency of emitter 1, including spectral diffusion
    omega_2,
    omega_bar_1,  // mean optical frequency
    omega_bar_2,
    delta_1,      // spectral diffusion offset omega_i - omega_bar_i
    delta_2,
    laser_1,      // optical drive frequency
    laser_2,
    delta_g_1,    // ground spin detuning
    delta_g_2,
    delta_e_1,    // excited (shelving) spin detuning
    delta_e_2,
    omega_0,      // mean of omega_1 and omega_2, only appears multiplying the path-length difference
};

/// Time symbols (s). `unit` is the dimensionless constant 1, so a term
/// (omega, unit) with coefficient c is the phase omega * c seconds.
enum class TimeSymbol : std::uint8_t {
    tau,      // single-photon detection time, measured from excitation
    tau_1,    // first two-photon detection time
    tau_2,    // second two-photon detection time
    t_0,      // emission time, tau - T_0
    t_1,      // shelving duration
    t_2,      // spin refocusing wait
    T,        // wait between excitation and the next operation
    T_0,      // mean time of flight
    delta_T,  // time-of-flight difference
    epsilon,  // time-of-flight estimation error
    t,        // free time variable
    unit,
};

enum class Tag : std::uint8_t { known, unknown };

inline constexpr std::size_t kNumFreqSymbols = 13;
inline constexpr std::size_t kNumTimeSymbols = 12;

inline constexpr std::array<FreqSymbol, kNumFreqSymbols> kAllFreqSymbols = {
    FreqSymbol::omega_1,   FreqSymbol::omega_2,   FreqSymbol::omega_bar_1, FreqSymbol::omega_bar_2,
    FreqSymbol::delta_1,   FreqSymbol::delta_2,   FreqSymbol::laser_1,     FreqSymbol::laser_2,
    FreqSymbol::delta_g_1, FreqSymbol::delta_g_2, FreqSymbol::delta_e_1,   FreqSymbol::delta_e_2,
    FreqSymbol::omega_0};

inline constexpr std::array<TimeSymbol, kNumTimeSymbols> kAllTimeSymbols = {
    TimeSymbol::tau, TimeSymbol::tau_1, TimeSymbol::tau_2, TimeSymbol::t_0,     TimeSymbol::t_1,
    TimeSymbol::t_2, TimeSymbol::T,     TimeSymbol::T_0,   TimeSymbol::delta_T, TimeSymbol::epsilon,
    TimeSymbol::t,   TimeSymbol::unit};

namespace detail {

struct FreqInfo {
    std::string_view ascii;
    std::string_view pretty;
    Tag default_tag;
};

inline constexpr std::array<FreqInfo, kNumFreqSymbols> kFreqInfo = {{
    {"omega_1", "ω₁", Tag::unknown},
    {"omega_2", "ω₂", Tag::unknown},
    {"omega_bar_1", "ω̄₁", Tag::known},
    {"omega_bar_2", "ω̄₂", Tag::known},
    {"delta_1", "Δ₁", Tag::unknown},
    {"delta_2", "Δ₂", Tag::unknown},
    {"laser_1", "ω_L1", Tag::known},
    {"laser_2", "ω_L2", Tag::known},
    {"delta_g_1", "Δ_g1", Tag::unknown},
    {"delta_g_2", "Δ_g2", Tag::unknown},
    {"delta_e_1", "Δ_e1", Tag::unknown},
    {"delta_e_2", "Δ_e2", Tag::unknown},
    {"omega_0", "ω₀", Tag::known},
}};

// The ascii spelling doubles as the sequence-language keyword.
inline constexpr std::array<std::pair<std::string_view, std::string_view>, kNumTimeSymbols> kTimeInfo = {{
    {"tau", "τ"},
    {"tau1", "τ₁"},
    {"tau2", "τ₂"},
    {"t0", "t₀"},
    {"t1", "t₁"},
    {"t2", "t₂"},
    {"T", "T"},
    {"T0", "T₀"},
    {"dT", "δ_T"},
    {"eps", "ε"},
    {"t", "t"},
    {"1", "1"},
}};

}  // namespace detail

constexpr std::string_view name(FreqSymbol f) { return detail::kFreqInfo[static_cast<std::size_t>(f)].ascii; }
constexpr std::string_view pretty_name(FreqSymbol f) { return detail::kFreqInfo[static_cast<std::size_t>(f)].pretty; }
constexpr Tag default_tag(FreqSymbol f) { return detail::kFreqInfo[static_cast<std::size_t>(f)].default_tag; }
constexpr std::string_view name(TimeSymbol t) { return detail::kTimeInfo[static_cast<std::size_t>(t)].first; }
constexpr std::string_view pretty_name(TimeSymbol t) { return detail::kTimeInfo[static_cast<std::size_t>(t)].second; }

inline std::optional<FreqSymbol> parse_freq_symbol(std::string_view s) {
    for (FreqSymbol f : kAllFreqSymbols) {
        if (name(f) == s) {
            return f;
        }
    }
    return std::nullopt;
}

/// Looks up a time symbol by its ascii name. The unit constant has no name.
inline std::optional<TimeSymbol> parse_time_symbol(std::string_view s) {
    for (TimeSymbol t : kAllTimeSymbols) {
        if (t != TimeSymbol::unit && name(t) == s) {
            return t;
        }
    }
    return std::nullopt;
}

/// Emitter-indexed symbol helpers; `emitter` is 1 or 2.
constexpr FreqSymbol omega(int emitter) { return emitter == 1 ? FreqSymbol::omega_1 : FreqSymbol::omega_2; }
constexpr FreqSymbol omega_bar(int emitter) { return emitter == 1 ? FreqSymbol::omega_bar_1 : FreqSymbol::omega_bar_2; }
constexpr FreqSymbol spectral_offset(int emitter) { return emitter == 1 ? FreqSymbol::delta_1 : FreqSymbol::delta_2; }
constexpr FreqSymbol laser(int emitter) { return emitter == 1 ? FreqSymbol::laser_1 : FreqSymbol::laser_2; }
constexpr FreqSymbol ground_detuning(int emitter) { return emitter == 1 ? FreqSymbol::delta_g_1 : FreqSymbol::delta_g_2; }
constexpr FreqSymbol excited_detuning(int emitter) { return emitter == 1 ? FreqSymbol::delta_e_1 : FreqSymbol::delta_e_2; }

/// Which frequency symbols count as unknown when splitting a phase into its
/// correctable and uncorrectable parts.
class Classification {
  public:
    Classification() {
        for (FreqSymbol f : kAllFreqSymbols) {
            tags_[static_cast<std::size_t>(f)] = default_tag(f);
        }
    }
    Classification &set(FreqSymbol f, Tag tag) {
        tags_[static_cast<std::size_t>(f)] = tag;
        return *this;
    }
    [[nodiscard]] Tag tag(FreqSymbol f) const { return tags_[static_cast<std::size_t>(f)]; }
    [[nodiscard]] bool is_unknown(FreqSymbol f) const { return tag(f) == Tag::unknown; }

  private:
    std::array<Tag, kNumFreqSymbols> tags_{};
};

}  // namespace rephase
