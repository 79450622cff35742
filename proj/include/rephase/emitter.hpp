#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "rephase/phase.hpp"
#include "rephase/rational.hpp"

namespace rephase {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Physical parameters of the two emitters. Frequencies are angular (rad/s);
/// only sigma_f is a linewidth in Hz.
struct EmitterPair {
    std::array<double, 2> mean_frequency{0.0, 0.0};     // omega_bar_i
    std::array<double, 2> laser_frequency{0.0, 0.0};    // omega_L,i
    std::array<double, 2> ground_detuning{0.0, 0.0};    // Delta_g,i
    std::array<double, 2> excited_detuning{0.0, 0.0};   // Delta_e,i
    std::array<double, 2> ground_splitting{0.0, 0.0};   // omega_g,i
    std::array<double, 2> excited_splitting{0.0, 0.0};  // omega_e,i
    double gamma_b = 1.0;                               // emitting transition decay rate, 1/s
    double gamma_a = 0.0;                               // shelving transition decay rate, 1/s
    Rational r{1, 2};                                   // magnetic-moment ratio omega_E / omega_G
    double sigma_f = 0.0;                               // spectral diffusion linewidth per emitter, Hz
    std::array<double, 2> path_length{0.0, 0.0};        // emitter to beamsplitter, m
    double epsilon = 0.0;                               // time-of-flight estimation error, s
    double alpha = 0.01;                                // weak excitation parameter
    double wait_T = 1e-6;                               // wait T after each excitation, s

    [[nodiscard]] double lifetime_ratio() const { return gamma_a / gamma_b; }
    [[nodiscard]] double mean_time_of_flight() const { return (path_length[0] + path_length[1]) / (2.0 * kSpeedOfLight); }
    [[nodiscard]] double time_of_flight_difference() const { return (path_length[1] - path_length[0]) / kSpeedOfLight; }

    void validate() const {
        auto require = [](bool ok, const char *msg) {
            if (!ok) {
                throw std::invalid_argument(msg);
            }
        };
        require(gamma_b > 0.0, "gamma_b must be positive");
        require(gamma_a >= 0.0, "gamma_a must be non-negative");
        require(sigma_f >= 0.0, "sigma_f must be non-negative");
        require(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
        require(wait_T >= 0.0, "wait_T must be non-negative");
        require(path_length[0] >= 0.0 && path_length[1] >= 0.0, "path lengths must be non-negative");
    }

    /// Non-fatal configuration concerns.
    [[nodiscard]] std::vector<std::string> warnings() const {
        std::vector<std::string> out;
        if (std::abs(time_of_flight_difference()) * gamma_b > 0.01) {
            out.emplace_back("time-of-flight difference is not small compared to the optical lifetime (|dT| * gamma_b > 0.01)");
        }
        return out;
    }
};

/// Values for every parameter symbol except the per-attempt spectral
/// diffusion offsets and emission times.
inline Valuation base_valuation(const EmitterPair &p) {
    Valuation v;
    for (int i = 1; i <= 2; ++i) {
        v.set(omega_bar(i), p.mean_frequency[i - 1]);
        v.set(laser(i), p.laser_frequency[i - 1]);
        v.set(ground_detuning(i), p.ground_detuning[i - 1]);
        v.set(excited_detuning(i), p.excited_detuning[i - 1]);
    }
    v.set(TimeSymbol::T, p.wait_T);
    v.set(TimeSymbol::T_0, p.mean_time_of_flight());
    v.set(TimeSymbol::delta_T, p.time_of_flight_difference());
    v.set(TimeSymbol::epsilon, p.epsilon);
    return v;
}

/// Fills in the optical frequencies for one draw of spectral diffusion.
inline Valuation &set_spectral_offsets(Valuation &v, double delta_1, double delta_2) {
    v.set(FreqSymbol::delta_1, delta_1);
    v.set(FreqSymbol::delta_2, delta_2);
    double w1 = v.get(FreqSymbol::omega_bar_1) + delta_1;
    double w2 = v.get(FreqSymbol::omega_bar_2) + delta_2;
    v.set(FreqSymbol::omega_1, w1);
    v.set(FreqSymbol::omega_2, w2);
    v.set(FreqSymbol::omega_0, 0.5 * (w1 + w2));
    return v;
}

}  // namespace rephase
