#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rephase/sequence.hpp"

namespace rephase {

inline constexpr std::array<std::string_view, 7> kBuiltinNames = {
    "single_standard",
    "single_rephase",
    "single_rephase_shelved",
    "two_photon_standard",
    "two_photon_rephase",
    "two_photon_rephase_shelved",
    "two_photon_rephase_shelved_flipped",
};

namespace detail {

using T = TimeSymbol;

inline Instruction rg(Angle a) { return rot(Transition::ground, a); }
inline Instruction re(Angle a) { return rot(Transition::excited, a); }
inline Instruction ro() { return rot(Transition::optical, Angle::pi); }

inline std::vector<Instruction> single_generation() {
    return {rg(Angle::alpha), ro(), emit("w1"), detect(Detector::plus, T::tau), wait(T::T)};
}

inline std::vector<Instruction> two_photon_generation() {
    return {rg(Angle::half_pi), ro(), emit("w1"), detect(Detector::plus, T::tau_1), wait(T::T),
            rg(Angle::pi),      ro(), emit("w2"), detect(Detector::plus, T::tau_2), wait(T::T)};
}

// Final spin refocusing wait of the two-photon rephasing: t1 * (a + b r).
inline Instruction refocus_wait(RCoeff c) { return wait(Duration().add(T::t_1, c)); }

inline std::vector<Instruction> concat(std::vector<Instruction> a, const std::vector<Instruction> &b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

}  // namespace detail

/// Built-in protocol sequences. Two-photon rephasing branches on detection
/// order: the then-branch handles tau2 >= tau1, the else-branch moves the
/// first ground pi pulse to the end.
inline Sequence builtin(std::string_view name) {
    using namespace detail;
    const Angle pi = Angle::pi;

    if (name == "single_standard") {
        return Sequence(std::string(name), single_generation());
    }
    if (name == "single_rephase") {
        Duration t2 = Duration(T::T).add(T::t_1, RCoeff{-1, 0});
        return Sequence(std::string(name), concat(single_generation(), {rg(pi), ro(), wait(T::t_1), ro(), wait(t2)}));
    }
    if (name == "single_rephase_shelved") {
        Duration t2 = Duration(T::T).add(T::t_1, RCoeff{-1, 1});
        return Sequence(std::string(name),
                        concat(single_generation(), {rg(pi), ro(), re(pi), wait(T::t_1), re(pi), ro(), wait(t2)}));
    }
    if (name == "two_photon_standard") {
        return Sequence(std::string(name), two_photon_generation());
    }
    if (name == "two_photon_rephase") {
        auto a = std::vector<Instruction>{rg(pi), ro(), wait(T::t_1), ro(), rg(pi), wait(T::t_1)};
        auto b = std::vector<Instruction>{ro(), wait(T::t_1), ro(), rg(pi), wait(T::t_1), rg(pi)};
        return Sequence(std::string(name), concat(two_photon_generation(), {branch_order(a, b)}));
    }
    if (name == "two_photon_rephase_shelved") {
        RCoeff one_minus_r{1, -1};
        auto a = std::vector<Instruction>{rg(pi), ro(), re(pi), wait(T::t_1), re(pi), ro(), rg(pi), refocus_wait(one_minus_r)};
        auto b = std::vector<Instruction>{ro(), re(pi), wait(T::t_1), re(pi), ro(), rg(pi), refocus_wait(one_minus_r), rg(pi)};
        return Sequence(std::string(name), concat(two_photon_generation(), {branch_order(a, b)}));
    }
    if (name == "two_photon_rephase_shelved_flipped") {
        // Excited splitting larger than ground: the ground pi pulse between the
        // shelving return and the refocusing wait is dropped.
        RCoeff r_minus_one{-1, 1};
        auto a = std::vector<Instruction>{rg(pi), ro(), re(pi), wait(T::t_1), re(pi), ro(), refocus_wait(r_minus_one)};
        auto b = std::vector<Instruction>{ro(), re(pi), wait(T::t_1), re(pi), ro(), refocus_wait(r_minus_one), rg(pi)};
        return Sequence(std::string(name), concat(two_photon_generation(), {branch_order(a, b)}));
    }
    throw std::invalid_argument("unknown built-in sequence '" + std::string(name) + "'");
}

inline bool is_builtin(std::string_view name) {
    for (auto n : kBuiltinNames) {
        if (n == name) {
            return true;
        }
    }
    return false;
}

}  // namespace rephase
