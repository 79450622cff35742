#pragma once

#include <string>

#include "json.hpp"
#include "rephase/engine.hpp"

namespace rephase {

/// Terms as [coefficient, frequency symbol, time symbol] triples, with
/// exact rational coefficients as strings.
inline nlohmann::json terms_json(const LinearPhase &p) {
    auto out = nlohmann::json::array();
    for (const auto &[key, c] : p.terms()) {
        out.push_back({c.str(), std::string(name(key.first)), std::string(name(key.second))});
    }
    return out;
}

inline nlohmann::json to_json(const BellReport &r) {
    nlohmann::json j;
    j["kets"] = {to_string(r.ket_a), to_string(r.ket_b)};
    j["relative_phase"] = terms_json(r.relative_phase);
    j["pi_constant"] = r.relative_phase.pi_constant().str();
    j["unknown_terms"] = terms_json(r.unknown_part);
    j["sign"] = r.heralded_sign;
    j["herald_impurity"] = r.herald_impurity;
    if (r.branch) {
        j["branch"] = *r.branch == BranchChoice::then_branch ? "then" : "else";
    }
    return j;
}

}  // namespace rephase
