#include <gtest/gtest.h>

#include <random>
#include <string>

#include "rephase/builtins.hpp"
#include "rephase/parser.hpp"

using namespace rephase;
using T = TimeSymbol;

namespace {

int count_rotations(const std::vector<Instruction> &body, Transition which, Angle angle) {
    int n = 0;
    for (const auto &ins : body) {
        if (ins.is<Rotate>() && ins.as<Rotate>().which == which && ins.as<Rotate>().angle == angle) {
            ++n;
        } else if (ins.is<BranchOnOrder>()) {
            n += count_rotations(ins.as<BranchOnOrder>().then_branch, which, angle);
            n += count_rotations(ins.as<BranchOnOrder>().else_branch, which, angle);
        }
    }
    return n;
}

ParseError parse_error(const std::string &text) {
    try {
        parse(text);
    } catch (const ParseError &e) {
        return e;
    }
    ADD_FAILURE() << "no parse error for: " << text;
    return ParseError(0, 0, "");
}

}  // namespace

TEST(Parse, MinimalProgram) {
    Sequence s = parse("rg pi/2; ro pi; emit w1; detect D+ tau;");
    ASSERT_EQ(s.instructions().size(), 4u);
    EXPECT_EQ(s.instructions()[0], rot(Transition::ground, Angle::half_pi));
    EXPECT_EQ(s.instructions()[1], rot(Transition::optical, Angle::pi));
    EXPECT_EQ(s.instructions()[2], emit("w1"));
    EXPECT_EQ(s.instructions()[3], detect(Detector::plus, T::tau));
}

TEST(Parse, EmptyIsAnError) {
    ParseError e = parse_error("");
    EXPECT_NE(std::string(e.what()).find("empty sequence"), std::string::npos);
    parse_error("# only a comment\n\n");
}

// Steps 1-5 of the single-photon rephasing timeline, typed in by hand.
TEST(Parse, TranscribedRephasingEqualsBuiltin) {
    const char *text = R"(
        # generation
        rg alpha
        ro pi
        emit w1
        detect D+ tau
        wait T
        # rephasing
        rg pi
        ro pi
        wait t1
        ro pi
        wait T - t1
    )";
    EXPECT_EQ(parse(text, "single_rephase"), builtin("single_rephase"));
}

TEST(Parse, AffineDurationInR) {
    Sequence s = parse("emit w; detect D- tau; wait T - (1-r)*t1; wait 2.5e-6; wait r*t2 + 1/3*eps");
    Duration d1 = Duration(T::T).add(T::t_1, RCoeff{-1, 1});
    EXPECT_EQ(s.instructions()[2], wait(d1));
    EXPECT_EQ(s.instructions()[3], wait(Duration().add(T::unit, RCoeff{Rational(5, 2000000), 0})));
    EXPECT_EQ(s.instructions()[4], wait(Duration().add(T::t_2, RCoeff{0, 1}).add(T::epsilon, RCoeff{Rational(1, 3), 0})));
}

TEST(Parse, ErrorsCarryPosition) {
    ParseError e = parse_error("rg pi\nro pi\nwait zeta");
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 6);
    EXPECT_NE(std::string(e.what()).find("unknown time symbol"), std::string::npos);

    e = parse_error("rg pi; detect D+ tau");
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 8);
    EXPECT_NE(std::string(e.what()).find("without a preceding emit"), std::string::npos);

    e = parse_error("rg pi/3");
    EXPECT_EQ(e.column(), 7);
    e = parse_error("frobnicate");
    EXPECT_EQ(e.column(), 1);
    e = parse_error("rg pi ro pi");
    EXPECT_EQ(e.column(), 7);
    e = parse_error("emit a; emit b; detect D+ tau");
    EXPECT_NE(std::string(e.what()).find("more than one"), std::string::npos);
    e = parse_error("wait (1-r)");
    EXPECT_NE(std::string(e.what()).find("must multiply a time symbol"), std::string::npos);
}

TEST(Builtin, StandardIsGenerationOnly) {
    Sequence s = builtin("single_standard");
    std::vector<Instruction> want = {rot(Transition::ground, Angle::alpha), rot(Transition::optical, Angle::pi), emit("w1"),
                                     detect(Detector::plus, T::tau), wait(T::T)};
    EXPECT_EQ(s.instructions(), want);
    EXPECT_FALSE(s.rephases());
}

TEST(Builtin, ShelvedSingleHasTwoExcitedPiPulses) {
    Sequence s = builtin("single_rephase_shelved");
    EXPECT_EQ(count_rotations(s.instructions(), Transition::excited, Angle::pi), 2);
    EXPECT_EQ(count_rotations(builtin("single_rephase").instructions(), Transition::excited, Angle::pi), 0);
}

TEST(Builtin, ShelvedVariantDiffersOnlyByShelvingAndT2) {
    auto plain = builtin("single_rephase").instructions();
    auto shelved = builtin("single_rephase_shelved").instructions();
    ASSERT_EQ(shelved.size(), plain.size() + 2);
    std::vector<Instruction> stripped;
    for (const auto &ins : shelved) {
        if (!(ins.is<Rotate>() && ins.as<Rotate>().which == Transition::excited)) {
            stripped.push_back(ins);
        }
    }
    ASSERT_EQ(stripped.size(), plain.size());
    for (std::size_t k = 0; k + 1 < plain.size(); ++k) {
        EXPECT_EQ(stripped[k], plain[k]) << "instruction " << k;
    }
    EXPECT_EQ(plain.back(), wait(Duration(T::T).add(T::t_1, RCoeff{-1, 0})));
    EXPECT_EQ(stripped.back(), wait(Duration(T::T).add(T::t_1, RCoeff{-1, 1})));
}

TEST(Builtin, FlippedOmitsGroundPiBeforeFinalWait) {
    auto then_branch = [](const Sequence &s) { return s.instructions().back().as<BranchOnOrder>().then_branch; };
    auto flipped = then_branch(builtin("two_photon_rephase_shelved_flipped"));
    auto normal = then_branch(builtin("two_photon_rephase_shelved"));
    auto ground_pi_between_return_and_final_wait = [](const std::vector<Instruction> &body) {
        // The shelving return is the last optical pi; the final wait ends the branch.
        std::size_t last_optical = 0;
        for (std::size_t k = 0; k < body.size(); ++k) {
            if (body[k] == rot(Transition::optical, Angle::pi)) {
                last_optical = k;
            }
        }
        for (std::size_t k = last_optical + 1; k + 1 < body.size(); ++k) {
            if (body[k] == rot(Transition::ground, Angle::pi)) {
                return true;
            }
        }
        return false;
    };
    EXPECT_FALSE(ground_pi_between_return_and_final_wait(flipped));
    EXPECT_TRUE(ground_pi_between_return_and_final_wait(normal));
}

TEST(Builtin, TwoPhotonRephaseBranchesOnOrder) {
    Sequence s = builtin("two_photon_rephase");
    ASSERT_TRUE(s.instructions().back().is<BranchOnOrder>());
    EXPECT_EQ(s.detection_count(), 2);
    EXPECT_TRUE(s.rephases());
}

TEST(Builtin, UnknownNameIsAnError) {
    EXPECT_THROW(builtin("triple_photon"), std::invalid_argument);
    EXPECT_FALSE(is_builtin("triple_photon"));
}

TEST(RoundTrip, AllBuiltins) {
    for (auto name : kBuiltinNames) {
        Sequence s = builtin(name);
        EXPECT_EQ(parse(render(s), std::string(name)), s) << render(s);
    }
}

TEST(RoundTrip, RandomPrograms) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> pick(0, 5);
    std::uniform_int_distribution<int> num(-7, 7);
    std::uniform_int_distribution<int> den(1, 5);
    std::uniform_int_distribution<std::size_t> sym(0, kNumTimeSymbols - 1);
    auto random_duration = [&] {
        Duration d;
        int terms = 1 + pick(rng) % 3;
        for (int k = 0; k < terms; ++k) {
            T s = kAllTimeSymbols[sym(rng)];
            RCoeff c{Rational(num(rng), den(rng)), s == T::unit ? Rational(0) : Rational(num(rng) % 3, den(rng))};
            d.add(s, c);
        }
        if (d.terms().empty()) {
            d.add(T::T, RCoeff{1, 0});
        }
        return d;
    };
    auto random_body = [&](auto &&self, int depth) -> std::vector<Instruction> {
        std::vector<Instruction> body;
        int n = 1 + pick(rng);
        for (int k = 0; k < n; ++k) {
            switch (pick(rng)) {
                case 0:
                    body.push_back(rot(Transition::ground, static_cast<Angle>(pick(rng) % 3)));
                    break;
                case 1:
                    body.push_back(rot(pick(rng) % 2 ? Transition::excited : Transition::optical, Angle::pi));
                    break;
                case 2:
                case 3:
                    body.push_back(wait(random_duration()));
                    break;
                case 4:
                    body.push_back(emit("w" + std::to_string(k)));
                    body.push_back(detect(pick(rng) % 2 ? Detector::plus : Detector::minus, T::tau_1));
                    break;
                default:
                    if (depth == 0) {
                        body.push_back(branch_order(self(self, 1), self(self, 1)));
                    }
            }
        }
        return body;
    };
    for (int trial = 0; trial < 300; ++trial) {
        Sequence s("random", random_body(random_body, 0));
        EXPECT_EQ(parse(render(s), "random"), s) << render(s);
    }
}
