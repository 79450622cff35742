#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "rephase/builtins.hpp"
#include "rephase/engine.hpp"
#include "rephase/parser.hpp"

using namespace rephase;
using F = FreqSymbol;
using T = TimeSymbol;
using L = Level;

namespace {

using SymState = JointState<SymbolicPhases>;

SymState single_ket(Ket k) {
    SymState s;
    s.kets.emplace(k, Amplitude<SymbolicPhases>{});
    return s;
}

LinearPhase ft(F f, T t, Rational c = 1) { return LinearPhase::term(f, t, c); }

double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

// Replaces the detector of the n-th detection in program order.
std::vector<Instruction> flip_detector(std::vector<Instruction> body, int which) {
    int seen = 0;
    for (auto &ins : body) {
        if (ins.is<DetectEvent>() && seen++ == which) {
            DetectEvent d = ins.as<DetectEvent>();
            d.detector = d.detector == Detector::plus ? Detector::minus : Detector::plus;
            ins = Instruction{d};
        }
    }
    return body;
}

RunOptions correlated() {
    RunOptions o;
    o.assume_correlated_shelf = true;
    return o;
}

}  // namespace

TEST(Wait, GroundDownIsDark) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = single_ket({L::down_g, L::down_g});
    e.apply_wait(s, TimeExpr(T::T));
    EXPECT_TRUE(s.kets.at({L::down_g, L::down_g}).phase.is_zero());
}

TEST(Wait, ExcitedEmitterAndGroundSpin) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = single_ket({L::down_e, L::up_g});
    e.apply_wait(s, TimeExpr(T::T));
    EXPECT_EQ(s.kets.at({L::down_e, L::up_g}).phase, ft(F::omega_1, T::T) + ft(F::delta_g_2, T::T));
}

TEST(Wait, ShelvedEmitter) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = single_ket({L::up_e, L::up_g});
    e.apply_wait(s, TimeExpr(T::t_1));
    EXPECT_EQ(s.kets.at({L::up_e, L::up_g}).phase,
              ft(F::omega_1, T::t_1) + ft(F::delta_e_1, T::t_1) + ft(F::delta_g_2, T::t_1));
    EXPECT_EQ(s.kets.at({L::up_e, L::up_g}).shelf_time, TimeExpr(T::t_1));
}

TEST(Rotation, GroundPiIsPauliX) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = single_ket({L::up_g, L::up_e});
    e.apply_rotation(s, Transition::ground, Angle::pi, TimeExpr{});
    ASSERT_EQ(s.kets.size(), 1u);
    // -i on emitter 1 only; emitter 2 sits outside the ground manifold.
    EXPECT_EQ(s.kets.at({L::down_g, L::up_e}).phase, LinearPhase::pi_multiple(Rational(1, 2)));
}

TEST(Rotation, WeakExcitationAmplitudes) {
    EmitterPair p;
    p.alpha = 0.04;
    Engine<SymbolicPhases> e(SymbolicPhases{}, p);
    SymState s = SymState::initial();
    e.apply_rotation(s, Transition::ground, Angle::alpha, TimeExpr{});
    e.apply_rotation(s, Transition::optical, Angle::pi, TimeExpr{});
    EXPECT_NEAR(s.kets.at({L::up_g, L::up_g}).magnitude, 1 - p.alpha, 1e-15);
    EXPECT_NEAR(s.kets.at({L::up_g, L::down_e}).magnitude, std::sqrt(p.alpha * (1 - p.alpha)), 1e-15);
    EXPECT_NEAR(s.kets.at({L::down_e, L::up_g}).magnitude, std::sqrt(p.alpha * (1 - p.alpha)), 1e-15);
    EXPECT_NEAR(s.kets.at({L::down_e, L::down_e}).magnitude, p.alpha, 1e-15);

    RunOptions angle;
    angle.alpha_as_amplitude = true;
    Engine<SymbolicPhases> e2(SymbolicPhases{}, p, angle);
    SymState s2 = SymState::initial();
    e2.apply_rotation(s2, Transition::ground, Angle::alpha, TimeExpr{});
    double c = std::cos(p.alpha / 2);
    EXPECT_NEAR(s2.kets.at({L::up_g, L::up_g}).magnitude, c * c, 1e-15);
}

TEST(Rotation, OpticalRoundTripImprintsLaserPhase) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = single_ket({L::down_g, L::up_g});
    e.apply_rotation(s, Transition::optical, Angle::pi, s.clock);
    e.apply_wait(s, TimeExpr(T::t_1));
    e.apply_rotation(s, Transition::optical, Angle::pi, s.clock);
    const LinearPhase &phi = s.kets.at({L::down_g, L::up_g}).phase;
    EXPECT_EQ(phi.coefficient(F::laser_1, T::t_1), Rational(-1));
    EXPECT_EQ(phi.coefficient(F::omega_1, T::t_1), Rational(1));
    EXPECT_EQ(phi.pi_constant(), Rational(1));
}

TEST(Rotation, OpticalMustBePi) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = SymState::initial();
    EXPECT_THROW(e.apply_rotation(s, Transition::optical, Angle::half_pi, TimeExpr{}), EngineError);
}

TEST(Detection, HeraldsBellStateWithDetectorSign) {
    for (Detector d : {Detector::plus, Detector::minus}) {
        auto body = builtin("single_standard").instructions();
        if (d == Detector::minus) {
            body = flip_detector(body, 0);
        }
        SymbolicRun r = run(Sequence("s", body), EmitterPair{});
        EXPECT_EQ(r.state.kets.size(), 2u);
        EXPECT_EQ(r.report.heralded_sign, d == Detector::plus ? 1 : -1);
        EXPECT_EQ(r.state.kets.at(r.report.ket_a).magnitude, r.state.kets.at(r.report.ket_b).magnitude);
    }
}

TEST(Detection, DoubleExcitationIsHeraldImpurity) {
    for (double alpha : {0.001, 0.01, 0.2}) {
        EmitterPair p;
        p.alpha = alpha;
        SymbolicRun r = run(builtin("single_standard"), p);
        EXPECT_NEAR(r.report.herald_impurity, alpha, 1e-12);
        EXPECT_NEAR(r.state.norm(), 1.0, 1e-12);
    }
}

TEST(Detection, ImpossibleHerald) {
    Sequence s = parse("rg pi; emit w; detect D+ tau");
    EXPECT_THROW(run(s, EmitterPair{}), HeraldError);
}

TEST(Run, StandardSinglePhotonResidual) {
    BellReport r = run(builtin("single_standard"), EmitterPair{}).report;
    // (w2 - w1) t0 - (Dg2 - Dg1) T with w_i expanded about the mean.
    LinearPhase want = ft(F::delta_2, T::t_0) - ft(F::delta_1, T::t_0) - ft(F::delta_g_2, T::T) + ft(F::delta_g_1, T::T);
    EXPECT_EQ(r.unknown_part, want);
    EXPECT_TRUE(r.unknown_part.contains_time(T::t_0));
}

TEST(Run, RephasedSinglePhotonResidual) {
    BellReport r = run(builtin("single_rephase"), EmitterPair{}).report;
    EXPECT_EQ(r.unknown_part, ft(F::delta_1, T::epsilon) - ft(F::delta_2, T::epsilon));
    EXPECT_FALSE(r.unknown_part.contains_time(T::t_0));
}

TEST(Run, ShelvedResidualNeedsCorrelation) {
    BellReport independent = run(builtin("single_rephase_shelved"), EmitterPair{}).report;
    EXPECT_TRUE(independent.unknown_part.contains_freq(F::delta_e_1));
    BellReport r = run(builtin("single_rephase_shelved"), EmitterPair{}, correlated()).report;
    EXPECT_EQ(r.unknown_part, ft(F::delta_1, T::epsilon) - ft(F::delta_2, T::epsilon));
}

TEST(Run, ShelvedResidualForOtherRatios) {
    for (Rational r : {Rational(1, 3), Rational(7, 5), Rational(-2, 3)}) {
        EmitterPair p;
        p.r = r;
        BellReport rep = run(builtin("single_rephase_shelved"), p, correlated()).report;
        EXPECT_EQ(rep.unknown_part, ft(F::delta_1, T::epsilon) - ft(F::delta_2, T::epsilon)) << r;
    }
}

TEST(Run, TwoPhotonRelativePhases) {
    BellReport standard = run(builtin("two_photon_standard"), EmitterPair{}).report;
    RunOptions raw;
    raw.expand_mean_frequencies = false;
    BellReport unexpanded = run(builtin("two_photon_standard"), EmitterPair{}, raw).report;
    // -(w2 - w1)(tau2 - tau1) - (wL2 - wL1) T
    LinearPhase want = ft(F::omega_1, T::tau_2) - ft(F::omega_2, T::tau_2) - ft(F::omega_1, T::tau_1) +
                       ft(F::omega_2, T::tau_1) + ft(F::laser_1, T::T) - ft(F::laser_2, T::T);
    EXPECT_EQ(unexpanded.relative_phase, want);
    EXPECT_EQ(standard.unknown_part,
              ft(F::delta_1, T::tau_2) - ft(F::delta_2, T::tau_2) - ft(F::delta_1, T::tau_1) + ft(F::delta_2, T::tau_1));

    // -(wL2 - wL1)(tau2 - tau1) - (wL2 - wL1) T
    LinearPhase rephased = ft(F::laser_1, T::tau_2) - ft(F::laser_2, T::tau_2) - ft(F::laser_1, T::tau_1) +
                           ft(F::laser_2, T::tau_1) + ft(F::laser_1, T::T) - ft(F::laser_2, T::T);
    BellReport r = run(builtin("two_photon_rephase"), EmitterPair{}).report;
    EXPECT_TRUE(r.unknown_part.is_zero());
    EXPECT_EQ(r.relative_phase, rephased);
}

TEST(Run, SymbolicBranchNeedsTwoClicks) {
    Sequence s = parse("emit w; detect D+ tau; branch_order { wait T } { wait T }");
    EXPECT_THROW(run(s, EmitterPair{}), EngineError);
}

TEST(Properties, NormPreservedInstructionByInstruction) {
    EmitterPair p;
    p.alpha = 0.05;
    for (auto name : kBuiltinNames) {
        Sequence seq = builtin(name);
        Engine<SymbolicPhases> e(SymbolicPhases{}, p, correlated());
        SymState s = e.start(seq);
        for (const auto &ins : seq.instructions()) {
            e.execute(s, {ins});
            EXPECT_NEAR(s.norm(), 1.0, 1e-12) << name;
        }
    }
}

bool equal_mod_2pi(const LinearPhase &a, const LinearPhase &b) {
    LinearPhase d = a - b;
    Rational k = d.pi_constant();
    return d.symbolic_part().is_zero() && k.is_integer() && k.num() % 2 == 0;
}

SymState pulses(Transition which, int count) {
    Engine<SymbolicPhases> e(SymbolicPhases{}, EmitterPair{});
    SymState s = SymState::initial();
    e.apply_rotation(s, Transition::ground, Angle::half_pi, TimeExpr{});
    for (int k = 0; k < count; ++k) {
        e.apply_rotation(s, which, Angle::pi, s.clock);
    }
    return s;
}

TEST(Properties, RepeatedPiPulses) {
    SymState before = pulses(Transition::ground, 0);
    SymState ground2 = pulses(Transition::ground, 2);
    SymState optical2 = pulses(Transition::optical, 2);
    SymState optical4 = pulses(Transition::optical, 4);
    ASSERT_EQ(ground2.kets.size(), before.kets.size());
    ASSERT_EQ(optical4.kets.size(), before.kets.size());
    std::optional<LinearPhase> global;
    for (const auto &[k, a] : before.kets) {
        // Ground pi twice: -1 on every emitter, a global phase.
        LinearPhase d = ground2.kets.at(k).phase - a.phase;
        if (!global) {
            global = d;
        }
        EXPECT_TRUE(equal_mod_2pi(d, *global)) << to_string(k);
        EXPECT_NEAR(ground2.kets.at(k).magnitude, a.magnitude, 1e-15);

        // Optical 4 pi is the identity; 2 pi flips the sign of each coupled emitter.
        EXPECT_TRUE(equal_mod_2pi(optical4.kets.at(k).phase, a.phase)) << to_string(k);
        int coupled = (k.at(1) == L::down_g) + (k.at(2) == L::down_g);
        LinearPhase want = a.phase + LinearPhase::pi_multiple(Rational(coupled));
        EXPECT_TRUE(equal_mod_2pi(optical2.kets.at(k).phase, want)) << to_string(k);
    }
}

TEST(Properties, DetectorFlipOnlyFlipsSign) {
    for (auto name : kBuiltinNames) {
        Sequence seq = builtin(name);
        BellReport base = run(seq, EmitterPair{}, correlated()).report;
        for (int k = 0; k < seq.detection_count(); ++k) {
            BellReport flipped = run(Sequence("f", flip_detector(seq.instructions(), k)), EmitterPair{}, correlated()).report;
            EXPECT_EQ(flipped.heralded_sign, -base.heralded_sign) << name;
            EXPECT_EQ(flipped.relative_phase, base.relative_phase) << name;
            EXPECT_EQ(flipped.unknown_part, base.unknown_part) << name;
            EXPECT_EQ(flipped.ket_a, base.ket_a);
            EXPECT_EQ(flipped.ket_b, base.ket_b);
        }
    }
}

TEST(Properties, StandardVersusRephasedContract) {
    auto std_res = run(builtin("single_standard"), EmitterPair{}).report.unknown_part;
    auto reph_res = run(builtin("single_rephase"), EmitterPair{}).report.unknown_part;
    EXPECT_TRUE(std_res.contains_time(T::t_0));
    EXPECT_FALSE(reph_res.contains_time(T::t_0));
    for (const auto &[key, c] : reph_res.terms()) {
        EXPECT_EQ(key.second, T::epsilon);
    }
}

// Branch (b) with the detection times swapped must reproduce branch (a).
TEST(Properties, TwoPhotonBranchSymmetry) {
    auto swap = [](const TimeExpr &e) {
        TimeExpr out;
        for (const auto &[sym, c] : e.terms()) {
            out.add(sym == T::tau_1 ? T::tau_2 : sym == T::tau_2 ? T::tau_1 : sym, c);
        }
        return out;
    };
    for (const char *name : {"two_photon_rephase", "two_photon_rephase_shelved", "two_photon_rephase_shelved_flipped"}) {
        RunOptions a = correlated();
        RunOptions b = correlated();
        b.branch = BranchChoice::else_branch;
        BellReport ra = run(builtin(name), EmitterPair{}, a).report;
        BellReport rb = run(builtin(name), EmitterPair{}, b).report;
        EXPECT_EQ(ra.unknown_part, rb.unknown_part) << name;
        EXPECT_TRUE(ra.unknown_part.is_zero()) << name;
        // Swapping the labels of the clicks turns one branch's timing into the other's.
        EXPECT_EQ(swap(rb.shelf_time), ra.shelf_time) << name;
    }
}

TEST(Properties, CrossEngineAgreement) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> freq(-2e7, 2e7);
    std::uniform_real_distribution<double> small(-2e5, 2e5);
    std::uniform_real_distribution<double> time(0.0, 2e-6);
    int checked = 0;
    for (auto name : kBuiltinNames) {
        for (int draw = 0; draw < 100; ++draw) {
            EmitterPair p;
            p.alpha = 0.02;
            // the flipped variant is the one for r > 1
            p.r = name == "two_photon_rephase_shelved_flipped" ? Rational(3, 2) : Rational(1, 2);
            p.path_length = {time(rng) * 3e8, time(rng) * 3e8};
            p.epsilon = time(rng) * 1e-2;
            p.wait_T = 2e-6 + time(rng);
            for (int i = 0; i < 2; ++i) {
                p.mean_frequency[i] = freq(rng);
                p.laser_frequency[i] = freq(rng);
                p.ground_detuning[i] = small(rng);
                p.excited_detuning[i] = p.r.to_double() * p.ground_detuning[i];
            }
            Valuation v = base_valuation(p);
            set_spectral_offsets(v, small(rng), small(rng));
            v.set(T::t_0, time(rng));
            v.set(T::tau_1, time(rng));
            v.set(T::tau_2, time(rng));

            Sequence seq = builtin(name);
            NumericRun num = run_numeric(seq, p, v, correlated());
            RunOptions o = correlated();
            o.branch = num.branch.value_or(BranchChoice::then_branch);
            BellReport rep = run(seq, p, o).report;
            double symbolic = evaluate(rep.relative_phase, v) + (rep.heralded_sign < 0 ? std::numbers::pi : 0.0);
            EXPECT_LT(std::abs(wrap(symbolic - num.relative_phase)), 1e-9) << name << " draw " << draw;
            EXPECT_EQ(num.ket_a, rep.ket_a);
            EXPECT_NEAR(num.survival, survival_probability(rep, p, v), 1e-12);
            ++checked;
        }
    }
    EXPECT_EQ(checked, 700);
}

TEST(Properties, AlphaConventionDoesNotChangePhases) {
    for (auto name : kBuiltinNames) {
        RunOptions probability = correlated();
        RunOptions amplitude = correlated();
        amplitude.alpha_as_amplitude = true;
        EmitterPair p;
        p.alpha = 0.1;
        BellReport a = run(builtin(name), p, probability).report;
        BellReport b = run(builtin(name), p, amplitude).report;
        EXPECT_EQ(a.relative_phase, b.relative_phase) << name;
        EXPECT_EQ(a.heralded_sign, b.heralded_sign) << name;
    }
}
