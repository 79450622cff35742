#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rephase/emitter.hpp"
#include "rephase/phase.hpp"
#include "rephase/sequence.hpp"
#include "rephase/state.hpp"

namespace rephase {

enum class BranchChoice { then_branch, else_branch };

struct RunOptions {
    /// Replace excited spin detunings by r times the ground detunings before
    /// classifying the residual (correlated magnetic noise on the shelf).
    bool assume_correlated_shelf = false;
    /// Rewrite omega_i as omega_bar_i + Delta_i in the reported phase.
    bool expand_mean_frequencies = true;
    /// Treat alpha as a rotation angle instead of an excitation probability.
    bool alpha_as_amplitude = false;
    /// Count the omega_0 * delta_T path term as unknown.
    bool classify_path_term_unknown = false;
    /// Branch taken by symbolic runs, which have no detection timestamps.
    BranchChoice branch = BranchChoice::then_branch;
};

/// Heralded Bell pair and its relative phase phi(ket_b) - phi(ket_a), where
/// ket_a is the branch in which emitter 1 produced the first heralding photon.
struct BellReport {
    Ket ket_a{};
    Ket ket_b{};
    LinearPhase raw_relative_phase;  // in terms of omega_i, after timing rules
    LinearPhase relative_phase;      // after mean-frequency and correlation rules
    LinearPhase unknown_part;
    int heralded_sign = 1;
    double herald_impurity = 0.0;
    TimeExpr shelf_time;     // time in the shelving level up_e
    TimeExpr excited_time;   // time in down_e outside emission windows
    Substitution timing;
    std::optional<BranchChoice> branch;
};

namespace detail {

/// Reduces a multiple of pi into [0, 2).
inline Rational reduce_mod_two(const Rational &c) {
    std::int64_t period = 2 * c.den();
    std::int64_t n = c.num() % period;
    if (n < 0) {
        n += period;
    }
    return Rational(n, c.den());
}

struct RotationCoefficients {
    double stay;
    double flip;
};

}  // namespace detail

/// Executes pulse sequences on a JointState. The phase policy decides whether
/// phases are exact symbolic expressions or numbers.
template <class Policy>
class Engine {
  public:
    using State = JointState<Policy>;
    using time_type = typename Policy::time_type;

    Engine(Policy policy, EmitterPair params, RunOptions options = {})
        : policy_(std::move(policy)), params_(std::move(params)), options_(options) {
        params_.validate();
    }

    /// Free evolution under the rotating-frame Hamiltonian.
    void apply_wait(State &state, const TimeExpr &duration) const {
        time_type d = policy_.time(substitute(duration, timing_));
        policy_.check_duration(d);
        for (auto &[ket, amp] : state.kets) {
            for (int i = 1; i <= 2; ++i) {
                switch (ket.at(i)) {
                    case Level::up_e:
                        policy_.add(amp.phase, omega(i), d);
                        policy_.add(amp.phase, excited_detuning(i), d);
                        amp.shelf_time = amp.shelf_time + d;
                        break;
                    case Level::down_e:
                        policy_.add(amp.phase, omega(i), d);
                        amp.excited_time = amp.excited_time + d;
                        break;
                    case Level::up_g:
                        policy_.add(amp.phase, ground_detuning(i), d);
                        break;
                    case Level::down_g:
                        break;
                }
            }
        }
        state.clock = state.clock + d;
    }

    /// Rotation R(theta) = exp(-i theta X / 2) on both emitters. Optical
    /// rotations must be pi pulses and imprint the laser phase at `at_time`.
    void apply_rotation(State &state, Transition which, Angle angle, const time_type &at_time) const {
        if (which == Transition::optical && angle != Angle::pi) {
            throw EngineError("optical rotations must be pi pulses");
        }
        auto coeff = coefficients(angle);
        for (int i = 1; i <= 2; ++i) {
            std::map<Ket, Amplitude<Policy>> next;
            for (const auto &[ket, amp] : state.kets) {
                auto partner = partner_level(which, ket.at(i));
                if (!partner) {
                    insert(next, ket, amp);
                    continue;
                }
                if (coeff.stay != 0.0) {
                    Amplitude<Policy> stay = amp;
                    stay.magnitude *= coeff.stay;
                    insert(next, ket, stay);
                }
                if (coeff.flip != 0.0) {
                    Amplitude<Policy> flip = amp;
                    flip.magnitude *= coeff.flip;
                    policy_.add_pi(flip.phase, Rational(1, 2));
                    if (which == Transition::optical) {
                        // exp(-i w_L t) on excitation, exp(+i w_L t) on de-excitation.
                        Rational sign = ket.at(i) == Level::down_g ? Rational(1) : Rational(-1);
                        policy_.add(flip.phase, laser(i), at_time, sign);
                    }
                    insert(next, ket.with(i, *partner), flip);
                }
            }
            state.kets = std::move(next);

            std::map<Ket, double> next_impurity;
            for (const auto &[ket, w] : state.impurity) {
                auto partner = partner_level(which, ket.at(i));
                if (!partner) {
                    next_impurity[ket] += w;
                    continue;
                }
                if (coeff.stay != 0.0) {
                    next_impurity[ket] += w * coeff.stay * coeff.stay;
                }
                if (coeff.flip != 0.0) {
                    next_impurity[ket.with(i, *partner)] += w * coeff.flip * coeff.flip;
                }
            }
            state.impurity = std::move(next_impurity);
        }
    }

    /// Spontaneous emission from down_e followed by a click on `detector` at
    /// time `at` after the excitation of `window`. Kets that cannot produce
    /// the click are projected out; kets where both emitters emit move to the
    /// impurity record with twice their weight.
    void apply_emission_and_detection(State &state, const std::string &window, Detector detector, TimeSymbol at) {
        state.clicks.push_back({detector, at, window});
        if (expected_detections_ == 1 && state.clicks.size() == 1) {
            // Single herald: emission time t0 = tau - T0, shelve for t0 + eps.
            timing_.set(at, TimeExpr(TimeSymbol::t_0) + TimeExpr(TimeSymbol::T_0));
            timing_.set(TimeSymbol::t_1, TimeExpr(TimeSymbol::t_0) + TimeExpr(TimeSymbol::epsilon));
        }
        time_type detect_time = policy_.time(substitute(TimeExpr(at), timing_));
        time_type flight = policy_.time(substitute(TimeExpr(TimeSymbol::T_0), timing_));
        time_type flight_diff = policy_.time(substitute(TimeExpr(TimeSymbol::delta_T), timing_));

        std::map<Ket, Amplitude<Policy>> next;
        std::map<Ket, double> next_impurity;
        double total = 0.0;
        for (const auto &[ket, amp] : state.kets) {
            int emitting = emitting_emitter(ket);
            if (emitting == 0) {
                continue;
            }
            double weight = amp.magnitude * amp.magnitude;
            if (emitting == 3) {
                next_impurity[Ket{Level::down_g, Level::down_g}] += 2.0 * weight;
                total += 2.0 * weight;
                continue;
            }
            Amplitude<Policy> out = amp;
            // Photon phase k_i x_i - omega_i tau, with k_i x_i = omega_i (T0 -/+ dT/2)
            // and the dT part written on the mean frequency omega_0.
            policy_.add(out.phase, omega(emitting), detect_time);
            policy_.add(out.phase, omega(emitting), flight, Rational(-1));
            policy_.add(out.phase, FreqSymbol::omega_0, flight_diff, emitting == 1 ? Rational(1, 2) : Rational(-1, 2));
            if (detector == Detector::minus && emitting == 2) {
                policy_.add_pi(out.phase, 1);
            }
            if (out.origin == 0) {
                out.origin = emitting;
            }
            total += weight;
            insert(next, ket.with(emitting, Level::down_g), out);
        }
        for (const auto &[ket, w] : state.impurity) {
            int emitting = emitting_emitter(ket);
            if (emitting == 0) {
                continue;
            }
            Ket after = emitting == 3 ? Ket{Level::down_g, Level::down_g} : ket.with(emitting, Level::down_g);
            double weight = emitting == 3 ? 2.0 * w : w;
            next_impurity[after] += weight;
            total += weight;
        }
        if (next.empty()) {
            throw HeraldError("impossible herald: no coherent ket can produce a click in window '" + window + "'");
        }
        double scale = 1.0 / std::sqrt(total);
        for (auto &[ket, amp] : next) {
            amp.magnitude *= scale;
        }
        for (auto &[ket, w] : next_impurity) {
            w /= total;
        }
        state.kets = std::move(next);
        state.impurity = std::move(next_impurity);
    }

    void execute(State &state, const std::vector<Instruction> &body) {
        for (const Instruction &ins : body) {
            if (ins.is<Rotate>()) {
                const auto &op = ins.as<Rotate>();
                apply_rotation(state, op.which, op.angle, state.clock);
            } else if (ins.is<Wait>()) {
                apply_wait(state, ins.as<Wait>().duration.resolve(params_.r));
            } else if (ins.is<EmitWindow>()) {
                window_ = ins.as<EmitWindow>().label;
            } else if (ins.is<DetectEvent>()) {
                const auto &op = ins.as<DetectEvent>();
                apply_emission_and_detection(state, window_, op.detector, op.time);
            } else {
                const auto &op = ins.as<BranchOnOrder>();
                if (state.clicks.size() < 2) {
                    throw EngineError("unresolved branch: detection order needs two clicks");
                }
                TimeSymbol first = state.clicks[state.clicks.size() - 2].time;
                TimeSymbol second = state.clicks.back().time;
                auto numeric = policy_.second_not_earlier(first, second);
                bool take_then = numeric ? *numeric : options_.branch == BranchChoice::then_branch;
                branch_ = take_then ? BranchChoice::then_branch : BranchChoice::else_branch;
                TimeExpr diff = TimeExpr(second) - TimeExpr(first);
                timing_.set(TimeSymbol::t_1, take_then ? diff : Rational(-1) * diff);
                execute(state, take_then ? op.then_branch : op.else_branch);
            }
        }
    }

    /// Resets per-run bookkeeping for `seq` and returns the initial state.
    State start(const Sequence &seq) {
        expected_detections_ = seq.detection_count();
        timing_ = Substitution{};
        window_.clear();
        branch_.reset();
        return State::initial();
    }

    State run(const Sequence &seq) {
        State state = start(seq);
        execute(state, seq.instructions());
        return state;
    }

    [[nodiscard]] const Substitution &timing() const { return timing_; }
    [[nodiscard]] std::optional<BranchChoice> branch() const { return branch_; }
    [[nodiscard]] const Policy &policy() const { return policy_; }
    [[nodiscard]] const EmitterPair &params() const { return params_; }
    [[nodiscard]] const RunOptions &options() const { return options_; }

  private:
    static std::optional<Level> partner_level(Transition which, Level l) {
        switch (which) {
            case Transition::ground:
                if (l == Level::up_g) return Level::down_g;
                if (l == Level::down_g) return Level::up_g;
                return std::nullopt;
            case Transition::excited:
                if (l == Level::up_e) return Level::down_e;
                if (l == Level::down_e) return Level::up_e;
                return std::nullopt;
            case Transition::optical:
                if (l == Level::down_g) return Level::down_e;
                if (l == Level::down_e) return Level::down_g;
                return std::nullopt;
        }
        return std::nullopt;
    }

    // 0: no emitter in down_e, 1 or 2: that emitter, 3: both.
    static int emitting_emitter(const Ket &k) {
        return (k.first == Level::down_e ? 1 : 0) + (k.second == Level::down_e ? 2 : 0);
    }

    [[nodiscard]] detail::RotationCoefficients coefficients(Angle angle) const {
        switch (angle) {
            case Angle::pi:
                return {0.0, 1.0};
            case Angle::half_pi:
                return {std::numbers::sqrt2 / 2.0, std::numbers::sqrt2 / 2.0};
            case Angle::alpha:
                if (options_.alpha_as_amplitude) {
                    return {std::cos(params_.alpha / 2.0), std::sin(params_.alpha / 2.0)};
                }
                return {std::sqrt(1.0 - params_.alpha), std::sqrt(params_.alpha)};
        }
        return {1.0, 0.0};
    }

    void insert(std::map<Ket, Amplitude<Policy>> &into, const Ket &ket, const Amplitude<Policy> &amp) const {
        auto [it, inserted] = into.try_emplace(ket, amp);
        if (inserted) {
            return;
        }
        Amplitude<Policy> &cur = it->second;
        if (cur.origin != amp.origin || !(cur.shelf_time == amp.shelf_time) || !(cur.excited_time == amp.excited_time)) {
            throw EngineError("interference between kets with different histories at " + to_string(ket));
        }
        auto [m, p] = policy_.merge(cur.magnitude, cur.phase, amp.magnitude, amp.phase);
        if (m < 1e-15) {
            into.erase(it);
            return;
        }
        cur.magnitude = m;
        cur.phase = std::move(p);
    }

    Policy policy_;
    EmitterPair params_;
    RunOptions options_;
    Substitution timing_;
    std::string window_;
    int expected_detections_ = 0;
    std::optional<BranchChoice> branch_;
};

struct SymbolicRun {
    JointState<SymbolicPhases> state;
    BellReport report;
};

namespace detail {

template <class Policy>
std::pair<const Amplitude<Policy> *, const Amplitude<Policy> *> bell_pair(const JointState<Policy> &state, Ket &a,
                                                                          Ket &b) {
    const Amplitude<Policy> *pa = nullptr;
    const Amplitude<Policy> *pb = nullptr;
    for (const auto &[ket, amp] : state.kets) {
        if (amp.origin == 1 && pa == nullptr) {
            pa = &amp;
            a = ket;
        } else if (amp.origin == 2 && pb == nullptr) {
            pb = &amp;
            b = ket;
        }
    }
    if (state.kets.size() != 2 || pa == nullptr || pb == nullptr) {
        throw EngineError("final state is not a heralded two-ket Bell state");
    }
    return {pa, pb};
}

}  // namespace detail

inline Classification classification_for(const RunOptions &options) {
    Classification cls;
    if (options.classify_path_term_unknown) {
        cls.set(FreqSymbol::omega_0, Tag::unknown);
    }
    return cls;
}

/// Rules applied to the relative phase before classification.
inline Substitution analysis_rules(const EmitterPair &params, const RunOptions &options) {
    Substitution s;
    for (int i = 1; i <= 2; ++i) {
        if (options.expand_mean_frequencies) {
            s.set(omega(i), FreqExpr(omega_bar(i)) + FreqExpr(spectral_offset(i)));
        }
        if (options.assume_correlated_shelf) {
            s.set(excited_detuning(i), FreqExpr(ground_detuning(i), params.r));
        }
    }
    return s;
}

/// Runs a sequence with exact symbolic phases and extracts the Bell report.
inline SymbolicRun run(const Sequence &seq, const EmitterPair &params, const RunOptions &options = {}) {
    Engine<SymbolicPhases> engine(SymbolicPhases{}, params, options);
    SymbolicRun out{engine.run(seq), {}};
    BellReport &rep = out.report;
    auto [pa, pb] = detail::bell_pair(out.state, rep.ket_a, rep.ket_b);

    LinearPhase raw = substitute(pb->phase - pa->phase, engine.timing());
    Rational c = detail::reduce_mod_two(raw.pi_constant());
    if (c == Rational(1)) {
        rep.heralded_sign = -1;
        c = 0;
    }
    raw = raw.symbolic_part();
    raw.add_pi(c);

    rep.raw_relative_phase = raw;
    rep.relative_phase = substitute(raw, analysis_rules(params, options));
    rep.unknown_part = unknown_residual(rep.relative_phase, classification_for(options));
    rep.herald_impurity = out.state.impurity_weight();
    rep.shelf_time = substitute(pa->shelf_time, engine.timing());
    rep.excited_time = substitute(pa->excited_time, engine.timing());
    rep.timing = engine.timing();
    rep.branch = engine.branch();
    return out;
}

/// Probability of surviving the shelving step for one parameter draw.
inline double survival_probability(const BellReport &rep, const EmitterPair &params, const Valuation &v) {
    return std::exp(-params.gamma_a * evaluate(rep.shelf_time, v) - params.gamma_b * evaluate(rep.excited_time, v));
}

struct NumericRun {
    JointState<NumericPhases> state;
    Ket ket_a{};
    Ket ket_b{};
    double relative_phase = 0.0;  // phi(ket_b) - phi(ket_a), detector sign included
    double survival = 1.0;
    double herald_impurity = 0.0;
    std::optional<BranchChoice> branch;
};

/// Runs a sequence for one concrete assignment of every symbol.
inline NumericRun run_numeric(const Sequence &seq, const EmitterPair &params, const Valuation &values,
                              const RunOptions &options = {}) {
    Engine<NumericPhases> engine(NumericPhases{values}, params, options);
    NumericRun out;
    out.state = engine.run(seq);
    auto [pa, pb] = detail::bell_pair(out.state, out.ket_a, out.ket_b);
    out.relative_phase = pb->phase - pa->phase;
    double wa = pa->magnitude * pa->magnitude;
    double wb = pb->magnitude * pb->magnitude;
    auto survive = [&](const Amplitude<NumericPhases> *a) {
        return std::exp(-params.gamma_a * a->shelf_time - params.gamma_b * a->excited_time);
    };
    out.survival = (wa * survive(pa) + wb * survive(pb)) / (wa + wb);
    out.herald_impurity = out.state.impurity_weight();
    out.branch = engine.branch();
    return out;
}

}  // namespace rephase
