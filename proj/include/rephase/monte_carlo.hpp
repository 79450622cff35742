#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rephase/builtins.hpp"
#include "rephase/emitter.hpp"
#include "rephase/engine.hpp"
#include "rephase/fidelity.hpp"
#include "rephase/random.hpp"

namespace rephase {

struct MCEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;
};

struct McOptions {
    unsigned workers = 0;          // 0: hardware concurrency
    std::uint64_t block = 4096;    // samples per work unit; fixes the summation order
    RunOptions run{};
};

namespace detail {

inline void collect_detections(const std::vector<Instruction> &body, std::vector<TimeSymbol> &out) {
    for (const auto &ins : body) {
        if (ins.is<DetectEvent>()) {
            out.push_back(ins.as<DetectEvent>().time);
        }
    }
}

// Part of a phase carried by the spectral diffusion offsets Delta_1, Delta_2.
inline LinearPhase spectral_part(const LinearPhase &p) {
    LinearPhase out;
    for (const auto &[key, c] : p.terms()) {
        if (key.first == FreqSymbol::delta_1 || key.first == FreqSymbol::delta_2) {
            out.add_term(key.first, key.second, c);
        }
    }
    return out;
}

}  // namespace detail

/// Per-attempt Bell overlap of a heralded sequence under quasi-static
/// spectral diffusion. The sequence is solved symbolically once per branch;
/// each draw then only evaluates the resulting expressions.
class FidelitySampler {
  public:
    FidelitySampler(const Sequence &seq, EmitterPair params, RunOptions options = {})
        : params_(std::move(params)), base_(base_valuation(params_)) {
        options.expand_mean_frequencies = true;
        detail::collect_detections(seq.instructions(), detections_);
        if (detections_.empty() || detections_.size() > 2) {
            throw std::invalid_argument("sequence '" + seq.name() + "' must herald on one or two detections");
        }
        for (BranchChoice b : {BranchChoice::then_branch, BranchChoice::else_branch}) {
            options.branch = b;
            BellReport rep = run(seq, params_, options).report;
            branches_.push_back({CompiledPhase(detail::spectral_part(rep.relative_phase)), rep.shelf_time,
                                 rep.excited_time});
        }
    }

    /// Fidelity of one attempt, drawing offsets and emission times from `rng`.
    /// Emission times follow Exp(gamma_b) truncated at the cutoff of f_a.
    double sample(CounterRng &rng, double f_a) const {
        Valuation v = base_;
        double scale = 2.0 * std::numbers::pi * params_.sigma_f;
        std::normal_distribution<double> normal(0.0, 1.0);
        double d1 = scale * normal(rng);
        double d2 = scale * normal(rng);
        set_spectral_offsets(v, d1, d2);
        double times[2] = {0.0, 0.0};
        for (std::size_t k = 0; k < detections_.size(); ++k) {
            times[k] = -std::log1p(-rng.uniform() * f_a) / params_.gamma_b;
        }
        const Branch *b = &branches_[0];
        if (detections_.size() == 1) {
            v.set(TimeSymbol::t_0, times[0]);
            v.set(detections_[0], times[0] + params_.mean_time_of_flight());
        } else {
            v.set(detections_[0], times[0] + params_.mean_time_of_flight());
            v.set(detections_[1], times[1] + params_.mean_time_of_flight());
            if (times[1] < times[0]) {
                b = &branches_[1];
            }
        }
        double dphi = b->spectral(v);
        double survival = std::exp(-params_.gamma_a * evaluate(b->shelf_time, v) -
                                   params_.gamma_b * evaluate(b->excited_time, v));
        return survival * 0.5 * (1.0 + std::cos(dphi));
    }

    [[nodiscard]] const EmitterPair &params() const { return params_; }

  private:
    struct Branch {
        CompiledPhase spectral;
        TimeExpr shelf_time;
        TimeExpr excited_time;
    };

    EmitterPair params_;
    Valuation base_;
    std::vector<TimeSymbol> detections_;
    std::vector<Branch> branches_;
};

/// Mean fidelity over n attempts. Sample k always uses stream k of `seed`
/// and blocks are reduced in index order, so the result is bit-identical
/// for any worker count.
inline MCEstimate mc_fidelity(const Sequence &seq, const EmitterPair &params, double f_a, std::uint64_t n,
                              std::uint64_t seed, const McOptions &opts = {}) {
    if (n < 1000) {
        throw std::invalid_argument("Monte Carlo needs at least 1000 samples");
    }
    detail::require_acceptance(f_a);
    FidelitySampler sampler(seq, params, opts.run);

    std::uint64_t block = std::max<std::uint64_t>(1, opts.block);
    std::uint64_t n_blocks = (n + block - 1) / block;
    std::vector<double> sums(n_blocks, 0.0);
    std::vector<double> squares(n_blocks, 0.0);
    std::atomic<std::uint64_t> next{0};

    auto worker = [&] {
        for (std::uint64_t b = next++; b < n_blocks; b = next++) {
            double s = 0.0;
            double q = 0.0;
            std::uint64_t end = std::min(n, (b + 1) * block);
            for (std::uint64_t k = b * block; k < end; ++k) {
                CounterRng rng(seed, k);
                double f = sampler.sample(rng, f_a);
                s += f;
                q += f * f;
            }
            sums[b] = s;
            squares[b] = q;
        }
    };

    unsigned workers = opts.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opts.workers;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) {
            pool.emplace_back(worker);
        }
        worker();
    }

    double sum = 0.0;
    double sq = 0.0;
    for (std::uint64_t b = 0; b < n_blocks; ++b) {
        sum += sums[b];
        sq += squares[b];
    }
    auto nd = static_cast<double>(n);
    double mean = sum / nd;
    double var = std::max(0.0, (sq - sum * mean) / (nd - 1.0));
    return {std::clamp(mean, 0.0, 1.0), std::sqrt(var / nd), n, seed};
}

inline MCEstimate mc_fidelity(const std::string &name, const EmitterPair &params, double f_a, std::uint64_t n,
                              std::uint64_t seed, const McOptions &opts = {}) {
    return mc_fidelity(builtin(name), params, f_a, n, seed, opts);
}

/// Emitter pair and sequence realising a strategy point: rephasing runs the
/// shelved single-photon protocol with Gamma_A = x Gamma_B, post-selection
/// the standard protocol with sigma_f = theta Gamma_B.
struct StrategyModel {
    std::string sequence;
    EmitterPair params;
};

inline StrategyModel strategy_model(const StrategyParams &p, double sigma_f_for_rephase = 0.0) {
    p.validate();
    StrategyModel m;
    m.params.gamma_b = p.gamma_b;
    m.params.epsilon = 0.0;
    if (p.strategy == Strategy::rephase) {
        m.sequence = "single_rephase_shelved";
        m.params.gamma_a = p.param * p.gamma_b;
        m.params.sigma_f = sigma_f_for_rephase;
    } else {
        m.sequence = "single_standard";
        m.params.sigma_f = p.param * p.gamma_b;
    }
    return m;
}

inline MCEstimate mc_strategy(const StrategyParams &p, double f_a, std::uint64_t n, std::uint64_t seed,
                              const McOptions &opts = {}, double sigma_f_for_rephase = 0.0) {
    StrategyModel m = strategy_model(p, sigma_f_for_rephase);
    McOptions o = opts;
    o.run.assume_correlated_shelf = true;
    return mc_fidelity(m.sequence, m.params, f_a, n, seed, o);
}

inline FidelityCurve mc_curve(const StrategyParams &p, const std::vector<double> &f_grid, std::uint64_t n,
                              std::uint64_t seed, const McOptions &opts = {}) {
    FidelityCurve curve{p, Provenance::mc, {}};
    for (double f : f_grid) {
        MCEstimate e = mc_strategy(p, f, n, seed, opts);
        curve.points.push_back({f, e.mean, e.stderr_});
    }
    return curve;
}

}  // namespace rephase
