#pragma once

// Command-line front end. Kept in a header so the test suite can drive the
// commands in-process and inspect their output and exit codes.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rephase/rephase.hpp"
#include "rephase/report_json.hpp"

namespace rephase::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kRuntime = 3 };

enum class Expectation { standard, epsilon_only, none };

inline std::string to_string(Expectation e) {
    switch (e) {
        case Expectation::standard:
            return "standard (depends on emission time)";
        case Expectation::epsilon_only:
            return "rephased (only the time-of-flight error eps remains)";
        case Expectation::none:
            return "fully rephased (no unknown phase)";
    }
    return "?";
}

inline Expectation expectation_for(const Sequence &seq) {
    if (!seq.rephases()) {
        return Expectation::standard;
    }
    return seq.detection_count() == 1 ? Expectation::epsilon_only : Expectation::none;
}

inline bool meets(Expectation e, const LinearPhase &unknown) {
    switch (e) {
        case Expectation::standard:
            return unknown.contains_time(TimeSymbol::t_0) || unknown.contains_time(TimeSymbol::tau) ||
                   unknown.contains_time(TimeSymbol::tau_1) || unknown.contains_time(TimeSymbol::tau_2);
        case Expectation::epsilon_only:
            for (const auto &[key, c] : unknown.terms()) {
                if (key.second != TimeSymbol::epsilon) {
                    return false;
                }
            }
            return unknown.pi_constant().is_zero();
        case Expectation::none:
            return unknown == LinearPhase{};
    }
    return false;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::vector<double> parse_list(const std::string &s) {
    try {
        return parse_grid(s);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
}

struct Context {
    std::ostream &out;
    std::ostream &err;
};

inline int verify(Context ctx, const std::string &file, const std::string &builtin_name, const Config &cfg,
                  const std::string &branch, const std::string &expect, bool json) {
    std::optional<Sequence> seq;
    try {
        if (!builtin_name.empty()) {
            seq = builtin(builtin_name);
        } else if (!file.empty()) {
            seq = parse(read_file(file), file);
        } else {
            ctx.err << "verify: give a sequence file or --builtin NAME\n";
            return kUsage;
        }
    } catch (const ParseError &e) {
        ctx.err << file << ": " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument &e) {
        ctx.err << "verify: " << e.what() << '\n';
        return kUsage;
    }

    RunOptions opts = cfg.run;
    opts.branch = branch == "else" ? BranchChoice::else_branch : BranchChoice::then_branch;
    Expectation want = expectation_for(*seq);
    if (expect == "standard") {
        want = Expectation::standard;
    } else if (expect == "epsilon") {
        want = Expectation::epsilon_only;
    } else if (expect == "none") {
        want = Expectation::none;
    }

    BellReport rep;
    try {
        rep = run(*seq, cfg.emitters, opts).report;
    } catch (const EngineError &e) {
        ctx.err << "verify: " << e.what() << '\n';
        return kRuntime;
    }
    bool pass = meets(want, rep.unknown_part);
    if (json) {
        nlohmann::json j = to_json(rep);
        j["sequence"] = seq->name();
        j["expected"] = want == Expectation::standard ? "standard" : want == Expectation::epsilon_only ? "epsilon" : "none";
        j["pass"] = pass;
        ctx.out << j.dump(2) << '\n';
    } else {
        ctx.out << "sequence:         " << seq->name() << '\n'
                << "heralded kets:    " << to_string(rep.ket_a) << ", " << to_string(rep.ket_b)
                << "  sign " << (rep.heralded_sign > 0 ? '+' : '-') << '\n'
                << "relative phase:   " << rep.relative_phase << '\n'
                << "unknown residual: " << rep.unknown_part << '\n'
                << "expected:         " << to_string(want) << '\n'
                << (pass ? "PASS" : "FAIL") << '\n';
    }
    return pass ? kOk : kFail;
}

inline std::vector<StrategyParams> strategy_sets(Strategy s, const std::string &values, double gamma_b) {
    std::vector<StrategyParams> out;
    for (double v : parse_list(values)) {
        StrategyParams p{s, v, gamma_b};
        try {
            p.validate();
        } catch (const std::invalid_argument &e) {
            throw ConfigError(e.what());
        }
        out.push_back(p);
    }
    return out;
}

inline int curve(Context ctx, const std::string &strategy, const std::string &xs, const std::string &thetas,
                 const std::string &fa, std::uint64_t mc_n, std::uint64_t seed, unsigned workers, bool unnormalized,
                 const std::string &out_path) {
    Strategy s = parse_strategy(strategy);
    auto sets = strategy_sets(s, s == Strategy::rephase ? xs : thetas, 1.0);
    std::vector<double> grid = parse_list(fa);
    for (double f : grid) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw ConfigError("acceptance fractions must lie in (0, 1]");
        }
    }
    std::vector<FidelityCurve> curves;
    for (const auto &p : sets) {
        if (mc_n > 0) {
            if (mc_n < 1000) {
                throw ConfigError("--mc needs at least 1000 samples");
            }
            curves.push_back(mc_curve(p, grid, mc_n, seed, McOptions{.workers = workers}));
        } else {
            curves.push_back(analytic_curve(p, grid, !unnormalized));
        }
    }
    if (out_path.empty()) {
        write_csv(ctx.out, curves);
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            ctx.err << "curve: cannot write '" << out_path << "'\n";
            return kRuntime;
        }
        write_csv(f, curves);
        std::size_t rows = 0;
        for (const auto &c : curves) {
            rows += c.points.size();
        }
        ctx.out << "wrote " << rows << " rows to " << out_path << '\n';
    }
    return kOk;
}

inline int tradeoff(Context ctx, double target, const std::string &xs, const std::string &thetas, double tol,
                    bool csv) {
    if (!(target > 0.5 && target < 1.0)) {
        ctx.err << "tradeoff: invalid target fidelity " << target << ": must lie in (0.5, 1)\n";
        return kUsage;
    }
    std::vector<StrategyParams> sets;
    if (xs.empty() && thetas.empty()) {
        sets = strategy_sets(Strategy::rephase, "0.01,0.1,1", 1.0);
        auto ps = strategy_sets(Strategy::postselect, "0.1,1,10", 1.0);
        sets.insert(sets.end(), ps.begin(), ps.end());
    } else {
        if (!xs.empty()) {
            sets = strategy_sets(Strategy::rephase, xs, 1.0);
        }
        if (!thetas.empty()) {
            auto ps = strategy_sets(Strategy::postselect, thetas, 1.0);
            sets.insert(sets.end(), ps.begin(), ps.end());
        }
    }
    auto rows = compare(sets, target, tol);
    if (csv) {
        write_tradeoff_csv(ctx.out, rows);
    } else {
        write_tradeoff_table(ctx.out, rows);
    }
    return kOk;
}

/// Sequence and emitter parameters an mc run uses for a configuration.
inline StrategyModel mc_model(const Config &cfg) {
    StrategyModel m{cfg.sequence, cfg.emitters};
    if (cfg.strategy_given) {
        StrategyModel s = strategy_model(cfg.strategy, cfg.emitters.sigma_f);
        m.params.gamma_a = s.params.gamma_a;
        m.params.sigma_f = s.params.sigma_f;
        if (m.sequence.empty()) {
            m.sequence = s.sequence;
        }
    }
    if (m.sequence.empty()) {
        m.sequence = "single_rephase_shelved";
    }
    return m;
}

inline nlohmann::json params_json(const EmitterPair &p) {
    nlohmann::json j;
    j["gamma_b"] = p.gamma_b;
    j["gamma_a"] = p.gamma_a;
    j["sigma_f_hz"] = p.sigma_f;
    j["r"] = p.r.str();
    j["epsilon"] = p.epsilon;
    j["alpha"] = p.alpha;
    j["wait_T"] = p.wait_T;
    j["path_length"] = p.path_length;
    return j;
}

inline int mc(Context ctx, const Config &cfg) {
    cfg.validate();
    StrategyModel m = mc_model(cfg);
    if (!is_builtin(m.sequence)) {
        throw ConfigError("unknown built-in sequence '" + m.sequence + "'");
    }
    McOptions opts{.workers = cfg.workers, .run = cfg.run};
    MCEstimate e = mc_fidelity(m.sequence, m.params, cfg.f_a, cfg.n, cfg.seed, opts);
    nlohmann::json j;
    j["mean"] = e.mean;
    j["stderr"] = e.stderr_;
    j["n"] = e.n_samples;
    j["seed"] = e.seed;
    j["f_a"] = cfg.f_a;
    j["sequence"] = m.sequence;
    j["params"] = params_json(m.params);
    if (cfg.output.empty()) {
        ctx.out << j.dump(2) << '\n';
    } else {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f) {
            ctx.err << "mc: cannot write '" << cfg.output << "'\n";
            return kRuntime;
        }
        f << j.dump(2) << '\n';
    }
    return kOk;
}

inline int params(Context ctx, const Config &cfg, std::optional<double> delta_split, std::optional<double> kappa,
                  bool json) {
    cfg.validate();
    const EmitterPair &p = cfg.emitters;
    nlohmann::json j;
    j["t2_star"] = p.sigma_f > 0.0 ? nlohmann::json(t2_star(p.sigma_f)) : nlohmann::json("inf");
    j["lifetime_ratio_x"] = p.lifetime_ratio();
    if (delta_split && kappa) {
        j["purcell_ratio_x"] = purcell_ratio(*delta_split, *kappa);
    }
    double tc = acceptance_to_cutoff(cfg.f_a, p.gamma_b);
    j["f_a"] = cfg.f_a;
    j["t_c"] = std::isinf(tc) ? nlohmann::json("inf") : nlohmann::json(tc);
    j["mean_time_of_flight"] = p.mean_time_of_flight();
    j["time_of_flight_difference"] = p.time_of_flight_difference();
    j["warnings"] = p.warnings();
    if (json) {
        ctx.out << j.dump(2) << '\n';
        return kOk;
    }
    for (const auto &[k, v] : j.items()) {
        if (k == "warnings") {
            continue;
        }
        ctx.out << k << " = " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    }
    for (const auto &w : p.warnings()) {
        ctx.err << "warning: " << w << '\n';
    }
    return kOk;
}

/// Entry point shared by the executable and the tests.
inline int main(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"rephase: time-bin entanglement protocol verifier and fidelity calculator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rephase 0.1.0");

    std::string config_file;
    std::vector<std::string> overrides;
    auto add_config = [&](CLI::App *sub) {
        sub->add_option("--config", config_file, "key=value configuration file");
        sub->add_option("--set", overrides, "override a configuration key (key=value), repeatable");
    };

    Context ctx{out, err};

    auto *verify_cmd = app.add_subcommand("verify", "symbolically verify a sequence's phase cancellation");
    std::string seq_file;
    std::string builtin_name;
    std::string branch = "then";
    std::string expect = "auto";
    bool json = false;
    bool no_correlated = false;
    bool no_expand = false;
    bool path_unknown = false;
    verify_cmd->add_option("file", seq_file, "pulse-sequence file (.seq)");
    verify_cmd->add_option("--builtin", builtin_name, "built-in sequence name");
    verify_cmd->add_option("--branch", branch, "detection-order branch for symbolic runs")->check(CLI::IsMember({"then", "else"}));
    verify_cmd->add_option("--expect", expect, "expected residual class")
        ->check(CLI::IsMember({"auto", "standard", "epsilon", "none"}));
    verify_cmd->add_flag("--json", json, "print the Bell report as JSON");
    verify_cmd->add_flag("--no-correlated-shelf", no_correlated, "keep excited detunings independent of ground detunings");
    verify_cmd->add_flag("--no-expand", no_expand, "report phases in omega_i instead of omega_bar_i + Delta_i");
    verify_cmd->add_flag("--path-term-unknown", path_unknown, "classify the omega_0 dT path term as unknown");
    add_config(verify_cmd);

    auto *curve_cmd = app.add_subcommand("curve", "fidelity versus acceptance fraction as CSV");
    std::string strategy = "rephase";
    std::string xs = "0.01,0.1,1";
    std::string thetas = "0.1,1,10";
    std::string fa = "0.01:1:0.01";
    std::uint64_t mc_n = 0;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    bool unnormalized = false;
    std::string out_path;
    curve_cmd->add_option("--strategy", strategy, "rephase or postselect")->check(CLI::IsMember({"rephase", "postselect"}));
    curve_cmd->add_option("--x", xs, "lifetime ratios x (comma list or start:stop:step)");
    curve_cmd->add_option("--theta", thetas, "spectral diffusion ratios theta");
    curve_cmd->add_option("--fa", fa, "acceptance fractions");
    curve_cmd->add_option("--mc", mc_n, "Monte Carlo samples per point instead of the analytic form");
    curve_cmd->add_option("--seed", seed, "Monte Carlo seed");
    curve_cmd->add_option("--workers", workers, "Monte Carlo worker threads (0: all cores)");
    curve_cmd->add_flag("--unnormalized", unnormalized, "post-selection integral without the 1/f_A normalization");
    curve_cmd->add_option("-o,--out", out_path, "output CSV path (default stdout)");

    auto *trade_cmd = app.add_subcommand("tradeoff", "largest acceptance fraction reaching a target fidelity");
    double target = 0.0;
    std::string rx;
    std::string rtheta;
    double tol = 1e-9;
    bool csv = false;
    trade_cmd->add_option("--target", target, "target fidelity")->required();
    trade_cmd->add_option("--rephase-x", rx, "rephasing lifetime ratios");
    trade_cmd->add_option("--postselect-theta", rtheta, "post-selection spectral diffusion ratios");
    trade_cmd->add_option("--tol", tol, "bisection tolerance on f_A");
    trade_cmd->add_flag("--csv", csv, "CSV instead of an aligned table");

    auto *mc_cmd = app.add_subcommand("mc", "Monte Carlo fidelity estimate as JSON");
    add_config(mc_cmd);
    std::vector<std::pair<std::string, std::string>> flag_keys;
    auto keyed = [&](CLI::App *sub, const std::string &flag, const std::string &key, const std::string &help) {
        sub->add_option_function<std::string>(
            flag, [&flag_keys, key](const std::string &v) { flag_keys.emplace_back(key, v); }, help);
    };
    keyed(mc_cmd, "--strategy", "strategy", "rephase or postselect");
    keyed(mc_cmd, "--x", "x", "lifetime ratio Gamma_A / Gamma_B");
    keyed(mc_cmd, "--theta", "theta", "spectral diffusion ratio sigma_f / Gamma_B");
    keyed(mc_cmd, "--sequence", "sequence", "built-in sequence");
    keyed(mc_cmd, "--fa", "f_a", "acceptance fraction");
    keyed(mc_cmd, "--n", "n", "samples");
    keyed(mc_cmd, "--seed", "seed", "seed");
    keyed(mc_cmd, "--workers", "workers", "worker threads (0: all cores)");
    keyed(mc_cmd, "--sigma-f", "sigma_f", "spectral diffusion linewidth, Hz");
    keyed(mc_cmd, "-o,--out", "output", "output JSON path (default stdout)");

    auto *params_cmd = app.add_subcommand("params", "derived quantities: T2*, x, t_c");
    add_config(params_cmd);
    std::optional<double> delta_split;
    std::optional<double> kappa;
    bool params_json_flag = false;
    keyed(params_cmd, "--fa", "f_a", "acceptance fraction");
    keyed(params_cmd, "--sigma-f", "sigma_f", "spectral diffusion linewidth, Hz");
    keyed(params_cmd, "--gamma-b", "gamma_b", "emitting transition decay rate, 1/s");
    keyed(params_cmd, "--gamma-a", "gamma_a", "shelving transition decay rate, 1/s");
    params_cmd->add_option("--delta-split", delta_split, "splitting between the two optical transitions, Hz");
    params_cmd->add_option("--kappa", kappa, "cavity linewidth, Hz");
    params_cmd->add_flag("--json", params_json_flag, "JSON output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        Config cfg;
        if (!config_file.empty()) {
            load_config_file(cfg, config_file);
        }
        for (const auto &[k, v] : flag_keys) {
            cfg.set(k, v);
        }
        for (const auto &kv : overrides) {
            apply_override(cfg, kv);
        }
        if (*verify_cmd) {
            cfg.run.assume_correlated_shelf = !no_correlated;
            cfg.run.expand_mean_frequencies = !no_expand;
            cfg.run.classify_path_term_unknown = cfg.run.classify_path_term_unknown || path_unknown;
            return verify(ctx, seq_file, builtin_name, cfg, branch, expect, json);
        }
        if (*curve_cmd) {
            return curve(ctx, strategy, xs, thetas, fa, mc_n, seed, workers, unnormalized, out_path);
        }
        if (*trade_cmd) {
            return tradeoff(ctx, target, rx, rtheta, tol, csv);
        }
        if (*mc_cmd) {
            return mc(ctx, cfg);
        }
        return params(ctx, cfg, delta_split, kappa, params_json_flag);
    } catch (const ConfigError &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
}

inline int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    std::vector<const char *> argv{"rephase"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    return main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace rephase::cli
