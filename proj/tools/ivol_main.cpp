// ivol_main.cpp - Command-line surface: classification reports, boundary
// curves, value profiles, strike selection, and Monte Carlo verification.
//
// Exit codes: 0 success, 1 usage/parse error, 2 solver failure,
// 3 verification failure.

#include "ivol/report.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace ivol;

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::string format = "csv";
    std::optional<double> mu0, sigma0, mu1, sigma1, lambda, alpha, strike_K, s0, s;
    SimConfig mc;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mc) {
    cmd->add_option("--config", o.config_path, "flat key = value parameter file");
    cmd->add_option("--out", o.out_dir, "output directory for emitted files");
    cmd->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"csv", "jsonl"}));
    cmd->add_option("--mu0", o.mu0, "pre-switch drift (overrides config)");
    cmd->add_option("--sigma0", o.sigma0, "pre-switch volatility");
    cmd->add_option("--mu1", o.mu1, "excited drift");
    cmd->add_option("--sigma1", o.sigma1, "excited volatility");
    cmd->add_option("--lambda", o.lambda, "absorption rate (per year)");
    cmd->add_option("--alpha", o.alpha, "discount rate (per year)");
    cmd->add_option("--strike-K", o.strike_K, "strike level");
    cmd->add_option("--s0", o.s0, "volatility-switch level");
    cmd->add_option("--s", o.s, "present price of the underlying");
    if (with_mc) {
        cmd->add_option("--seed", o.mc.seed, "master Monte Carlo seed");
        cmd->add_option("--paths", o.mc.n_paths, "number of Monte Carlo paths");
        cmd->add_option("--dt", o.mc.dt, "time step near barriers (years)");
        cmd->add_option("--tmax", o.mc.t_max, "truncation horizon (years)");
    }
}

struct Loaded {
    ModelParams params;
    std::optional<double> s_now;
};

Loaded load(const CommonOpts& o) {
    Loaded l;
    if (!o.config_path.empty()) {
        const FileConfig fc = parse_config_file(o.config_path);
        l.params = fc.params;
        l.s_now = fc.s_now;
    } else {
        const bool all = o.mu0 && o.sigma0 && o.mu1 && o.sigma1 && o.lambda &&
                         o.alpha && o.strike_K && o.s0;
        if (!all)
            throw std::runtime_error(
                "no --config given, so all of --mu0 --sigma0 --mu1 --sigma1 "
                "--lambda --alpha --strike-K --s0 are required");
    }
    if (o.mu0) l.params.mu0 = *o.mu0;
    if (o.sigma0) l.params.sigma0 = *o.sigma0;
    if (o.mu1) l.params.mu1 = *o.mu1;
    if (o.sigma1) l.params.sigma1 = *o.sigma1;
    if (o.lambda) l.params.lambda = *o.lambda;
    if (o.alpha) l.params.alpha = *o.alpha;
    if (o.strike_K) l.params.strike_K = *o.strike_K;
    if (o.s0) l.params.s0 = *o.s0;
    if (o.s) l.s_now = *o.s;
    l.params.validate();
    return l;
}

OutputFormat format_of(const CommonOpts& o) {
    return o.format == "jsonl" ? OutputFormat::JsonLines : OutputFormat::Csv;
}

std::ofstream open_out(const CommonOpts& o, const std::string& stem) {
    std::filesystem::create_directories(o.out_dir);
    const std::string ext = o.format == "jsonl" ? ".jsonl" : ".csv";
    const std::string path = o.out_dir + "/" + stem + ext;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write output file: " + path);
    std::cout << "wrote " << path << "\n";
    return os;
}

double require_s(const Loaded& l) {
    if (!l.s_now)
        throw std::runtime_error("present price required: set --s or config key 's'");
    return *l.s_now;
}

int run_classify(const CommonOpts& o) {
    const Loaded l = load(o);
    const StrategyReport rep = make_strategy_report(l.params, require_s(l));
    std::cout << "case: " << to_string(rep.case_tag) << "\n"
              << "b0 = " << rep.b0 << ", b1 = " << rep.b1
              << ", V(s0,1,1) = " << rep.v_s0 << "\n";
    if (rep.b_star) std::cout << "b_star = " << *rep.b_star << "\n";
    if (rep.s0_max_level) std::cout << "s0_max = " << *rep.s0_max_level << "\n";
    std::cout << "action: " << to_string(rep.action) << "\n";
    if (!o.out_dir.empty()) {
        auto os = open_out(o, "classify");
        write_strategy_report(os, rep, format_of(o));
    }
    return 0;
}

int run_curves(const CommonOpts& o, double mu0_min, double mu0_max, double mu0_step,
               double s0_min, double s0_max_grid, double s0_step,
               std::optional<double> mu0_fix) {
    const Loaded l = load(o);
    if (o.out_dir.empty()) throw std::runtime_error("curves requires --out DIR");
    const ExcitedSolution excited = solve_excited(l.params);
    {
        auto rows = boundary_curves(l.params, excited, mu0_min, mu0_max, mu0_step);
        auto os = open_out(o, "curves_mu0");
        write_curves(os, rows, format_of(o));
    }
    {
        const double mu0 = mu0_fix ? *mu0_fix : l.params.mu0;
        std::vector<BStarRow> rows;
        try {
            rows = b_star_curve(l.params, excited, mu0, s0_min, s0_max_grid, s0_step);
        } catch (const SolverError&) {
            // b0(mu0) <= b1: no case-IV band anywhere, emit the header only
        }
        auto os = open_out(o, "bstar_curve");
        write_b_star_curve(os, rows, format_of(o));
    }
    return 0;
}

int run_value_profile(const CommonOpts& o, std::optional<double> s_min,
                      std::optional<double> s_max, int n_points) {
    const Loaded l = load(o);
    if (o.out_dir.empty()) throw std::runtime_error("value-profile requires --out DIR");
    const ExcitedSolution excited = solve_excited(l.params);
    const PreRegimeSolution pre = solve_pre_regime(l.params, excited);
    const double lo = s_min ? *s_min : 0.8 * excited.b1;
    const double hi = s_max ? *s_max : 1.2 * l.params.strike_K;
    auto rows = value_profile(l.params, excited, pre, lo, hi, n_points);
    auto os = open_out(o, "value_profile");
    write_value_profile(os, rows, format_of(o));
    return 0;
}

int run_select_strike(const CommonOpts& o, const std::vector<double>& strikes,
                      double rho0) {
    const Loaded l = load(o);
    auto reports = select_strikes(l.params, require_s(l), strikes, rho0);
    std::cout << "rho0 = " << rho0 << "\n";
    for (const auto& r : reports) {
        std::cout << "K = " << r.strike_K << ": b1 = " << r.b1
                  << ", mu~0 = " << r.mu_tilde;
        if (r.s0_max_level) std::cout << ", s0max = " << *r.s0_max_level;
        std::cout << ", b0 = " << r.b0_stressed;
        if (r.b_star) std::cout << ", b* = " << *r.b_star;
        if (r.feasible) {
            std::cout << " -> feasible";
            if (r.scale_advisory) std::cout << " (b*-s0 well below s-s0)";
        } else {
            std::cout << " -> infeasible: " << r.reason;
        }
        std::cout << "\n";
    }
    if (!o.out_dir.empty()) {
        auto os = open_out(o, "strikes");
        write_strike_reports(os, reports, format_of(o));
    }
    return 0;
}

int run_verify(const CommonOpts& o, double corrupt_b1_scale) {
    const Loaded l = load(o);
    const VerifyReport rep = verify_case(l.params, o.mc, corrupt_b1_scale);
    write_verify_report(std::cout, rep);
    return rep.pass ? 0 : 3;
}

StoppingRule parse_rule(const std::string& text, const ModelParams& p) {
    if (text == "immediate") return StoppingRule::immediate_exercise();
    if (text == "excited-optimal" || text == "pre-optimal") {
        const ExcitedSolution excited = solve_excited(p);
        if (text == "excited-optimal")
            return StoppingRule::excited_optimal(excited.b1);
        return StoppingRule::pre_regime_optimal(solve_pre_regime(p, excited));
    }
    if (text.rfind("hit-level:", 0) == 0)
        return StoppingRule::hit_level_pre(std::stod(text.substr(10)));
    if (text.rfind("band:", 0) == 0) {
        const auto rest = text.substr(5);
        const auto colon = rest.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("band rule needs band:LO:HI");
        return StoppingRule::hit_band_pre(std::stod(rest.substr(0, colon)),
                                          std::stod(rest.substr(colon + 1)));
    }
    throw std::runtime_error(
        "unknown rule '" + text +
        "' (expected immediate, excited-optimal, pre-optimal, hit-level:L, band:LO:HI)");
}

int run_simulate(const CommonOpts& o, const std::string& rule_text, int y, int i) {
    const Loaded l = load(o);
    const StoppingRule rule = parse_rule(rule_text, l.params);
    const StartState start{require_s(l), y, i};
    const MCEstimate est = estimate(l.params, start, o.mc, rule);
    std::cout << "mean = " << est.mean << "\nstd_error = " << est.std_error
              << "\nn_paths = " << est.n_paths
              << "\nn_truncated = " << est.n_truncated << "\nseed = " << est.seed
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"perpetual American put under hitting-triggered volatility"};
    app.require_subcommand(1);

    CommonOpts classify_o, curves_o, profile_o, strike_o, verify_o, simulate_o;

    auto* classify_cmd =
        app.add_subcommand("classify", "classify the case and recommend an action");
    add_common(classify_cmd, classify_o, false);

    auto* curves_cmd =
        app.add_subcommand("curves", "emit b0(mu0), s0max(mu0) and b*(s0) curves");
    add_common(curves_cmd, curves_o, false);
    double mu0_min = -1.0, mu0_max = 1.0, mu0_step = 0.005;
    double s0_min = 14000.0, s0_max_grid = 16500.0, s0_step = 10.0;
    std::optional<double> mu0_fix;
    curves_cmd->add_option("--mu0-min", mu0_min, "curve grid lower end");
    curves_cmd->add_option("--mu0-max", mu0_max, "curve grid upper end");
    curves_cmd->add_option("--mu0-step", mu0_step, "curve grid step");
    curves_cmd->add_option("--s0-min", s0_min, "b* grid lower end");
    curves_cmd->add_option("--s0-max", s0_max_grid, "b* grid upper end");
    curves_cmd->add_option("--s0-step", s0_step, "b* grid step");
    curves_cmd->add_option("--mu0-fix", mu0_fix, "drift for the b*(s0) curve");

    auto* profile_cmd =
        app.add_subcommand("value-profile", "emit gain / V(.,1,1) / V(.,0,1) rows");
    add_common(profile_cmd, profile_o, false);
    std::optional<double> s_min_opt, s_max_opt;
    int n_points = 601;
    profile_cmd->add_option("--s-min", s_min_opt, "profile lower end");
    profile_cmd->add_option("--s-max", s_max_opt, "profile upper end");
    profile_cmd->add_option("--s-points", n_points, "number of grid points");

    auto* strike_cmd =
        app.add_subcommand("select-strike", "strike feasibility per the 3-step rule");
    add_common(strike_cmd, strike_o, false);
    std::vector<double> strikes;
    double rho0 = 0.163;
    strike_cmd->add_option("--strikes", strikes, "candidate strike levels")
        ->required()
        ->delimiter(',');
    strike_cmd->add_option("--rho0", rho0, "drift stress added to mu~0");

    auto* verify_cmd =
        app.add_subcommand("verify", "Monte Carlo attainment and dominance checks");
    add_common(verify_cmd, verify_o, true);
    double corrupt_b1_scale = 1.0;
    verify_cmd->add_option("--corrupt-b1-scale", corrupt_b1_scale,
                           "negative control: scale injected into the rules' b1");

    auto* simulate_cmd =
        app.add_subcommand("simulate", "raw Monte Carlo estimate of one rule");
    add_common(simulate_cmd, simulate_o, true);
    std::string rule_text = "pre-optimal";
    int start_y = 0, start_i = 1;
    simulate_cmd->add_option("--rule", rule_text,
                             "immediate | excited-optimal | pre-optimal | "
                             "hit-level:L | band:LO:HI");
    simulate_cmd->add_option("--y", start_y, "start regime flag (0 pre, 1 excited)");
    simulate_cmd->add_option("--i", start_i, "start eta (1 running, 0 absorbed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (classify_cmd->parsed()) return run_classify(classify_o);
        if (curves_cmd->parsed())
            return run_curves(curves_o, mu0_min, mu0_max, mu0_step, s0_min,
                              s0_max_grid, s0_step, mu0_fix);
        if (profile_cmd->parsed())
            return run_value_profile(profile_o, s_min_opt, s_max_opt, n_points);
        if (strike_cmd->parsed()) return run_select_strike(strike_o, strikes, rho0);
        if (verify_cmd->parsed()) return run_verify(verify_o, corrupt_b1_scale);
        if (simulate_cmd->parsed())
            return run_simulate(simulate_o, rule_text, start_y, start_i);
    } catch (const ivol::SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
