#include "ivol/report.hpp"

#include "ivol/root_find.hpp"

#include <json.hpp>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ivol {

namespace {

std::string fmt_sig(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? fmt_sig(*v) : std::string();
}

nlohmann::json json_opt(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

int grid_count(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo))
        throw std::invalid_argument("grid: need lo <= hi and step > 0");
    return static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
}

} // namespace

const char* to_string(Action a) {
    switch (a) {
        case Action::WaitForS0ThenExcited: return "WaitForS0ThenExcited";
        case Action::WaitForS0ThenExerciseAtS0: return "WaitForS0ThenExerciseAtS0";
        case Action::ExerciseNow: return "ExerciseNow";
        case Action::WaitForB0: return "WaitForB0";
    }
    return "?";
}

StrategyReport make_strategy_report(const ModelParams& p, double s_now) {
    if (!(s_now > p.s0))
        throw std::invalid_argument(
            "make_strategy_report: present price must exceed s0");
    const ExcitedSolution excited = solve_excited(p);
    const PreRegimeSolution pre = solve_pre_regime(p, excited);

    StrategyReport rep;
    rep.case_tag = pre.case_tag;
    rep.s_now = s_now;
    rep.b0 = pre.b0;
    rep.b1 = pre.b1;
    rep.v_s0 = pre.v_s0;
    rep.b_star = pre.b_star;
    try {
        rep.s0_max_level = s0_max(p.mu0, p, excited);
    } catch (const SolverError&) {
        rep.s0_max_level = std::nullopt; // b0(mu0) <= b1: no IIIa/IV switch level
    }
    switch (pre.case_tag) {
        case CaseTag::IIIa:
        case CaseTag::IIIb:
            rep.action = Action::WaitForS0ThenExcited;
            break;
        case CaseTag::IIIc:
            rep.action = Action::WaitForS0ThenExerciseAtS0;
            break;
        case CaseTag::IV:
            if (s_now > pre.b0)
                rep.action = Action::WaitForB0;
            else if (s_now >= *pre.b_star)
                rep.action = Action::ExerciseNow;
            else
                rep.action = Action::WaitForS0ThenExcited;
            break;
    }
    return rep;
}

double mu_tilde_root(const ModelParams& p, double level) {
    if (!(level > 0.0) || !(level < p.strike_K))
        throw std::invalid_argument("mu_tilde_root: level must lie in (0, K)");
    auto f = [&](double mu0) {
        return mckean_boundary(gamma_roots(mu0, p.sigma0, p.alpha), p.strike_K)
             - level;
    };
    double lo = -1.0, hi = 1.0;
    while (f(lo) > 0.0 && lo > -1024.0) lo *= 2.0;
    while (f(hi) < 0.0 && hi < 1024.0) hi *= 2.0;
    return brent_root(f, lo, hi, 1e-10, "mu_tilde_root");
}

std::vector<CurveRow> boundary_curves(const ModelParams& p,
                                      const ExcitedSolution& excited,
                                      double mu0_min, double mu0_max,
                                      double mu0_step) {
    const int n = grid_count(mu0_min, mu0_max, mu0_step);
    std::vector<CurveRow> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        CurveRow row;
        row.mu0 = mu0_min + i * mu0_step;
        row.b0 = mckean_boundary(gamma_roots(row.mu0, p.sigma0, p.alpha), p.strike_K);
        row.b1 = excited.b1;
        if (row.b0 > excited.b1)
            row.s0_max_level = s0_max(row.mu0, p, excited);
        rows.push_back(row);
    }
    return rows;
}

std::vector<BStarRow> b_star_curve(const ModelParams& p,
                                   const ExcitedSolution& excited, double mu0,
                                   double s0_min, double s0_max_grid,
                                   double s0_step) {
    const double switch_level = s0_max(mu0, p, excited);
    const CharRoots gamma = gamma_roots(mu0, p.sigma0, p.alpha);
    const int n = grid_count(s0_min, s0_max_grid, s0_step);
    std::vector<BStarRow> rows;
    for (int i = 0; i < n; ++i) {
        const double s0 = s0_min + i * s0_step;
        if (!(s0 > excited.b1) || !(s0 < switch_level)) continue;
        ModelParams q = p;
        q.mu0 = mu0;
        q.s0 = s0;
        rows.push_back({s0, solve_b_star(q, excited, gamma).b_star});
    }
    return rows;
}

std::vector<ValueProfileRow> value_profile(const ModelParams& p,
                                           const ExcitedSolution& excited,
                                           const PreRegimeSolution& pre,
                                           double s_min, double s_max, int n_points) {
    if (n_points < 2 || !(s_min > 0.0) || !(s_max > s_min))
        throw std::invalid_argument("value_profile: bad s grid");
    std::vector<ValueProfileRow> rows;
    rows.reserve(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        ValueProfileRow row;
        row.s = s_min + (s_max - s_min) * i / (n_points - 1);
        row.gain = gain(row.s, p.strike_K);
        row.v_excited = value_excited(row.s, excited);
        if (row.s > p.s0) row.v_pre_regime = value_pre_regime(row.s, pre);
        rows.push_back(row);
    }
    return rows;
}

std::vector<StrikeReport> select_strikes(const ModelParams& base, double s_now,
                                         const std::vector<double>& strikes,
                                         double rho0) {
    if (strikes.empty())
        throw std::invalid_argument("select_strikes: empty strike list");
    if (!(rho0 > 0.0))
        throw std::invalid_argument("select_strikes: rho0 must be positive");
    if (!(s_now > base.s0))
        throw std::invalid_argument("select_strikes: present price must exceed s0");

    std::vector<StrikeReport> reports;
    for (double K : strikes) {
        ModelParams p = base;
        p.strike_K = K;
        const ExcitedSolution excited = solve_excited(p);

        StrikeReport rep;
        rep.strike_K = K;
        rep.b1 = excited.b1;
        rep.mu_tilde = mu_tilde_root(p, excited.b1);
        const double mu_stressed = rep.mu_tilde + rho0;
        const CharRoots gamma = gamma_roots(mu_stressed, p.sigma0, p.alpha);
        rep.b0_stressed = mckean_boundary(gamma, K);
        rep.s0_max_level = s0_max(mu_stressed, p, excited);

        if (!(p.s0 > excited.b1)) {
            rep.reason = "s0 <= b1";
        } else if (!(p.s0 < *rep.s0_max_level)) {
            rep.reason = "s0 >= s0max(mu~0 + rho0)";
        } else {
            ModelParams q = p;
            q.mu0 = mu_stressed;
            rep.b_star = solve_b_star(q, excited, gamma).b_star;
            rep.scale_ratio = (*rep.b_star - p.s0) / (s_now - p.s0);
            rep.scale_advisory = *rep.scale_ratio < 0.2;
            if (!(*rep.b_star < s_now))
                rep.reason = "s <= b_star(mu~0 + rho0, s0)";
            else if (!(s_now < rep.b0_stressed))
                rep.reason = "s >= b0(mu~0 + rho0)";
            else
                rep.feasible = true;
        }
        reports.push_back(rep);
    }
    return reports;
}

VerifyReport verify_case(const ModelParams& p, const SimConfig& cfg,
                         double corrupt_b1_scale) {
    const ExcitedSolution excited = solve_excited(p);
    const PreRegimeSolution pre = solve_pre_regime(p, excited);
    const double K = p.strike_K;
    const double b1_rule = excited.b1 * corrupt_b1_scale;

    VerifyReport rep;
    rep.case_tag = pre.case_tag;
    rep.seed = cfg.seed;

    auto run = [&](const std::string& name, double analytic, const StartState& start,
                   const StoppingRule& rule, bool dominance) {
        VerifyLine line;
        line.name = name;
        line.analytic = analytic;
        line.mc = estimate(p, start, cfg, rule);
        line.is_dominance = dominance;
        const double slack = 3.0 * line.mc.std_error + 1e-9 * K;
        line.pass = dominance ? line.mc.mean <= analytic + slack
                              : std::abs(line.mc.mean - analytic) <= slack;
        rep.lines.push_back(line);
    };

    // Excited-state attainment of the rule tau_b1 ^ tau_eta0.
    const StoppingRule excited_rule = StoppingRule::excited_optimal(b1_rule);
    for (double s : {excited.b1 * 1.02, 0.5 * (excited.b1 + K), K * 1.05}) {
        std::ostringstream name;
        name << "attain excited s=" << fmt_sig(s);
        run(name.str(), value_excited(s, excited), {s, 1, 1}, excited_rule, false);
    }

    // Pre-switch attainment of the classified case's optimal rule.
    StoppingRule pre_rule;
    switch (pre.case_tag) {
        case CaseTag::IIIa:
        case CaseTag::IIIb:
            pre_rule = StoppingRule::excited_optimal(b1_rule);
            break;
        case CaseTag::IIIc:
            pre_rule = StoppingRule::hit_level_pre(p.s0);
            break;
        case CaseTag::IV:
            pre_rule = StoppingRule::composite(
                StoppingRule::hit_band_pre(*pre.b_star, pre.b0),
                StoppingRule::excited_optimal(b1_rule));
            break;
    }
    std::vector<double> pre_points;
    if (pre.case_tag == CaseTag::IV)
        pre_points = {0.5 * (p.s0 + *pre.b_star), 0.5 * (*pre.b_star + pre.b0),
                      pre.b0 * 1.02};
    else
        pre_points = {p.s0 * 1.01, p.s0 * 1.05, p.s0 * 1.12};
    for (double s : pre_points) {
        std::ostringstream name;
        name << "attain pre-regime s=" << fmt_sig(s);
        run(name.str(), value_pre_regime(s, pre), {s, 0, 1}, pre_rule, false);
    }

    // Case-specific dominance: no rule may beat the analytic value.
    const double s_mid_excited = 0.5 * (excited.b1 + K);
    run("dominate immediate (excited)", value_excited(s_mid_excited, excited),
        {s_mid_excited, 1, 1}, StoppingRule::immediate_exercise(), true);
    run("dominate shifted barrier 0.9 b1", value_excited(s_mid_excited, excited),
        {s_mid_excited, 1, 1}, StoppingRule::excited_optimal(0.9 * excited.b1), true);
    // start above the shifted barrier so the rule actually waits for it
    const double s_above = 0.5 * (1.1 * excited.b1 + std::max(K, 1.1 * excited.b1));
    run("dominate shifted barrier 1.1 b1", value_excited(s_above, excited),
        {s_above, 1, 1}, StoppingRule::excited_optimal(1.1 * excited.b1), true);
    if (pre.case_tag == CaseTag::IIIb) {
        const double s = p.s0 * 1.05;
        run("dominate stop-at-s0", value_pre_regime(s, pre), {s, 0, 1},
            StoppingRule::hit_level_pre(p.s0), true);
    }
    if (pre.case_tag == CaseTag::IV) {
        const double s_band = 0.5 * (*pre.b_star + pre.b0);
        run("dominate ignore-band", value_pre_regime(s_band, pre), {s_band, 0, 1},
            StoppingRule::excited_optimal(excited.b1), true);
        const double s_hi = pre.b0 * 1.08;
        run("dominate stop-at-1.05 b0", value_pre_regime(s_hi, pre), {s_hi, 0, 1},
            StoppingRule::hit_level_pre(pre.b0 * 1.05), true);
    }

    rep.pass = true;
    for (const auto& line : rep.lines) rep.pass = rep.pass && line.pass;
    return rep;
}

// --- emission ---------------------------------------------------------------

void write_curves(std::ostream& os, const std::vector<CurveRow>& rows,
                  OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        os << "mu0,b0,b1,s0_max\n";
        for (const auto& r : rows)
            os << fmt_sig(r.mu0) << ',' << fmt_sig(r.b0) << ',' << fmt_sig(r.b1)
               << ',' << fmt_opt(r.s0_max_level) << '\n';
        return;
    }
    for (const auto& r : rows) {
        nlohmann::json j{{"mu0", r.mu0},
                         {"b0", r.b0},
                         {"b1", r.b1},
                         {"s0_max", json_opt(r.s0_max_level)}};
        os << j.dump() << '\n';
    }
}

void write_b_star_curve(std::ostream& os, const std::vector<BStarRow>& rows,
                        OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        os << "s0,b_star_minus_s0\n";
        for (const auto& r : rows)
            os << fmt_sig(r.s0) << ',' << fmt_sig(r.b_star - r.s0) << '\n';
        return;
    }
    for (const auto& r : rows) {
        nlohmann::json j{{"s0", r.s0}, {"b_star_minus_s0", r.b_star - r.s0}};
        os << j.dump() << '\n';
    }
}

void write_value_profile(std::ostream& os, const std::vector<ValueProfileRow>& rows,
                         OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        os << "s,gain,v_excited,v_pre_regime\n";
        for (const auto& r : rows)
            os << fmt_sig(r.s) << ',' << fmt_sig(r.gain) << ',' << fmt_sig(r.v_excited)
               << ',' << fmt_opt(r.v_pre_regime) << '\n';
        return;
    }
    for (const auto& r : rows) {
        nlohmann::json j{{"s", r.s},
                         {"gain", r.gain},
                         {"v_excited", r.v_excited},
                         {"v_pre_regime", json_opt(r.v_pre_regime)}};
        os << j.dump() << '\n';
    }
}

void write_strike_reports(std::ostream& os, const std::vector<StrikeReport>& rows,
                          OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        os << "strike_K,b1,mu_tilde,s0_max,b0_stressed,b_star,feasible,reason,"
              "scale_ratio,scale_advisory\n";
        for (const auto& r : rows)
            os << fmt_sig(r.strike_K) << ',' << fmt_sig(r.b1) << ','
               << fmt_sig(r.mu_tilde) << ',' << fmt_opt(r.s0_max_level) << ','
               << fmt_sig(r.b0_stressed) << ',' << fmt_opt(r.b_star) << ','
               << (r.feasible ? "true" : "false") << ',' << r.reason << ','
               << fmt_opt(r.scale_ratio) << ','
               << (r.scale_advisory ? "true" : "false") << '\n';
        return;
    }
    for (const auto& r : rows) {
        nlohmann::json j{{"strike_K", r.strike_K},
                         {"b1", r.b1},
                         {"mu_tilde", r.mu_tilde},
                         {"s0_max", json_opt(r.s0_max_level)},
                         {"b0_stressed", r.b0_stressed},
                         {"b_star", json_opt(r.b_star)},
                         {"feasible", r.feasible},
                         {"reason", r.reason},
                         {"scale_ratio", json_opt(r.scale_ratio)},
                         {"scale_advisory", r.scale_advisory}};
        os << j.dump() << '\n';
    }
}

void write_strategy_report(std::ostream& os, const StrategyReport& r,
                           OutputFormat fmt) {
    if (fmt == OutputFormat::Csv) {
        os << "case,s,b0,b1,v_s0,b_star,s0_max,action\n";
        os << to_string(r.case_tag) << ',' << fmt_sig(r.s_now) << ','
           << fmt_sig(r.b0) << ',' << fmt_sig(r.b1) << ',' << fmt_sig(r.v_s0) << ','
           << fmt_opt(r.b_star) << ',' << fmt_opt(r.s0_max_level) << ','
           << to_string(r.action) << '\n';
        return;
    }
    nlohmann::json j{{"case", to_string(r.case_tag)},
                     {"s", r.s_now},
                     {"b0", r.b0},
                     {"b1", r.b1},
                     {"v_s0", r.v_s0},
                     {"b_star", json_opt(r.b_star)},
                     {"s0_max", json_opt(r.s0_max_level)},
                     {"action", to_string(r.action)}};
    os << j.dump() << '\n';
}

void write_verify_report(std::ostream& os, const VerifyReport& rep) {
    os << "case " << to_string(rep.case_tag) << ", seed " << rep.seed << "\n";
    for (const auto& line : rep.lines) {
        os << (line.pass ? "[PASS] " : "[FAIL] ") << line.name
           << ": analytic = " << fmt_sig(line.analytic)
           << ", mc = " << fmt_sig(line.mc.mean) << " +/- "
           << fmt_sig(line.mc.std_error) << " (" << line.mc.n_paths << " paths, "
           << line.mc.n_truncated << " truncated)";
        if (line.is_dominance) os << " [dominance]";
        os << "\n";
    }
    os << (rep.pass ? "VERIFY PASS" : "VERIFY FAIL") << "\n";
}

FileConfig parse_config(std::istream& is, const std::string& source_name) {
    FileConfig cfg;
    bool seen[8] = {};
    static constexpr const char* kNames[8] = {"mu0", "sigma0", "mu1", "sigma1",
                                              "lambda", "alpha", "strike_K", "s0"};
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        std::ostringstream msg;
        msg << source_name << ":" << line_no << ": " << what;
        throw std::runtime_error(msg.str());
    };
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        double num = 0.0;
        try {
            std::size_t used = 0;
            num = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            fail("field '" + key + "': cannot parse number from '" + value + "'");
        }
        double* slot = nullptr;
        if (key == "mu0") slot = &cfg.params.mu0;
        else if (key == "sigma0") slot = &cfg.params.sigma0;
        else if (key == "mu1") slot = &cfg.params.mu1;
        else if (key == "sigma1") slot = &cfg.params.sigma1;
        else if (key == "lambda") slot = &cfg.params.lambda;
        else if (key == "alpha") slot = &cfg.params.alpha;
        else if (key == "strike_K") slot = &cfg.params.strike_K;
        else if (key == "s0") slot = &cfg.params.s0;
        else if (key == "s") {
            cfg.s_now = num;
            continue;
        } else {
            fail("unknown key '" + key + "'");
        }
        *slot = num;
        for (int k = 0; k < 8; ++k)
            if (key == kNames[k]) seen[k] = true;
    }
    for (int k = 0; k < 8; ++k)
        if (!seen[k]) {
            line_no = 0;
            fail(std::string("missing required key '") + kNames[k] + "'");
        }
    return cfg;
}

FileConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in, path);
}

} // namespace ivol
