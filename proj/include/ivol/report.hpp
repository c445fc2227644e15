// report.hpp - Strategy reports, boundary-curve generation, strike selection
// and MC verification drivers behind the command-line tool. Everything here
// is deterministic given its inputs so emitted files are byte-stable.
#pragma once

#include "ivol/mc.hpp"
#include "ivol/pre_regime.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ivol {

enum class Action {
    WaitForS0ThenExcited,
    WaitForS0ThenExerciseAtS0,
    ExerciseNow,
    WaitForB0,
};

const char* to_string(Action a);

enum class OutputFormat { Csv, JsonLines };

/// Case classification plus the boundary levels and the recommended action
/// for a present price s. Action mapping: IIIc waits for s0 and exercises
/// there; IIIa/IIIb wait for s0 and then play the excited boundary; IV
/// exercises now inside [b*, b0], waits for b0 above it, and below b* falls
/// back to waiting for s0 (exercising early if b* is reached first).
struct StrategyReport {
    CaseTag case_tag = CaseTag::IIIb;
    double s_now = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
    double v_s0 = 0.0;
    std::optional<double> b_star;
    std::optional<double> s0_max_level; // present when b0(mu0) > b1
    Action action = Action::WaitForS0ThenExcited;
};

StrategyReport make_strategy_report(const ModelParams& p, double s_now);

/// Root mu~0 of b0(mu0) = level; b0 is strictly increasing in mu0 with range
/// (0, K), so the root exists and is unique for level in (0, K).
double mu_tilde_root(const ModelParams& p, double level);

struct CurveRow {
    double mu0 = 0.0;
    double b0 = 0.0;
    double b1 = 0.0;
    std::optional<double> s0_max_level; // only where b0(mu0) > b1
};

/// b0(mu0), the constant b1, and s0max(mu0) over an inclusive mu0 grid.
std::vector<CurveRow> boundary_curves(const ModelParams& p,
                                      const ExcitedSolution& excited,
                                      double mu0_min, double mu0_max,
                                      double mu0_step);

struct BStarRow {
    double s0 = 0.0;
    double b_star = 0.0;
};

/// b*(s0) at fixed mu0 over the s0 grid, restricted to the genuinely banded
/// case-IV range b1 < s0 < s0max(mu0).
std::vector<BStarRow> b_star_curve(const ModelParams& p,
                                   const ExcitedSolution& excited, double mu0,
                                   double s0_min, double s0_max_grid,
                                   double s0_step);

struct ValueProfileRow {
    double s = 0.0;
    double gain = 0.0;
    double v_excited = 0.0;
    std::optional<double> v_pre_regime; // only for s > s0
};

std::vector<ValueProfileRow> value_profile(const ModelParams& p,
                                           const ExcitedSolution& excited,
                                           const PreRegimeSolution& pre,
                                           double s_min, double s_max, int n_points);

/// One candidate strike of the selection procedure: compute b1, the drift
/// mu~0 at which b0 crosses b1, then the boundaries at the stressed drift
/// mu~0 + rho0, and test the chained feasibility inequalities
///   b1 < s0 < s0max(mu~0 + rho0)  and  b*(mu~0 + rho0, s0) < s < b0(mu~0 + rho0).
struct StrikeReport {
    double strike_K = 0.0;
    double b1 = 0.0;
    double mu_tilde = 0.0;
    std::optional<double> s0_max_level;
    double b0_stressed = 0.0;
    std::optional<double> b_star;
    bool feasible = false;
    std::string reason;      // empty when feasible
    std::optional<double> scale_ratio; // (b* - s0) / (s - s0)
    bool scale_advisory = false;       // heuristic: ratio < 0.2
};

std::vector<StrikeReport> select_strikes(const ModelParams& base, double s_now,
                                         const std::vector<double>& strikes,
                                         double rho0);

/// MC attainment/dominance verification of the classified case.
struct VerifyLine {
    std::string name;
    double analytic = 0.0;
    MCEstimate mc;
    bool is_dominance = false; // pass when mc <= analytic + 3 SE
    bool pass = false;
};

struct VerifyReport {
    CaseTag case_tag = CaseTag::IIIb;
    std::vector<VerifyLine> lines;
    bool pass = false;
    std::uint64_t seed = 0;
};

/// Attainment of the optimal rule at three start points per regime plus the
/// case-specific suboptimal rules. corrupt_b1_scale != 1 injects a corrupted
/// excited boundary into the *rules* (not the analytic values) as a negative
/// control; verification is then expected to fail.
VerifyReport verify_case(const ModelParams& p, const SimConfig& cfg,
                         double corrupt_b1_scale = 1.0);

// --- emission -------------------------------------------------------------

void write_curves(std::ostream& os, const std::vector<CurveRow>& rows,
                  OutputFormat fmt);
void write_b_star_curve(std::ostream& os, const std::vector<BStarRow>& rows,
                        OutputFormat fmt);
void write_value_profile(std::ostream& os, const std::vector<ValueProfileRow>& rows,
                         OutputFormat fmt);
void write_strike_reports(std::ostream& os, const std::vector<StrikeReport>& rows,
                          OutputFormat fmt);
void write_strategy_report(std::ostream& os, const StrategyReport& report,
                           OutputFormat fmt);
void write_verify_report(std::ostream& os, const VerifyReport& report);

/// Flat key = value configuration (keys mirror the ModelParams field names,
/// plus optional "s" for the present price). '#' starts a comment. Errors
/// carry file:line diagnostics.
struct FileConfig {
    ModelParams params;
    std::optional<double> s_now;
};

FileConfig parse_config(std::istream& is, const std::string& source_name);
FileConfig parse_config_file(const std::string& path);

} // namespace ivol
