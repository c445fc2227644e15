// mc.hpp - Brute-force verification oracle: simulates the regime-switching
// price process (GBM with a volatility jump at the first hit of s0, then
// absorption after an exponential clock) and estimates the expected
// discounted put payoff of a given stopping rule.
#pragma once

#include "ivol/pre_regime.hpp"
#include "ivol/types.hpp"

#include <cstdint>
#include <optional>
#include <utility>

namespace ivol {

struct SimConfig {
    long n_paths = 200000;
    double dt = 1.0 / 5000.0; // years; resolution near barriers
    double t_max = 0.0;       // years; 0 selects the default 40 / alpha
    std::uint64_t seed = 20240901ULL;
    bool bridge_correction = true;

    /// Effective truncation horizon. The default 40/alpha keeps the
    /// discarded tail below exp(-40) K, far under the 1e-4 K truncation
    /// tolerance; shorter explicit horizons are allowed (n_truncated lets
    /// callers bound the error).
    double horizon(const ModelParams& p) const {
        return t_max > 0.0 ? t_max : 40.0 / p.alpha;
    }
};

/// Stopping rule as a product of optional components, each a function of the
/// running state (s, y, i, t):
///   immediate          - stop at t = 0;
///   pre_hit_level L    - while y = 0: stop at the first time S <= L
///                        (L below s0 never triggers; the regime switches first);
///   pre_band [lo, hi]  - while y = 0: stop at the first time S is in [lo, hi];
///   excited_hit_level  - while y = 1, eta = 1: stop at the first time S <= L.
/// Every rule stops at the absorption time at the latest (waiting longer only
/// loses discount on a frozen price).
struct StoppingRule {
    bool immediate = false;
    std::optional<double> pre_hit_level;
    std::optional<std::pair<double, double>> pre_band;
    std::optional<double> excited_hit_level;

    static StoppingRule immediate_exercise();
    static StoppingRule hit_level_pre(double level);
    static StoppingRule hit_band_pre(double lo, double hi);
    static StoppingRule excited_optimal(double b1);
    /// The optimal rule of the classified case: IIIa/IIIb wait for the switch
    /// and then use the excited boundary; IIIc stops at the switch itself;
    /// IV adds the exercise band [b*, b0] before the switch.
    static StoppingRule pre_regime_optimal(const PreRegimeSolution& sol);
    /// Field-wise union; conflicting components throw std::invalid_argument.
    static StoppingRule composite(const StoppingRule& a, const StoppingRule& b);
};

struct StartState {
    double s = 0.0;
    int y = 0; // 0 before the volatility switch, 1 after
    int i = 1; // eta: 1 running, 0 absorbed
};

struct PathResult {
    double payoff = 0.0;    // e^{-alpha tau} (K - S_tau)^+
    double stop_time = 0.0; // tau in years (t_max if truncated)
    bool truncated = false;
};

struct MCEstimate {
    double mean = 0.0;
    double std_error = 0.0; // 0 by convention when n_paths == 1
    long n_paths = 0;
    long n_truncated = 0;
    std::uint64_t seed = 0;
};

/// One path under per-path seed path_seed(config.seed, path_index). Evolves
/// log S by exact Gaussian increments per regime; the switch at s0 applies a
/// Brownian-bridge crossing check per step (exact given the endpoints) when
/// config.bridge_correction is on, as do all barrier components of the rule.
/// The exponential clock is drawn once at the switch. Throws
/// std::domain_error for start states outside the state space.
PathResult simulate_path(const ModelParams& p, const StartState& start,
                         const SimConfig& config, const StoppingRule& rule,
                         std::uint64_t path_index = 0);

/// Mean and standard error of the discounted payoff over config.n_paths
/// independent paths; deterministic given config.seed (pairwise summation,
/// order-independent).
MCEstimate estimate(const ModelParams& p, const StartState& start,
                    const SimConfig& config, const StoppingRule& rule);

/// E[e^{-alpha tau_s0}; tau_s0 < inf] started from s > s0 in the pre-switch
/// regime; closed form is (s/s0)^{gamma-}.
MCEstimate estimate_hit_discount(const ModelParams& p, double s,
                                 const SimConfig& config);

/// Two-sided discounted exit estimates (phi1: s0 first, phi2: s_upper first)
/// from the corridor [s0, s_upper]; closed forms in exit_transforms().
std::pair<MCEstimate, MCEstimate> estimate_exit_transforms(const ModelParams& p,
                                                           double s, double s_upper,
                                                           const SimConfig& config);

} // namespace ivol
