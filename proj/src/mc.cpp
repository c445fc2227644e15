#include "ivol/mc.hpp"

#include "ivol/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace ivol {

namespace {

// Step-size policy. Near a barrier the user dt rules; far from every barrier
// the step grows with the squared log-distance (the bridge correction is
// exact per step for a single barrier, so only the crossing-time resolution
// is at stake, and that enters payoffs through alpha * dt only), capped so a
// late-detected crossing costs at most alpha * kFarStepCap in log-discount.
// Inside a two-sided corridor the step resolves the corridor width instead so
// that simultaneous two-wall crossings stay negligible.
constexpr double kFarStepCap = 0.05;    // years
constexpr double kBarrierSigmas = 4.0;  // single-barrier distance resolution
constexpr double kCorridorSigmas = 8.0; // two-sided width resolution

struct LegExit {
    enum Kind { Down, Up, TimeOut } kind = TimeOut;
    double t = 0.0;
    double log_s = 0.0;
};

// GBM leg in log space started at (t, x): exact Gaussian increments until the
// first passage below down_log, above up_log (when supplied), or t_end.
LegExit run_gbm_leg(double mu, double sigma, double t, double x, double down_log,
                    const std::optional<double>& up_log, double t_end,
                    double dt_user, bool bridge, Rng& rng) {
    const double nu = mu - 0.5 * sigma * sigma;
    while (t < t_end) {
        double dt;
        if (up_log) {
            const double res = (*up_log - down_log) / (kCorridorSigmas * sigma);
            dt = std::min(dt_user, res * res);
        } else {
            const double res = (x - down_log) / (kBarrierSigmas * sigma);
            dt = std::min(kFarStepCap, std::max(dt_user, res * res));
        }
        dt = std::min(dt, t_end - t);
        const double x1 = x + nu * dt + sigma * std::sqrt(dt) * rng.normal();
        const double t1 = t + dt;
        if (up_log && x1 >= *up_log) return {LegExit::Up, t1, *up_log};
        if (x1 <= down_log) return {LegExit::Down, t1, down_log};
        if (bridge) {
            const double var = sigma * sigma * dt;
            const double p_dn = std::exp(-2.0 * (x - down_log) * (x1 - down_log) / var);
            const double p_up =
                up_log ? std::exp(-2.0 * (*up_log - x) * (*up_log - x1) / var) : 0.0;
            if (p_dn + p_up > 0.0) {
                const double u = rng.uniform();
                if (u < p_dn) return {LegExit::Down, t1, down_log};
                if (up_log && u < p_dn + p_up) return {LegExit::Up, t1, *up_log};
            }
        }
        t = t1;
        x = x1;
    }
    return {LegExit::TimeOut, t_end, x};
}

void validate_start(const ModelParams& p, const StartState& start) {
    std::ostringstream msg;
    if (start.y != 0 && start.y != 1) {
        msg << "simulate_path: y must be 0 or 1, got " << start.y;
        throw std::domain_error(msg.str());
    }
    if (start.i != 0 && start.i != 1) {
        msg << "simulate_path: i must be 0 or 1, got " << start.i;
        throw std::domain_error(msg.str());
    }
    if (!(start.s > 0.0)) {
        msg << "simulate_path: s must be positive, got " << start.s;
        throw std::domain_error(msg.str());
    }
    if (start.y == 0 && (start.i != 1 || !(start.s > p.s0))) {
        msg << "simulate_path: pre-switch states require s > s0 and i = 1 "
            << "(s = " << start.s << ", s0 = " << p.s0 << ", i = " << start.i << ")";
        throw std::domain_error(msg.str());
    }
}

// Excited leg entered at (t_enter, s_enter) with the absorption clock not yet
// drawn. The rule stops at the absorption time at the latest.
PathResult excited_leg(const ModelParams& p, const SimConfig& cfg,
                       const StoppingRule& rule, double t_enter, double s_enter,
                       double t_max, Rng& rng) {
    const double K = p.strike_K;
    if (rule.excited_hit_level && s_enter <= *rule.excited_hit_level)
        return {std::exp(-p.alpha * t_enter) * gain(s_enter, K), t_enter, false};

    const double t_absorb = t_enter + rng.exponential(p.lambda);
    const double t_end = std::min(t_absorb, t_max);
    const double nu = p.mu1 - 0.5 * p.sigma1 * p.sigma1;
    double x_end;
    if (rule.excited_hit_level) {
        const LegExit e =
            run_gbm_leg(p.mu1, p.sigma1, t_enter, std::log(s_enter),
                        std::log(*rule.excited_hit_level), std::nullopt, t_end,
                        cfg.dt, cfg.bridge_correction, rng);
        if (e.kind == LegExit::Down)
            return {std::exp(-p.alpha * e.t) * gain(*rule.excited_hit_level, K),
                    e.t, false};
        x_end = e.log_s;
    } else {
        // no barrier: one exact Gaussian step to absorption (or truncation)
        const double dt = t_end - t_enter;
        x_end = std::log(s_enter) + nu * dt + p.sigma1 * std::sqrt(dt) * rng.normal();
    }
    if (t_absorb <= t_max)
        return {std::exp(-p.alpha * t_absorb) * gain(std::exp(x_end), K), t_absorb,
                false};
    return {std::exp(-p.alpha * t_max) * gain(std::exp(x_end), K), t_max, true};
}

double pairwise_sum(const double* a, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

MCEstimate summarize(const std::vector<double>& xs, long n_truncated,
                     std::uint64_t seed) {
    MCEstimate est;
    est.n_paths = static_cast<long>(xs.size());
    est.n_truncated = n_truncated;
    est.seed = seed;
    est.mean = pairwise_sum(xs.data(), xs.size()) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        std::vector<double> sq(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - est.mean;
            sq[i] = d * d;
        }
        const double var = pairwise_sum(sq.data(), sq.size()) /
                           (static_cast<double>(xs.size()) - 1.0);
        est.std_error = std::sqrt(var / static_cast<double>(xs.size()));
    }
    return est;
}

void validate_config(const SimConfig& cfg) {
    if (cfg.n_paths < 1)
        throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    if (!(cfg.dt > 0.0))
        throw std::invalid_argument("SimConfig: dt must be positive");
    if (cfg.t_max < 0.0)
        throw std::invalid_argument("SimConfig: t_max must be positive (or 0 for default)");
}

} // namespace

StoppingRule StoppingRule::immediate_exercise() {
    StoppingRule r;
    r.immediate = true;
    return r;
}

StoppingRule StoppingRule::hit_level_pre(double level) {
    StoppingRule r;
    r.pre_hit_level = level;
    return r;
}

StoppingRule StoppingRule::hit_band_pre(double lo, double hi) {
    if (!(lo < hi)) throw std::invalid_argument("hit_band_pre: need lo < hi");
    StoppingRule r;
    r.pre_band = std::make_pair(lo, hi);
    return r;
}

StoppingRule StoppingRule::excited_optimal(double b1) {
    StoppingRule r;
    r.excited_hit_level = b1;
    return r;
}

StoppingRule StoppingRule::pre_regime_optimal(const PreRegimeSolution& sol) {
    StoppingRule r;
    switch (sol.case_tag) {
        case CaseTag::IIIa:
        case CaseTag::IIIb:
            r.excited_hit_level = sol.b1;
            break;
        case CaseTag::IIIc:
            r.pre_hit_level = sol.params.s0;
            break;
        case CaseTag::IV:
            r.pre_band = std::make_pair(*sol.b_star, sol.b0);
            r.excited_hit_level = sol.b1;
            break;
    }
    return r;
}

StoppingRule StoppingRule::composite(const StoppingRule& a, const StoppingRule& b) {
    auto conflict = [] {
        throw std::invalid_argument("StoppingRule::composite: conflicting components");
    };
    StoppingRule r = a;
    r.immediate = a.immediate || b.immediate;
    if (b.pre_hit_level) {
        if (r.pre_hit_level && *r.pre_hit_level != *b.pre_hit_level) conflict();
        r.pre_hit_level = b.pre_hit_level;
    }
    if (b.pre_band) {
        if (r.pre_band && *r.pre_band != *b.pre_band) conflict();
        r.pre_band = b.pre_band;
    }
    if (b.excited_hit_level) {
        if (r.excited_hit_level && *r.excited_hit_level != *b.excited_hit_level)
            conflict();
        r.excited_hit_level = b.excited_hit_level;
    }
    return r;
}

PathResult simulate_path(const ModelParams& p, const StartState& start,
                         const SimConfig& config, const StoppingRule& rule,
                         std::uint64_t path_index) {
    p.validate();
    validate_start(p, start);
    const double K = p.strike_K;

    // Absorbed price: waiting only loses discount, so stop now.
    if (start.i == 0) return {gain(start.s, K), 0.0, false};
    if (rule.immediate) return {gain(start.s, K), 0.0, false};

    Rng rng(path_seed(config.seed, path_index));
    const double t_max = config.horizon(p);

    if (start.y == 1)
        return excited_leg(p, config, rule, 0.0, start.s, t_max, rng);

    // Pre-switch stop conditions already met at t = 0?
    if (rule.pre_hit_level && start.s <= *rule.pre_hit_level)
        return {gain(start.s, K), 0.0, false};
    if (rule.pre_band && start.s >= rule.pre_band->first &&
        start.s <= rule.pre_band->second)
        return {gain(start.s, K), 0.0, false};

    // Active pre-switch barriers: the highest down-level below the current
    // price wins (it is reached first); a band below the price adds an
    // up-barrier at its lower edge.
    double down = p.s0;
    bool down_is_stop = false;
    if (rule.pre_hit_level && *rule.pre_hit_level >= p.s0) {
        down = std::max(down, *rule.pre_hit_level);
        down_is_stop = true; // at *down*; a level equal to s0 stops at the switch
    }
    std::optional<double> up_log;
    if (rule.pre_band) {
        if (start.s > rule.pre_band->second && rule.pre_band->second > down) {
            down = rule.pre_band->second;
            down_is_stop = true;
        } else if (start.s < rule.pre_band->first) {
            up_log = std::log(rule.pre_band->first);
        }
    }

    const LegExit e =
        run_gbm_leg(p.mu0, p.sigma0, 0.0, std::log(start.s), std::log(down), up_log,
                    t_max, config.dt, config.bridge_correction, rng);
    if (e.kind == LegExit::Up)
        return {std::exp(-p.alpha * e.t) * gain(rule.pre_band->first, K), e.t, false};
    if (e.kind == LegExit::TimeOut)
        return {std::exp(-p.alpha * t_max) * gain(std::exp(e.log_s), K), t_max, true};
    if (down_is_stop)
        return {std::exp(-p.alpha * e.t) * gain(down, K), e.t, false};
    // regime switch at s0: volatility steps up, absorption clock starts
    return excited_leg(p, config, rule, e.t, p.s0, t_max, rng);
}

MCEstimate estimate(const ModelParams& p, const StartState& start,
                    const SimConfig& config, const StoppingRule& rule) {
    p.validate();
    validate_start(p, start);
    validate_config(config);
    std::vector<double> payoffs(static_cast<std::size_t>(config.n_paths));
    long n_trunc = 0;
    for (long i = 0; i < config.n_paths; ++i) {
        const PathResult r = simulate_path(p, start, config, rule,
                                           static_cast<std::uint64_t>(i));
        payoffs[static_cast<std::size_t>(i)] = r.payoff;
        n_trunc += r.truncated ? 1 : 0;
    }
    return summarize(payoffs, n_trunc, config.seed);
}

MCEstimate estimate_hit_discount(const ModelParams& p, double s,
                                 const SimConfig& config) {
    p.validate();
    validate_config(config);
    if (!(s > p.s0))
        throw std::domain_error("estimate_hit_discount: need s > s0");
    const double t_max = config.horizon(p);
    std::vector<double> xs(static_cast<std::size_t>(config.n_paths));
    long n_trunc = 0;
    for (long i = 0; i < config.n_paths; ++i) {
        Rng rng(path_seed(config.seed, static_cast<std::uint64_t>(i)));
        const LegExit e =
            run_gbm_leg(p.mu0, p.sigma0, 0.0, std::log(s), std::log(p.s0),
                        std::nullopt, t_max, config.dt, config.bridge_correction, rng);
        if (e.kind == LegExit::Down) {
            xs[static_cast<std::size_t>(i)] = std::exp(-p.alpha * e.t);
        } else {
            xs[static_cast<std::size_t>(i)] = 0.0; // discounted tail < e^{-alpha t_max}
            ++n_trunc;
        }
    }
    return summarize(xs, n_trunc, config.seed);
}

std::pair<MCEstimate, MCEstimate> estimate_exit_transforms(const ModelParams& p,
                                                           double s, double s_upper,
                                                           const SimConfig& config) {
    p.validate();
    validate_config(config);
    if (!(s_upper > p.s0))
        throw std::domain_error("estimate_exit_transforms: need s_upper > s0");
    if (s < p.s0 || s > s_upper)
        throw std::domain_error("estimate_exit_transforms: need s0 <= s <= s_upper");
    const double t_max = config.horizon(p);
    const std::size_t n = static_cast<std::size_t>(config.n_paths);
    std::vector<double> lower(n, 0.0), upper(n, 0.0);
    long n_trunc = 0;
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng(path_seed(config.seed, i));
        if (s <= p.s0 * (1.0 + 1e-15)) { // already at the lower barrier
            lower[i] = 1.0;
            continue;
        }
        if (s >= s_upper * (1.0 - 1e-15)) {
            upper[i] = 1.0;
            continue;
        }
        const LegExit e = run_gbm_leg(p.mu0, p.sigma0, 0.0, std::log(s),
                                      std::log(p.s0), std::log(s_upper), t_max,
                                      config.dt, config.bridge_correction, rng);
        if (e.kind == LegExit::Down)
            lower[i] = std::exp(-p.alpha * e.t);
        else if (e.kind == LegExit::Up)
            upper[i] = std::exp(-p.alpha * e.t);
        else
            ++n_trunc;
    }
    return {summarize(lower, n_trunc, config.seed),
            summarize(upper, n_trunc, config.seed)};
}

} // namespace ivol
