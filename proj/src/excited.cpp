#include "ivol/excited.hpp"

#include "ivol/root_find.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ivol {

namespace {

// c1 in the K-scaled basis, independent of the trial boundary. Follows from
// eliminating d2 between the two pasting equations at K:
//   c1 K^{beta+}(beta+ - beta-) = beta- h(K) - K h'(K)
// which holds for either branch of h.
double c1_scaled(const ModelParams& p, const CharRoots& beta) {
    const double hK = h_particular(p.strike_K, p);
    const double hpK = h_particular_prime(p.strike_K, p);
    return (beta.neg * hK - p.strike_K * hpK) / (beta.pos - beta.neg);
}

double c2_scaled(double b, double c1s, const ModelParams& p, const CharRoots& beta) {
    const double w = b / p.strike_K;
    return (p.strike_K - b - h_particular(b, p) - c1s * std::pow(w, beta.pos))
           * std::pow(w, -beta.neg);
}

// Slope of the candidate value function at its trial boundary, valid on both
// h-branches: V_b'(b) = c1 b^{beta+-1}(beta+-beta-) + beta-(K-b-h(b))/b + h'(b).
double candidate_slope(double b, double c1s, const ModelParams& p,
                       const CharRoots& beta) {
    const double w = b / p.strike_K;
    return c1s * std::pow(w, beta.pos) / b * (beta.pos - beta.neg)
         + beta.neg * (p.strike_K - b - h_particular(b, p)) / b
         + h_particular_prime(b, p);
}

// 4x4 linear solve with partial pivoting, for the log-branch Newton step.
std::array<double, 4> solve4(std::array<std::array<double, 4>, 4> a,
                             std::array<double, 4> rhs) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        std::swap(rhs[col], rhs[piv]);
        if (a[col][col] == 0.0)
            throw SolverError("solve_excited: singular Newton Jacobian");
        for (int r = col + 1; r < 4; ++r) {
            const double f = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= f * a[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::array<double, 4> x{};
    for (int r = 3; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

std::array<double, 4> pasting_system(const ExcitedSolution& sol) {
    const ModelParams& p = sol.params;
    const double K = p.strike_K;
    const double w = sol.b1 / K;
    const double wp = std::pow(w, sol.beta.pos);
    const double wm = std::pow(w, sol.beta.neg);
    return {
        sol.c1 + sol.c2 + h_particular(K, p) - sol.d2,
        sol.c1 * sol.beta.pos + sol.c2 * sol.beta.neg + K * h_particular_prime(K, p)
            - sol.d2 * sol.beta.neg,
        sol.c1 * wp + sol.c2 * wm + h_particular(sol.b1, p) - (K - sol.b1),
        sol.c1 * sol.beta.pos * wp + sol.c2 * sol.beta.neg * wm
            + sol.b1 * h_particular_prime(sol.b1, p) + sol.b1,
    };
}

ExcitedSolution solve_log_branch(const ModelParams& p) {
    // Measure-zero case alpha + lambda = mu1: no closed Gamma formula, so the
    // full system is solved by damped Newton with the log-variant h, seeded
    // from the generic solution at a slightly shifted mu1.
    const double al = p.alpha + p.lambda;
    ModelParams near = p;
    near.mu1 = p.mu1 - 1e-6 * al; // just outside the branch band
    ExcitedSolution seed = solve_excited(near);

    ExcitedSolution sol;
    sol.params = p;
    sol.beta = beta_roots(p.mu1, p.sigma1, p.alpha, p.lambda);
    sol.c1 = seed.c1;
    sol.c2 = seed.c2;
    sol.d2 = seed.d2;
    sol.b1 = seed.b1;

    const double K = p.strike_K;
    const double hlog_curv = p.lambda / (al + 0.5 * p.sigma1 * p.sigma1); // h''(s) = this / s
    auto norm = [](const std::array<double, 4>& f) {
        return std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) + std::abs(f[3]);
    };
    std::array<double, 4> f = pasting_system(sol);
    for (int iter = 0; iter < 100; ++iter) {
        if (norm(f) < 1e-11 * K) break;
        const double b = sol.b1;
        const double w = b / K;
        const double wp = std::pow(w, sol.beta.pos);
        const double wm = std::pow(w, sol.beta.neg);
        const double hp = h_particular_prime(b, p);
        std::array<std::array<double, 4>, 4> jac{{
            {1.0, 1.0, -1.0, 0.0},
            {sol.beta.pos, sol.beta.neg, -sol.beta.neg, 0.0},
            {wp, wm, 0.0,
             sol.c1 * sol.beta.pos * wp / b + sol.c2 * sol.beta.neg * wm / b + hp + 1.0},
            {sol.beta.pos * wp, sol.beta.neg * wm, 0.0,
             sol.c1 * sol.beta.pos * sol.beta.pos * wp / b
                 + sol.c2 * sol.beta.neg * sol.beta.neg * wm / b
                 + hp + hlog_curv + 1.0},
        }};
        const std::array<double, 4> step = solve4(jac, f);
        double damp = 1.0;
        ExcitedSolution trial = sol;
        for (int halving = 0; halving < 60; ++halving) {
            trial.c1 = sol.c1 - damp * step[0];
            trial.c2 = sol.c2 - damp * step[1];
            trial.d2 = sol.d2 - damp * step[2];
            trial.b1 = sol.b1 - damp * step[3];
            if (trial.b1 > 0.0 && trial.b1 < K) {
                const std::array<double, 4> ft = pasting_system(trial);
                if (norm(ft) < norm(f)) {
                    sol = trial;
                    f = ft;
                    break;
                }
            }
            damp *= 0.5;
        }
    }
    if (norm(f) >= 1e-9 * K) {
        std::ostringstream msg;
        msg << "solve_excited: log-branch Newton stalled, |F| = " << norm(f)
            << " at b1 = " << sol.b1;
        throw SolverError(msg.str());
    }
    return sol;
}

} // namespace

double gamma_big(double b, const ModelParams& p, const CharRoots& beta) {
    if (!(b > 0.0))
        throw std::domain_error("gamma_big: b must be positive");
    if (h_log_branch(p))
        throw std::domain_error(
            "gamma_big: closed form requires alpha + lambda != mu1 "
            "(logarithmic h branch is unsupported here)");
    const double al = p.alpha + p.lambda;
    const double c1s = c1_scaled(p, beta);
    return c1s * std::pow(b / p.strike_K, beta.pos) / b * (beta.pos - beta.neg)
         + p.alpha * p.strike_K * beta.neg / (al * b)
         - ((p.alpha - p.mu1) * beta.neg + p.lambda) / (al - p.mu1);
}

ExcitedSolution solve_excited(const ModelParams& p) {
    p.validate();
    if (h_log_branch(p)) return solve_log_branch(p);

    const double K = p.strike_K;
    ExcitedSolution sol;
    sol.params = p;
    sol.beta = beta_roots(p.mu1, p.sigma1, p.alpha, p.lambda);
    const double c1s = c1_scaled(p, sol.beta);

    const double lo = K * 1e-6;
    const double hi = K * (1.0 - 1e-9);
    auto f = [&](double b) { return candidate_slope(b, c1s, p, sol.beta) + 1.0; };
    try {
        sol.b1 = brent_root(f, lo, hi, 1e-10 * K, "solve_excited");
    } catch (const SolverError& e) {
        std::ostringstream msg;
        msg << e.what() << "; Gamma(b) does not straddle -1 for K = " << K
            << ", mu1 = " << p.mu1 << ", sigma1 = " << p.sigma1
            << ", alpha = " << p.alpha << ", lambda = " << p.lambda;
        throw SolverError(msg.str());
    }

    sol.c1 = c1s;
    sol.c2 = c2_scaled(sol.b1, c1s, p, sol.beta);
    sol.d2 = sol.c1 + sol.c2 + h_particular(K, p);
    return sol;
}

double value_excited(double s, const ExcitedSolution& sol) {
    if (!(s > 0.0))
        throw std::domain_error("value_excited: s must be positive");
    if (s <= sol.b1) return sol.params.strike_K - s;
    const double w = s / sol.params.strike_K;
    if (s <= sol.params.strike_K)
        return sol.c1 * std::pow(w, sol.beta.pos) + sol.c2 * std::pow(w, sol.beta.neg)
             + h_particular(s, sol.params);
    return sol.d2 * std::pow(w, sol.beta.neg);
}

std::array<double, 4> system99_residuals(const ExcitedSolution& sol) {
    const ModelParams& p = sol.params;
    const double K = p.strike_K;
    const double w = sol.b1 / K;
    const double wp = std::pow(w, sol.beta.pos);
    const double wm = std::pow(w, sol.beta.neg);
    const std::array<double, 4> raw = pasting_system(sol);

    auto rel = [](double r, std::initializer_list<double> terms) {
        double scale = 0.0;
        for (double t : terms) scale = std::max(scale, std::abs(t));
        return scale > 0.0 ? std::abs(r) / scale : std::abs(r);
    };
    const double hK = h_particular(K, p);
    const double hb = h_particular(sol.b1, p);
    return {
        rel(raw[0], {sol.c1, sol.c2, hK, sol.d2}),
        rel(raw[1], {sol.c1 * sol.beta.pos, sol.c2 * sol.beta.neg,
                     K * h_particular_prime(K, p), sol.d2 * sol.beta.neg}),
        rel(raw[2], {sol.c1 * wp, sol.c2 * wm, hb, K - sol.b1}),
        rel(raw[3], {sol.c1 * sol.beta.pos * wp, sol.c2 * sol.beta.neg * wm,
                     sol.b1 * h_particular_prime(sol.b1, p), sol.b1}),
    };
}

std::array<double, 3> excited_coeffs_by_elimination(double b, const ModelParams& p,
                                                    const CharRoots& beta) {
    // First three pasting equations, linear in (c1, c2, d2) for fixed b:
    //   c1 + c2 - d2                      = -h(K)
    //   c1 bp + c2 bm - d2 bm             = -K h'(K)
    //   c1 w^bp + c2 w^bm                 = K - b - h(b)
    const double K = p.strike_K;
    const double w = b / K;
    double m[3][4] = {
        {1.0, 1.0, -1.0, -h_particular(K, p)},
        {beta.pos, beta.neg, -beta.neg, -K * h_particular_prime(K, p)},
        {std::pow(w, beta.pos), std::pow(w, beta.neg), 0.0,
         K - b - h_particular(b, p)},
    };
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r)
            if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
        for (int c = 0; c < 4; ++c) std::swap(m[col][c], m[piv][c]);
        for (int r = col + 1; r < 3; ++r) {
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double acc = m[r][3];
        for (int c = r + 1; c < 3; ++c) acc -= m[r][c] * x[c];
        x[r] = acc / m[r][r];
    }
    return x;
}

std::vector<std::pair<double, double>> toy_nonuniqueness_a4() {
    // Gain data of the toy problem: pairs (x0, g(x0), g'(x0)).
    constexpr struct {
        double x0, g, gp;
    } data[] = {{1.0, 1.0, -1.0}, {0.5, 4.0, -8.0}};

    std::vector<std::pair<double, double>> out;
    for (const auto& d : data) {
        const double c2 = d.g * d.x0; // from g(x0) = c2 / x0
        const double r1 = d.g - c2 / d.x0;
        const double r2 = d.gp + c2 / (d.x0 * d.x0);
        if (std::abs(r1) < 1e-12 && std::abs(r2) < 1e-12)
            out.emplace_back(c2, d.x0);
    }
    return out;
}

} // namespace ivol
