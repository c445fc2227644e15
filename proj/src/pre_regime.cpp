#include "ivol/pre_regime.hpp"

#include "ivol/root_find.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ivol {

namespace {

// Equality band for the measure-zero case conditions; exact equality never
// holds in floating point.
double equality_band(const ModelParams& p) { return 1e-9 * p.strike_K; }

void check_same_excited_params(const ModelParams& p, const ExcitedSolution& excited) {
    const ModelParams& q = excited.params;
    if (p.mu1 != q.mu1 || p.sigma1 != q.sigma1 || p.lambda != q.lambda ||
        p.alpha != q.alpha || p.strike_K != q.strike_K)
        throw std::invalid_argument(
            "pre_regime: excited solution was solved for different parameters");
}

double mckean_tail(double s, double b0, const CharRoots& gamma, double strike_K) {
    return (strike_K - b0) * std::pow(s / b0, gamma.neg);
}

CaseTag classify_primal(const ModelParams& p, double b0, double v_s0,
                        const CharRoots& gamma) {
    if (b0 > p.s0) {
        const double tail = mckean_tail(p.s0, b0, gamma, p.strike_K);
        return v_s0 >= tail ? CaseTag::IIIa : CaseTag::IV;
    }
    if (p.s0 < p.strike_K &&
        std::abs(v_s0 - (p.strike_K - p.s0)) <= equality_band(p))
        return CaseTag::IIIc;
    return CaseTag::IIIb;
}

} // namespace

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::IIIa: return "IIIa";
        case CaseTag::IIIb: return "IIIb";
        case CaseTag::IIIc: return "IIIc";
        case CaseTag::IV: return "IV";
    }
    return "?";
}

CaseTag classify_reformulated(const ModelParams& p, const ExcitedSolution& excited) {
    check_same_excited_params(p, excited);
    const CharRoots gamma = gamma_roots(p.mu0, p.sigma0, p.alpha);
    const double b0 = mckean_boundary(gamma, p.strike_K);
    if (b0 > p.s0) {
        const double v_s0 = value_excited(p.s0, excited);
        return v_s0 >= mckean_tail(p.s0, b0, gamma, p.strike_K) ? CaseTag::IIIa
                                                                : CaseTag::IV;
    }
    return (p.s0 < p.strike_K && excited.b1 >= p.s0) ? CaseTag::IIIc : CaseTag::IIIb;
}

CaseTag classify(const ModelParams& p, const ExcitedSolution& excited) {
    p.validate();
    check_same_excited_params(p, excited);
    const CharRoots gamma = gamma_roots(p.mu0, p.sigma0, p.alpha);
    const double b0 = mckean_boundary(gamma, p.strike_K);
    const double v_s0 = value_excited(p.s0, excited);

    const CaseTag primal = classify_primal(p, b0, v_s0, gamma);
    const CaseTag reform = classify_reformulated(p, excited);
    if (primal != reform) {
        // The only legitimate split: s0 sits just above b1, where the value
        // gap to K - s0 is quadratically small and falls inside the equality
        // band while b1 < s0 is still strict.
        const bool in_band =
            std::abs(v_s0 - (p.strike_K - p.s0)) <= equality_band(p);
        const bool benign = primal == CaseTag::IIIc && reform == CaseTag::IIIb && in_band;
        if (!benign) {
            std::ostringstream msg;
            msg << "classify: primal case " << to_string(primal)
                << " disagrees with reformulated case " << to_string(reform)
                << " beyond tolerance (s0 = " << p.s0 << ", b0 = " << b0
                << ", b1 = " << excited.b1 << ", V(s0,1,1) = " << v_s0 << ")";
            throw SolverError(msg.str());
        }
    }
    return primal;
}

double gamma_cap(double s, double s_tilde, double v_s0, const ModelParams& p,
                 const CharRoots& gamma) {
    const ExitTransforms phi = exit_transforms(s, s_tilde, gamma, p.s0);
    return v_s0 * phi.phi1 + (p.strike_K - s_tilde) * phi.phi2;
}

double g_slope(double v, double s, const ModelParams& p, const CharRoots& gamma) {
    if (!(s > p.s0))
        throw std::domain_error("g_slope: s must exceed s0");
    const double u = s / p.s0;
    const double up = std::pow(u, gamma.pos);
    const double um = std::pow(u, gamma.neg);
    const double num = v * up * um * (gamma.pos - gamma.neg)
                     + (p.strike_K - s) * (gamma.neg * um - gamma.pos * up);
    return num / (s * (um - up));
}

std::pair<double, double> tangency_roots(const ModelParams& p,
                                         const ExcitedSolution& excited,
                                         const CharRoots& gamma) {
    check_same_excited_params(p, excited);
    const double K = p.strike_K;
    const double b0 = mckean_boundary(gamma, K);
    const double v_s0 = value_excited(p.s0, excited);
    auto f = [&](double s) {
        return v_s0 * std::pow(s / p.s0, gamma.neg) - (K - s);
    };
    try {
        const double s1 =
            brent_root(f, p.s0 * (1.0 + 1e-12), b0, 1e-10 * K, "tangency_roots[s1]");
        const double s2 =
            brent_root(f, b0, K * (1.0 - 1e-12), 1e-10 * K, "tangency_roots[s2]");
        return {s1, s2};
    } catch (const SolverError& e) {
        std::ostringstream msg;
        msg << e.what() << "; no tangency bracket -- are the case-IV conditions "
            << "satisfied? (s0 = " << p.s0 << ", b0 = " << b0
            << ", V(s0,1,1) = " << v_s0 << ")";
        throw SolverError(msg.str());
    }
}

BandFit solve_b_star(const ModelParams& p, const ExcitedSolution& excited,
                     const CharRoots& gamma) {
    check_same_excited_params(p, excited);
    const double K = p.strike_K;
    const double b0 = mckean_boundary(gamma, K);
    const double v_s0 = value_excited(p.s0, excited);
    if (!(b0 > p.s0) || !(v_s0 < mckean_tail(p.s0, b0, gamma, K)))
        throw std::invalid_argument("solve_b_star: parameters are not case IV");

    BandFit fit;
    if (std::abs(K - p.s0 - v_s0) <= equality_band(p)) {
        // Band starts at s0 itself; the left power branch is empty and the
        // coefficients come from fitting value and slope -1 at s0.
        fit.b_star = p.s0;
        fit.e1_star = (-p.s0 - gamma.neg * v_s0) / (gamma.pos - gamma.neg);
        fit.e2_star = v_s0 - fit.e1_star;
        return fit;
    }

    const auto [s1, s2] = tangency_roots(p, excited, gamma);
    (void)s2;
    auto f = [&](double b) { return g_slope(v_s0, b, p, gamma) + 1.0; };
    fit.b_star = brent_root(f, s1 * (1.0 + 1e-12), b0 * (1.0 - 1e-12), 1e-10 * K,
                            "solve_b_star");

    const double w = fit.b_star / p.s0;
    const double wp = std::pow(w, gamma.pos);
    const double wm = std::pow(w, gamma.neg);
    const double den = wm - wp; // negative since s0 < b_star
    fit.e1_star = (v_s0 * wm - (K - fit.b_star)) / den;
    fit.e2_star = (-v_s0 * wp + (K - fit.b_star)) / den;

    // All four defining conditions, the first three to roundoff, the strict
    // dominance sampled on a grid.
    auto fail = [&](const char* cond, double detail) {
        std::ostringstream msg;
        msg << "solve_b_star: condition '" << cond << "' violated (" << detail
            << ") at b_star = " << fit.b_star;
        throw SolverError(msg.str());
    };
    if (std::abs(fit.e1_star + fit.e2_star - v_s0) > 1e-9 * v_s0)
        fail("value match at s0", fit.e1_star + fit.e2_star - v_s0);
    if (std::abs(fit.e1_star * wp + fit.e2_star * wm - (K - fit.b_star)) >
        1e-9 * (K - fit.b_star))
        fail("value match at b_star", fit.e1_star * wp + fit.e2_star * wm);
    const double slope =
        (fit.e1_star * gamma.pos * wp + fit.e2_star * gamma.neg * wm) / fit.b_star;
    if (std::abs(slope + 1.0) > 1e-9) fail("slope -1 at b_star", slope);
    constexpr int kGrid = 512;
    for (int i = 1; i < kGrid; ++i) {
        const double s = p.s0 + (fit.b_star - p.s0) * i / kGrid;
        const double u = s / p.s0;
        const double term_pos = fit.e1_star * std::pow(u, gamma.pos);
        const double term_neg = fit.e2_star * std::pow(u, gamma.neg);
        // strict in exact arithmetic; allow the forward error of the
        // evaluation, which matters when the band is a sliver and the
        // coefficients are large with cancelling signs
        const double round_off = 32.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(term_pos) + std::abs(term_neg) + K);
        if (!(term_pos + term_neg - (K - s) > -round_off))
            fail("dominance on (s0, b_star)", s);
    }
    return fit;
}

double s0_max(double mu0, const ModelParams& base, const ExcitedSolution& excited) {
    check_same_excited_params(base, excited);
    const CharRoots gamma = gamma_roots(mu0, base.sigma0, base.alpha);
    const double K = base.strike_K;
    const double b0 = mckean_boundary(gamma, K);
    const double b1 = excited.b1;
    if (!(b0 > b1)) {
        std::ostringstream msg;
        msg << "s0_max: b0(mu0) = " << b0 << " does not exceed b1 = " << b1
            << " at mu0 = " << mu0 << "; the IIIa/IV switch point does not exist";
        throw SolverError(msg.str());
    }
    auto gap = [&](double x) {
        return value_excited(x, excited) - mckean_tail(x, b0, gamma, K);
    };
    const double glo = gap(b1), ghi = gap(b0);
    if (!(glo < 0.0) || !(ghi > 0.0)) {
        std::ostringstream msg;
        msg << "s0_max: gap does not change sign over [b1, b0]: gap(b1) = " << glo
            << ", gap(b0) = " << ghi;
        throw SolverError(msg.str());
    }
    return bisect_root(gap, b1, b0, 1e-8 * K, "s0_max");
}

PreRegimeSolution solve_pre_regime(const ModelParams& p, const ExcitedSolution& excited) {
    PreRegimeSolution sol;
    sol.case_tag = classify(p, excited);
    sol.gamma = gamma_roots(p.mu0, p.sigma0, p.alpha);
    sol.b0 = mckean_boundary(sol.gamma, p.strike_K);
    sol.b1 = excited.b1;
    sol.v_s0 = value_excited(p.s0, excited);
    sol.params = p;
    if (sol.case_tag == CaseTag::IV) {
        const BandFit fit = solve_b_star(p, excited, sol.gamma);
        sol.e1_star = fit.e1_star;
        sol.e2_star = fit.e2_star;
        sol.b_star = fit.b_star;
    }
    return sol;
}

double value_pre_regime(double s, const PreRegimeSolution& sol) {
    const ModelParams& p = sol.params;
    if (!(s > p.s0)) {
        std::ostringstream msg;
        msg << "value_pre_regime: s = " << s << " is outside the pre-switch "
            << "state space (s0, inf), s0 = " << p.s0;
        throw std::domain_error(msg.str());
    }
    if (sol.case_tag != CaseTag::IV)
        return sol.v_s0 * std::pow(s / p.s0, sol.gamma.neg);
    if (s < *sol.b_star) {
        const double u = s / p.s0;
        return *sol.e1_star * std::pow(u, sol.gamma.pos)
             + *sol.e2_star * std::pow(u, sol.gamma.neg);
    }
    if (s <= sol.b0) return p.strike_K - s;
    return mckean_tail(s, sol.b0, sol.gamma, p.strike_K);
}

} // namespace ivol
