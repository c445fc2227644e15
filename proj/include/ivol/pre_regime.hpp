// pre_regime.hpp - Classification of the pre-switch state into the four value
// function cases and the solve for the case-IV exercise band, including the
// disconnected-continuation boundary b*.
#pragma once

#include "ivol/excited.hpp"

#include <optional>
#include <string>
#include <utility>

namespace ivol {

enum class CaseTag { IIIa, IIIb, IIIc, IV };

const char* to_string(CaseTag tag);

/// Pre-switch value function V(.,0,1), defined for s > s0.
///
/// Cases IIIa/IIIb/IIIc: single power branch V(s0,1,1) (s/s0)^{gamma-}.
/// Case IV: three branches with an exercise band [b_star, b0]:
///   e1* (s/s0)^{gamma+} + e2* (s/s0)^{gamma-}  on (s0, b_star),
///   K - s                                       on [b_star, b0],
///   (K - b0)(s/b0)^{gamma-}                     on (b0, inf).
/// e1_star/e2_star are stored against the s0-scaled basis (s/s0)^{gamma±}
/// (same overflow rationale as ExcitedSolution) and are present exactly when
/// case_tag == IV, as is b_star.
struct PreRegimeSolution {
    CaseTag case_tag = CaseTag::IIIb;
    double b0 = 0.0;
    double b1 = 0.0;
    double v_s0 = 0.0; // V(s0, 1, 1)
    std::optional<double> e1_star;
    std::optional<double> e2_star;
    std::optional<double> b_star;
    CharRoots gamma;
    ModelParams params;
};

/// Case classification. Primal conditions:
///   IIIa: b0 > s0 and V(s0,1,1) >= (K - b0)(s0/b0)^{gamma-}
///   IIIb: b0 <= s0 and V(s0,1,1) >  (K - s0)^+
///   IIIc: b0 <= s0 < K and V(s0,1,1) = K - s0   (within 1e-9 K)
///   IV:   b0 > s0 and K - s0 <= V(s0,1,1) < (K - b0)(s0/b0)^{gamma-}
/// Cross-checked against the reformulation (IIIb': b1 < s0, IIIc': b1 >= s0
/// when b0 <= s0 < K); a disagreement beyond the 1e-9 K equality band throws
/// SolverError.
CaseTag classify(const ModelParams& p, const ExcitedSolution& excited);

/// The reformulated classifier alone (it distinguishes IIIb/IIIc through b1
/// instead of through V(s0,1,1)); exposed for the grid-agreement checks.
CaseTag classify_reformulated(const ModelParams& p, const ExcitedSolution& excited);

/// Candidate value Gamma(s, s_tilde) = V(s0,1,1) phi1 + (K - s_tilde) phi2 of
/// the rule "stop at whichever of s0, s_tilde is reached first". Satisfies
/// Gamma(s0, s~) = V(s0,1,1) and Gamma(s~, s~) = K - s~.
double gamma_cap(double s, double s_tilde, double v_s0, const ModelParams& p,
                 const CharRoots& gamma);

/// Diagonal derivative g(v, s) = d/ds Gamma(s, s~)|_{s~ = s} in the first
/// argument; s > s0 required.
double g_slope(double v, double s, const ModelParams& p, const CharRoots& gamma);

/// The two solutions s1 < b0 < s2 in (s0, K) of
///   V(s0,1,1) (s/s0)^{gamma-} = K - s
/// under the case-IV conditions. Bracketing failure throws SolverError (it
/// signals a misclassified case).
std::pair<double, double> tangency_roots(const ModelParams& p,
                                         const ExcitedSolution& excited,
                                         const CharRoots& gamma);

struct BandFit {
    double e1_star = 0.0; // (s/s0)^{gamma+} coefficient
    double e2_star = 0.0; // (s/s0)^{gamma-} coefficient
    double b_star = 0.0;
};

/// Case-IV band boundary: b* solves g(V(s0,1,1), b) = -1 in (s1, b0), with
/// e1*, e2* from the closed forms; degenerates to b* = s0 with a two-point
/// boundary fit when V(s0,1,1) = K - s0 within the equality band. All four
/// defining conditions are verified, dominance on a 512-point grid; a
/// violation throws SolverError naming the offending s.
BandFit solve_b_star(const ModelParams& p, const ExcitedSolution& excited,
                     const CharRoots& gamma);

/// The s0 level at which classification switches between IIIa and IV for the
/// given mu0 (other parameters from base): unique root of
///   V(x,1,1) = (K - b0)(x/b0)^{gamma-}
/// bisected in [b1, b0(mu0)] to 1e-8 K. Requires b0(mu0) > b1; otherwise the
/// switch point does not exist and SolverError is thrown.
double s0_max(double mu0, const ModelParams& base, const ExcitedSolution& excited);

/// classify + per-case fields in one call.
PreRegimeSolution solve_pre_regime(const ModelParams& p, const ExcitedSolution& excited);

/// Piecewise evaluation of V(.,0,1); throws std::domain_error for s <= s0.
double value_pre_regime(double s, const PreRegimeSolution& sol);

} // namespace ivol
