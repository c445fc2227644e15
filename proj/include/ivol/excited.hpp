// excited.hpp - Free-boundary solve for the excited state (volatility already
// switched, absorption clock running): stopping level b1 and the value
// function V(.,1,1).
#pragma once

#include "ivol/analytic.hpp"
#include "ivol/types.hpp"

#include <array>
#include <utility>
#include <vector>

namespace ivol {

/// Solved excited-state value function
///   V(s) = K - s                                    on (0, b1],
///        = c1 (s/K)^{beta+} + c2 (s/K)^{beta-} + h(s) on (b1, K],
///        = d2 (s/K)^{beta-}                          on (K, inf).
///
/// The coefficients are stored against the K-scaled power basis (s/K)^{beta±};
/// raw s^{beta±} coefficients over/underflow double range for large |beta|
/// (e.g. lambda ~ 1e6) while the scaled ones stay O(K).
struct ExcitedSolution {
    double c1 = 0.0;
    double c2 = 0.0;
    double d2 = 0.0;
    double b1 = 0.0;
    CharRoots beta;
    ModelParams params;
};

/// Slope V_b'(b) of the candidate value function whose coefficients solve the
/// three linear pasting equations for a trial stopping level b:
///   Gamma(b) = c1 b^{beta+ - 1}(beta+ - beta-) + alpha K beta- / ((alpha+lambda) b)
///              - ((alpha - mu1) beta- + lambda) / (alpha + lambda - mu1).
/// Only the generic branch alpha + lambda != mu1 has this closed form; the
/// logarithmic branch throws std::domain_error (solve_excited still handles it).
double gamma_big(double b, const ModelParams& p, const CharRoots& beta);

/// Solves the four pasting equations for (c1, c2, d2, b1). Generically b1 is
/// the unique root of Gamma(b) = -1, bracketed in [K 1e-6, K(1 - 1e-9)] and
/// located by Brent to 1e-10 K; the coefficients follow in closed form. On
/// the logarithmic branch (alpha + lambda = mu1) the full 4-dimensional
/// system is solved by damped Newton seeded from a nearby generic solution.
/// Throws SolverError if the bracket does not straddle -1.
ExcitedSolution solve_excited(const ModelParams& p);

/// Piecewise evaluation of V(.,1,1); continuous, C^1 at b1 and K.
double value_excited(double s, const ExcitedSolution& sol);

/// Relative residuals of the four pasting equations (value and slope matching
/// at K and at b1), each scaled by the largest participating term.
std::array<double, 4> system99_residuals(const ExcitedSolution& sol);

/// Coefficients (c1, c2, d2) in the K-scaled basis for a trial boundary b,
/// obtained by direct 3x3 elimination of the linear sub-system instead of the
/// closed forms; used to cross-check the closed-form recovery.
std::array<double, 3> excited_coeffs_by_elimination(double b, const ModelParams& p,
                                                    const CharRoots& beta);

/// The two-point toy stopping problem whose pasting equations
///   g(x0) = c2 / x0,  g'(x0) = -c2 / x0^2
/// admit more than one solution. Returns every (c2, x0) candidate built from
/// the fixed data g(1/2) = 4, g(1) = 1, g'(1/2) = -8, g'(1) = -1, verifying
/// both equations for each.
std::vector<std::pair<double, double>> toy_nonuniqueness_a4();

} // namespace ivol
