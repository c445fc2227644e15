// analytic.hpp - Characteristic roots of the pricing ODEs, the perpetual-put
// baseline under plain GBM, the particular solution of the inhomogeneous
// excited-regime ODE, and two-sided first-passage Laplace transforms.
#pragma once

#include "ivol/types.hpp"

namespace ivol {

/// Roots of (1/2) sigma0^2 g^2 + (mu0 - sigma0^2/2) g - alpha = 0, computed
/// with the cancellation-free sign-matched quadratic formula. The product of
/// the roots is -2 alpha / sigma0^2 < 0, so one root is negative and one
/// positive. Throws std::invalid_argument on nonpositive sigma0 or alpha.
CharRoots gamma_roots(double mu0, double sigma0, double alpha);

/// Roots of (1/2) sigma1^2 b^2 + (mu1 - sigma1^2/2) b - (alpha+lambda) = 0.
/// Reduces to gamma_roots(mu1, sigma1, alpha) at lambda = 0.
CharRoots beta_roots(double mu1, double sigma1, double alpha, double lambda);

/// Optimal exercise level of the plain-GBM perpetual put:
/// b0 = -g_neg K / (1 - g_neg), always in (0, K).
double mckean_boundary(const CharRoots& gamma, double strike_K);

/// Perpetual-put value under plain GBM: K - s on (0, b0], and the power tail
/// (K - b0) (s/b0)^{g_neg} beyond. C^1 at b0 (slope -1 on both sides).
double mckean_value(double s, const CharRoots& gamma, double b0, double strike_K);

/// Whether the particular solution must use the logarithmic branch, i.e.
/// |alpha + lambda - mu1| < 1e-9 (alpha + lambda).
bool h_log_branch(const ModelParams& p);

/// Particular solution of
///   mu1 s h' + (1/2) sigma1^2 s^2 h'' + lambda (K - s) - (alpha+lambda) h = 0:
///   h(s) = -lambda s / (alpha+lambda-mu1) + lambda K / (alpha+lambda)
/// generically, and the s*log(s) variant when alpha + lambda = mu1.
double h_particular(double s, const ModelParams& p);

/// Derivative of h_particular in s (branch-matched).
double h_particular_prime(double s, const ModelParams& p);

struct ExitTransforms {
    double phi1 = 0.0; // E[e^{-alpha tau} ; lower barrier s0 reached first]
    double phi2 = 0.0; // E[e^{-alpha tau} ; upper barrier reached first]
};

/// Discounted two-sided exit functionals of GBM(mu0, sigma0) from the
/// corridor [s0, s_upper], in the closed ratio form
///   phi1 = (s/s0)^{g-} ((s/u)^r - 1) / ((s0/u)^r - 1),
///   phi2 = (s/u)^{g-} ((s0/u)^r - (s/u)^r) / ((s0/u)^r - 1),
/// r = g+ - g-. Throws std::domain_error for s outside [s0, s_upper].
ExitTransforms exit_transforms(double s, double s_upper, const CharRoots& gamma,
                               double s0);

} // namespace ivol
