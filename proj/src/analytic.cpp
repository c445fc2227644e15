#include "ivol/analytic.hpp"

#include <cmath>
#include <sstream>

namespace ivol {

namespace {

// Stable roots of a q^2 + b q + c = 0 with a > 0, c < 0. The sign-matched
// form avoids cancellation when |b| dominates the discriminant.
CharRoots quadratic_roots(double a, double b, double c) {
    const double disc = b * b - 4.0 * a * c;
    const double sd = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sd : -sd));
    const double r1 = q / a;
    const double r2 = c / q;
    CharRoots out;
    out.neg = std::min(r1, r2);
    out.pos = std::max(r1, r2);
    return out;
}

} // namespace

void ModelParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "ModelParams: " << name << " must be positive, got " << v;
            throw std::invalid_argument(msg.str());
        }
    };
    positive(sigma0, "sigma0");
    positive(sigma1, "sigma1");
    positive(lambda, "lambda");
    positive(alpha, "alpha");
    positive(strike_K, "strike_K");
    positive(s0, "s0");
}

CharRoots gamma_roots(double mu0, double sigma0, double alpha) {
    if (!(sigma0 > 0.0))
        throw std::invalid_argument("gamma_roots: sigma0 must be positive");
    if (!(alpha > 0.0))
        throw std::invalid_argument("gamma_roots: alpha must be positive");
    const double a = 0.5 * sigma0 * sigma0;
    return quadratic_roots(a, mu0 - a, -alpha);
}

CharRoots beta_roots(double mu1, double sigma1, double alpha, double lambda) {
    if (!(sigma1 > 0.0))
        throw std::invalid_argument("beta_roots: sigma1 must be positive");
    if (!(alpha + lambda > 0.0))
        throw std::invalid_argument("beta_roots: alpha + lambda must be positive");
    const double a = 0.5 * sigma1 * sigma1;
    return quadratic_roots(a, mu1 - a, -(alpha + lambda));
}

double mckean_boundary(const CharRoots& gamma, double strike_K) {
    if (!(gamma.neg < 0.0))
        throw std::invalid_argument("mckean_boundary: gamma.neg must be negative");
    return -gamma.neg * strike_K / (1.0 - gamma.neg);
}

double mckean_value(double s, const CharRoots& gamma, double b0, double strike_K) {
    if (!(s > 0.0))
        throw std::domain_error("mckean_value: s must be positive");
    if (s <= b0) return strike_K - s;
    return (strike_K - b0) * std::pow(s / b0, gamma.neg);
}

bool h_log_branch(const ModelParams& p) {
    const double al = p.alpha + p.lambda;
    return std::abs(al - p.mu1) < 1e-9 * al;
}

double h_particular(double s, const ModelParams& p) {
    if (!(s > 0.0))
        throw std::domain_error("h_particular: s must be positive");
    const double al = p.alpha + p.lambda;
    if (h_log_branch(p))
        return p.lambda * s * std::log(s) / (al + 0.5 * p.sigma1 * p.sigma1)
             + p.lambda * p.strike_K / al;
    return -p.lambda * s / (al - p.mu1) + p.lambda * p.strike_K / al;
}

double h_particular_prime(double s, const ModelParams& p) {
    if (!(s > 0.0))
        throw std::domain_error("h_particular_prime: s must be positive");
    const double al = p.alpha + p.lambda;
    if (h_log_branch(p))
        return p.lambda * (std::log(s) + 1.0) / (al + 0.5 * p.sigma1 * p.sigma1);
    return -p.lambda / (al - p.mu1);
}

ExitTransforms exit_transforms(double s, double s_upper, const CharRoots& gamma,
                               double s0) {
    if (!(s0 > 0.0) || !(s_upper > s0))
        throw std::domain_error("exit_transforms: need 0 < s0 < s_upper");
    if (s < s0 || s > s_upper) {
        std::ostringstream msg;
        msg << "exit_transforms: s = " << s << " outside [" << s0 << ", "
            << s_upper << "]";
        throw std::domain_error(msg.str());
    }
    const double r = gamma.pos - gamma.neg;
    const double su = std::pow(s / s_upper, r);   // (s/u)^r in (0, 1]
    const double s0u = std::pow(s0 / s_upper, r); // (s0/u)^r in (0, 1)
    ExitTransforms out;
    out.phi1 = std::pow(s / s0, gamma.neg) * (su - 1.0) / (s0u - 1.0);
    out.phi2 = std::pow(s / s_upper, gamma.neg) * (s0u - su) / (s0u - 1.0);
    return out;
}

} // namespace ivol
