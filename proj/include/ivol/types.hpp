// types.hpp - Model parameters, characteristic roots, and error types shared
// across the solver library.
#pragma once

#include <stdexcept>
#include <string>

namespace ivol {

/// Market/model scalars. Time unit is years throughout: drifts and rates are
/// per year, volatilities per sqrt(year). lambda is the absorption rate of
/// the excited regime (1/lambda = mean excitation length), alpha the discount
/// rate, s0 the trigger level at which volatility switches from sigma0 to
/// sigma1.
struct ModelParams {
    double mu0 = 0.0;
    double sigma0 = 0.0;
    double mu1 = 0.0;
    double sigma1 = 0.0;
    double lambda = 0.0;
    double alpha = 0.0;
    double strike_K = 0.0;
    double s0 = 0.0;

    /// Throws std::invalid_argument unless sigma0, sigma1, lambda, alpha,
    /// strike_K, s0 are all positive. s0 < strike_K is deliberately not
    /// required here; the case classifier handles s0 >= K.
    void validate() const;
};

/// Root pair of a characteristic quadratic, neg < 0 < pos.
struct CharRoots {
    double neg = 0.0;
    double pos = 0.0;
};

/// A bracketed solve failed or produced an internally inconsistent result.
/// The message carries diagnostics (bracket, function values, parameters).
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

inline double gain(double s, double strike_K) {
    return strike_K > s ? strike_K - s : 0.0;
}

} // namespace ivol
