// root_find.hpp - Bracketed scalar root finding (Brent's method and plain
// bisection). All solvers require a sign change over the bracket and throw
// SolverError with diagnostics otherwise.
#pragma once

#include "ivol/types.hpp"

#include <functional>

namespace ivol {

/// Brent's method (bisection/secant/inverse-quadratic hybrid) on [lo, hi].
/// tol_abs is the absolute tolerance on the root location.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol_abs, const char* label = "brent_root");

/// Plain bisection on [lo, hi] to absolute tolerance tol_abs.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol_abs, const char* label = "bisect_root");

} // namespace ivol
