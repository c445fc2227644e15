#include "ivol/root_find.hpp"

#include <cmath>
#include <sstream>

namespace ivol {

namespace {

[[noreturn]] void bracket_failure(const char* label, double lo, double hi,
                                  double flo, double fhi) {
    std::ostringstream msg;
    msg << label << ": no sign change over bracket [" << lo << ", " << hi
        << "], f(lo) = " << flo << ", f(hi) = " << fhi;
    throw SolverError(msg.str());
}

} // namespace

double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol_abs, const char* label) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) bracket_failure(label, lo, hi, fa, fb);

    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < 200; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * tol_abs;
        const double m = 0.5 * (c - b);
        if (std::abs(m) <= tol || fb == 0.0) return b;

        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            // secant / inverse quadratic step
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q; else p = -p;
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = m; e = m;
            }
        } else {
            d = m; e = m;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol) ? d : (m > 0.0 ? tol : -tol);
        fb = f(b);
    }
    std::ostringstream msg;
    msg << label << ": no convergence after 200 iterations, last b = " << b;
    throw SolverError(msg.str());
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   double tol_abs, const char* label) {
    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) bracket_failure(label, lo, hi, fa, fb);
    while (b - a > tol_abs) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid; fa = fm;
        } else {
            b = mid; fb = fm;
        }
    }
    return 0.5 * (a + b);
}

} // namespace ivol
