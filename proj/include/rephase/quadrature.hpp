#pragma once

#include <cmath>
#include <stdexcept>

namespace rephase {

class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

namespace detail {

template <class F>
double simpson_step(const F &f, double a, double fa, double m, double fm, double b, double fb, double whole, double tol,
                    int depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    if (lm <= a || rm >= b) {
        // interval is down to a few ulps, nothing left to refine
        return left + right;
    }
    if (depth <= 0) {
        throw QuadratureError("adaptive Simpson did not converge");
    }
    return simpson_step(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance `tol`.
/// The range is first cut into `panels` pieces so that narrow features are
/// not missed by the initial five-point estimate.
template <class F>
double integrate(const F &f, double a, double b, double tol = 1e-10, int max_depth = 60, int panels = 16) {
    if (!(b > a)) {
        if (a == b) {
            return 0.0;
        }
        throw std::invalid_argument("integration bounds must satisfy a <= b");
    }
    double h = (b - a) / panels;
    double total = 0.0;
    for (int k = 0; k < panels; ++k) {
        double lo = a + k * h;
        double hi = k + 1 == panels ? b : a + (k + 1) * h;
        double mid = 0.5 * (lo + hi);
        double flo = f(lo);
        double fmid = f(mid);
        double fhi = f(hi);
        double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += detail::simpson_step(f, lo, flo, mid, fmid, hi, fhi, whole, tol / panels, max_depth);
    }
    return total;
}

}  // namespace rephase
