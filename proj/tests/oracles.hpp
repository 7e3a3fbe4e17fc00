#pragma once

// Test-only reference computations, kept independent of the library's own
// evaluation paths: power series, quadrature oracles, closed forms.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "scatlab/potential.hpp"

namespace oracles {

// J_nu(x) by the defining power series, summed to machine precision.
// Accurate for moderate x (alternating-series cancellation grows with x).
inline double bessel_j_series(double nu, double x) {
    const double x2 = 0.5 * x;
    double term = std::pow(x2, nu) / std::tgamma(nu + 1.0);
    double sum = term;
    for (int m = 1; m < 400; ++m) {
        term *= -(x2 * x2) / (m * (m + nu));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// adaptive Simpson quadrature
inline double simpson_rec(const std::function<double(double)>& f, double a, double b,
                          double fa, double fm, double fb, double whole, double tol,
                          int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// Classical deflection quadrature for a central potential at energy 1:
//   Theta(b) = pi - 2 b Int_{r_min}^inf dr / (r^2 sqrt(1 - V(r) - b^2/r^2)),
// endpoint singularity removed by r = r_min + w^2.
inline double deflection_quadrature(const scatlab::Potential& V, double b,
                                    double tol = 1e-11) {
    const double R = V.support_radius();
    if (b <= 0.0 || b >= R) return 0.0;
    auto g = [&](double r) { return 1.0 - V.radial_value(r) - b * b / (r * r); };

    // largest root of g scanning inward from R + 1
    double hi = R + 1.0, lo = 0.0;
    bool found = false;
    const int scan = 4000;
    double prev_r = hi, prev_g = g(hi);
    for (int i = 1; i <= scan; ++i) {
        const double r = hi - (hi - 1e-9) * i / scan;
        const double gr = g(r);
        if (gr <= 0.0) {
            lo = r;
            found = true;
            break;
        }
        prev_r = r;
        prev_g = gr;
    }
    (void)prev_g;
    if (!found) throw std::runtime_error("no classical turning point found");
    double a = lo, c = prev_r;
    for (int i = 0; i < 200; ++i) {
        const double m = 0.5 * (a + c);
        (g(m) <= 0.0 ? a : c) = m;
    }
    const double r_min = 0.5 * (a + c);

    // interior part over [r_min, R] with w = sqrt(r - r_min)
    const double wmax = std::sqrt(std::max(0.0, R - r_min));
    auto integrand = [&](double w) {
        const double r = r_min + w * w;
        double gr = g(r);
        if (gr <= 0.0) gr = 0.0;
        const double denom = w > 1e-12 ? std::sqrt(gr) / w : std::sqrt(std::max(
            1e-300, -V.radial_derivative(r_min) + 2.0 * b * b / (r_min * r_min * r_min)));
        return 2.0 * (b / (r * r)) / denom;
    };
    double phi = wmax > 0.0 ? integrate(integrand, 0.0, wmax, tol) : 0.0;
    // free part beyond R: arccos(b/r) antiderivative
    phi += std::acos(std::min(1.0, b / R));
    return M_PI - 2.0 * phi;
}

} // namespace oracles
