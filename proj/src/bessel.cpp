#include "scatlab/bessel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace scatlab {

namespace {

constexpr double EPS = 1.0e-16;
constexpr double FPMIN = 1.0e-300;
constexpr double BIGNO = 1.0e250;
constexpr double XMIN_SERIES = 2.0;
constexpr int MAXIT = 40000;

// 1/Gamma(1+mu), 1/Gamma(1-mu) and the Temme combinations
//   gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu),  gam2 = their mean.
void gamma_terms(double mu, double& gam1, double& gam2, double& gampl, double& gammi) {
    gampl = 1.0 / std::tgamma(1.0 + mu);
    gammi = 1.0 / std::tgamma(1.0 - mu);
    if (std::abs(mu) < 1.0e-4) {
        // series of the odd part; constant = gamma_E^3/6 - gamma_E pi^2/12 + zeta(3)/3
        const double euler = 0.57721566490153286060651209008;
        const double c2 = -0.04200263503409523553; // mu^2 coefficient
        gam1 = -euler - c2 * mu * mu;
    } else {
        gam1 = (gammi - gampl) / (2.0 * mu);
    }
    gam2 = 0.5 * (gammi + gampl);
}

} // namespace

BesselJY bessel_jy(double nu, double x) {
    if (!(x > 0.0)) throw std::range_error("bessel_jy requires x > 0");
    if (!(nu >= 0.0)) throw std::range_error("bessel_jy requires nu >= 0");

    const int nl = x < XMIN_SERIES ? static_cast<int>(nu + 0.5)
                                   : std::max(0, static_cast<int>(nu - x + 1.5));
    const double xmu = nu - nl;
    const double xmu2 = xmu * xmu;
    const double xi = 1.0 / x;
    const double xi2 = 2.0 * xi;
    const double w = xi2 / M_PI; // Wronskian J Y' - J' Y

    // CF1 for J'/J at order nu
    int isign = 1;
    double h = nu * xi;
    if (h < FPMIN) h = FPMIN;
    double b = xi2 * nu, d = 0.0, c = h;
    int i;
    for (i = 1; i <= MAXIT; ++i) {
        b += xi2;
        d = b - d;
        if (std::abs(d) < FPMIN) d = FPMIN;
        c = b - 1.0 / c;
        if (std::abs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        const double del = c * d;
        h *= del;
        if (d < 0.0) isign = -isign;
        if (std::abs(del - 1.0) <= EPS) break;
    }
    if (i > MAXIT) throw std::range_error("bessel_jy CF1 failed to converge");

    // downward recurrence from nu to xmu with rescaling guard
    double rjl = isign * FPMIN;
    double rjpl = h * rjl;
    double rjl1 = rjl, rjp1 = rjpl;
    double fact = nu * xi;
    for (int l = nl; l >= 1; --l) {
        const double rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if (std::abs(rjl) > BIGNO) {
            rjl *= 1.0 / BIGNO;
            rjpl *= 1.0 / BIGNO;
            rjl1 *= 1.0 / BIGNO;
            rjp1 *= 1.0 / BIGNO;
        }
    }
    if (rjl == 0.0) rjl = EPS;
    const double f = rjpl / rjl; // J'/J at xmu

    double rjmu, rymu, ry1, rymup;
    if (x < XMIN_SERIES) {
        // Temme's series for Y_mu and Y_{mu+1}
        const double x2 = 0.5 * x;
        const double pimu = M_PI * xmu;
        double fct = std::abs(pimu) < EPS ? 1.0 : pimu / std::sin(pimu);
        double dd = -std::log(x2);
        double e = xmu * dd;
        const double fact2 = std::abs(e) < EPS ? 1.0 : std::sinh(e) / e;
        double gam1, gam2, gampl, gammi;
        gamma_terms(xmu, gam1, gam2, gampl, gammi);
        double ff = 2.0 / M_PI * fct * (gam1 * std::cosh(e) + gam2 * fact2 * dd);
        e = std::exp(e);
        double p = e / (gampl * M_PI);
        double q = 1.0 / (e * M_PI * gammi);
        const double pimu2 = 0.5 * pimu;
        const double fact3 = std::abs(pimu2) < EPS ? 1.0 : std::sin(pimu2) / pimu2;
        const double r = M_PI * pimu2 * fact3 * fact3;
        double cc = 1.0;
        dd = -x2 * x2;
        double sum = ff + r * q;
        double sum1 = p;
        for (i = 1; i <= MAXIT; ++i) {
            ff = (i * ff + p + q) / (i * i - xmu2);
            cc *= dd / i;
            p /= (i - xmu);
            q /= (i + xmu);
            const double del = cc * (ff + r * q);
            sum += del;
            const double del1 = cc * p - i * del;
            sum1 += del1;
            if (std::abs(del) < (1.0 + std::abs(sum)) * EPS) break;
        }
        if (i > MAXIT) throw std::range_error("bessel_jy Temme series failed");
        rymu = -sum;
        ry1 = -sum1 * xi2;
        rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2 for (J' + iY')/(J + iY) at order xmu
        double a = 0.25 - xmu2;
        double pr = -0.5 * xi, pi_ = 1.0;
        double br = 2.0 * x, bi = 2.0;
        double fct = a * xi / (pr * pr + pi_ * pi_);
        double cr = br + pi_ * fct, ci = bi + pr * fct;
        double den = br * br + bi * bi;
        double dr = br / den, di = -bi / den;
        double dlr = cr * dr - ci * di, dli = cr * di + ci * dr;
        double temp = pr * dlr - pi_ * dli;
        pi_ = pr * dli + pi_ * dlr;
        pr = temp;
        for (i = 2; i <= MAXIT; ++i) {
            a += 2 * (i - 1);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if (std::abs(dr) + std::abs(di) < FPMIN) dr = FPMIN;
            fct = a / (cr * cr + ci * ci);
            cr = br + cr * fct;
            ci = bi - ci * fct;
            if (std::abs(cr) + std::abs(ci) < FPMIN) cr = FPMIN;
            den = dr * dr + di * di;
            dr = dr / den;
            di = -di / den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = pr * dlr - pi_ * dli;
            pi_ = pr * dli + pi_ * dlr;
            pr = temp;
            if (std::abs(dlr - 1.0) + std::abs(dli) < EPS) break;
        }
        if (i > MAXIT) throw std::range_error("bessel_jy CF2 failed to converge");
        const double gam = (pr - f) / pi_;
        rjmu = std::sqrt(w / ((pr - f) * gam + pi_));
        rjmu = std::copysign(rjmu, rjl);
        rymu = rjmu * gam;
        rymup = rymu * (pr + pi_ / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    BesselJY out;
    const double scale = rjmu / rjl;
    out.j = rjl1 * scale;
    out.jp = rjp1 * scale;
    bool y_overflow = false;
    for (i = 1; i <= nl; ++i) {
        const double rytemp = (xmu + i) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
        if (!std::isfinite(ry1)) {
            y_overflow = true;
            break;
        }
    }
    if (y_overflow || !std::isfinite(rymu)) {
        // overflow regime (huge order at small argument): J side still valid
        out.y = std::numeric_limits<double>::infinity();
        out.yp = std::numeric_limits<double>::infinity();
        return out;
    }
    out.y = rymu;
    out.yp = nu * xi * rymu - ry1;
    return out;
}

double bessel(BesselKind kind, double nu, double x) {
    const BesselJY v = bessel_jy(nu, x);
    if (kind == BesselKind::cylindrical_j) return v.j;
    if (!std::isfinite(v.y))
        throw std::range_error("bessel: Y overflow for this (nu, x)");
    return v.y;
}

double bessel_j(double nu, double x) { return bessel(BesselKind::cylindrical_j, nu, x); }
double bessel_y(double nu, double x) { return bessel(BesselKind::neumann_y, nu, x); }

BesselEnvelope::BesselEnvelope(double nu_, double gamma_) : nu(nu_), gamma(gamma_) {
    if (!(nu >= 1.0)) throw std::invalid_argument("envelope requires nu >= 1");
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("envelope requires gamma in (0,1)");
    alpha = std::log((1.0 + std::sqrt(1.0 - gamma * gamma)) / gamma); // arcsech
    const double th = std::tanh(alpha);
    bound = std::exp(-nu * (alpha - th)) / std::sqrt(2.0 * M_PI * nu * th);
}

RiccatiPair riccati_bessel(double nu, double x) {
    const BesselJY v = bessel_jy(nu, x);
    if (!std::isfinite(v.y))
        throw std::range_error("riccati_bessel: irregular solution overflow");
    const double amp = std::sqrt(0.5 * M_PI * x);
    RiccatiPair out;
    out.s = amp * v.j;
    out.c = -amp * v.y;
    out.sp = amp * v.jp + 0.5 * out.s / x;
    out.cp = -amp * v.yp - 0.5 * amp * v.y / x;
    return out;
}

} // namespace scatlab
