#pragma once

namespace scatlab {

enum class BesselKind { cylindrical_j, neumann_y };

struct BesselJY {
    double j, y, jp, yp; // J_nu(x), Y_nu(x) and derivatives in x
};

/** J_nu, Y_nu and derivatives for real order nu >= 0, x > 0.
    Continued-fraction (Steed) evaluation with a small-argument series branch;
    relative accuracy ~1e-12 over nu <= 500, x <= 1e3 away from underflow.
    Throws std::range_error when Y overflows. J underflow returns 0. */
BesselJY bessel_jy(double nu, double x);

double bessel(BesselKind kind, double nu, double x);
double bessel_j(double nu, double x);
double bessel_y(double nu, double x);

/** Exponential envelope for J_nu(nu * gamma) with gamma = sech(alpha):
    bound = exp(-nu (alpha - tanh alpha)) / sqrt(2 pi nu tanh alpha). */
struct BesselEnvelope {
    double nu;
    double gamma;
    double alpha;
    double bound;

    BesselEnvelope(double nu_, double gamma_);
};

// Free radial reference pair with unit Wronskian, S C' - S' C = -1:
//   S(x) = sqrt(pi x / 2) J_nu(x)  ~  sin(x - nu pi/2 + pi/4)
//   C(x) = -sqrt(pi x / 2) Y_nu(x) ~  cos(x - nu pi/2 + pi/4)
struct RiccatiPair {
    double s, c, sp, cp;
};

RiccatiPair riccati_bessel(double nu, double x);

} // namespace scatlab
