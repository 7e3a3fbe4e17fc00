#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace scatlab {

// Points and vectors in R^d, d in {2,3}, stored in a fixed 3-slot array.
// For d = 2 the z component is kept exactly zero.
using Vec = std::array<double, 3>;

inline Vec vec_zero() { return {0.0, 0.0, 0.0}; }

inline Vec operator+(const Vec& a, const Vec& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec operator-(const Vec& a, const Vec& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec operator*(double s, const Vec& a) {
    return {s * a[0], s * a[1], s * a[2]};
}
inline Vec operator-(const Vec& a) { return {-a[0], -a[1], -a[2]}; }

inline double dot(const Vec& a, const Vec& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec normalized(const Vec& a) {
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

inline Vec cross(const Vec& a, const Vec& b) {
    return {a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
}

// Orthonormal basis of the hyperplane perpendicular to the unit vector w.
// Returns d-1 vectors; deterministic in w.
inline int perp_basis(const Vec& w, int dim, Vec out[2]) {
    if (dim == 2) {
        out[0] = {-w[1], w[0], 0.0};
        return 1;
    }
    // pick the coordinate axis least aligned with w
    int k = 0;
    if (std::abs(w[1]) < std::abs(w[k])) k = 1;
    if (std::abs(w[2]) < std::abs(w[k])) k = 2;
    Vec e = vec_zero();
    e[k] = 1.0;
    out[0] = normalized(e - dot(e, w) * w);
    out[1] = cross(w, out[0]);
    return 2;
}

} // namespace scatlab
