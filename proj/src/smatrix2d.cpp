#include "scatlab/smatrix2d.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "scatlab/bessel.hpp"
#include <nlohmann/json.hpp>

namespace scatlab {

namespace {

// Fourier transform of the truncated outgoing 2-D Green function
//   G_L(x) = (i/4) H0(k|x|) restricted to |x| < L,
// via the cylinder cross-product formula; the s -> k limit is removable.
cplx green_hat_truncated(double s, double k, double L) {
    const auto JY0 = [](double x) { return bessel_jy(0.0, x); };
    const auto JY1 = [](double x) { return bessel_jy(1.0, x); };
    const double kL = k * L;
    const BesselJY b0k = JY0(kL), b1k = JY1(kL);
    const cplx h0k(b0k.j, b0k.y), h1k(b1k.j, b1k.y);
    auto numerator = [&](double ss) -> cplx {
        if (ss == 0.0) return cplx(1.0) - cplx(0.0, 0.5 * M_PI * L) * k * h1k;
        const double sL = ss * L;
        const BesselJY b0 = JY0(sL), b1 = JY1(sL);
        return cplx(1.0) + cplx(0.0, 0.5 * M_PI * L) *
                               (ss * b1.j * h0k - k * b0.j * h1k);
    };
    if (std::abs(s - k) > 1e-3 * std::max(1.0, k))
        return numerator(s) / ((s - k) * (s + k));
    // divided difference (N(s) - N(k)) / (s - k) by the midpoint derivative
    const double m = 0.5 * (s + k);
    const double mL = m * L;
    const BesselJY b0 = JY0(mL), b1 = JY1(mL);
    const cplx nprime = cplx(0.0, 0.5 * M_PI * L) *
                        (m * L * b0.j * h0k + k * L * b1.j * h1k);
    return nprime / (s + k);
}

struct ConvWeights {
    int m = 0; // padded lattice size
    std::vector<cplx> w; // w[(dx mod m) * m + (dy mod m)]
    const cplx& at(int dx, int dy) const {
        const int a = dx >= 0 ? dx : dx + m;
        const int b = dy >= 0 ? dy : dy + m;
        return w[static_cast<std::size_t>(a) * m + b];
    }
};

// Quadrature weights W with (G * sigma)(x_i) ~= sum_j W(x_i - x_j) sigma_j:
// inverse lattice transform of green_hat sampled at the padded-box modes.
ConvWeights make_weights(double k, double spacing, int n_side, double trunc_radius) {
    const int need = n_side + static_cast<int>(std::ceil(trunc_radius / spacing)) + 2;
    int m = 1;
    while (m < need) m *= 2;

    std::vector<cplx> ghat(static_cast<std::size_t>(m) * m);
    const double ds = 2.0 * M_PI / (m * spacing);
    std::vector<double> freq(m);
    for (int p = 0; p < m; ++p) freq[p] = ds * (p <= m / 2 ? p : p - m);
    for (int p = 0; p < m; ++p)
        for (int q = 0; q < m; ++q) {
            const double s = std::hypot(freq[p], freq[q]);
            ghat[static_cast<std::size_t>(p) * m + q] =
                green_hat_truncated(s, k, trunc_radius);
        }

    // two-pass inverse DFT with 1/m^2 normalization
    std::vector<cplx> twiddle(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a)
        for (int p = 0; p < m; ++p)
            twiddle[static_cast<std::size_t>(a) * m + p] =
                std::polar(1.0, 2.0 * M_PI * a * p / m);

    std::vector<cplx> half(static_cast<std::size_t>(m) * m);
    for (int a = 0; a < m; ++a)
        for (int q = 0; q < m; ++q) {
            cplx acc = 0.0;
            const cplx* tw = &twiddle[static_cast<std::size_t>(a) * m];
            for (int p = 0; p < m; ++p)
                acc += tw[p] * ghat[static_cast<std::size_t>(p) * m + q];
            half[static_cast<std::size_t>(a) * m + q] = acc;
        }
    ConvWeights cw;
    cw.m = m;
    cw.w.resize(static_cast<std::size_t>(m) * m);
    const double norm = 1.0 / (static_cast<double>(m) * m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
            cplx acc = 0.0;
            const cplx* tw = &twiddle[static_cast<std::size_t>(b) * m];
            for (int q = 0; q < m; ++q)
                acc += tw[q] * half[static_cast<std::size_t>(a) * m + q];
            cw.w[static_cast<std::size_t>(a) * m + b] = norm * acc;
        }
    return cw;
}

struct DenseProblem {
    InteriorGrid grid;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    Eigen::MatrixXcd a;
};

DenseProblem assemble(const Potential& V, double h, const Grid2DOptions& opts) {
    if (V.dimension() != 2)
        throw std::invalid_argument("dense S-matrix route requires d = 2");
    if (!(h >= 0.2))
        throw std::invalid_argument("dense route requires h >= 0.2 (resolution)");
    DenseProblem prob;
    prob.grid = make_interior_grid(V, h, opts);
    const auto& g = prob.grid;
    const int n = static_cast<int>(g.xs.size());
    const double k = 1.0 / h;
    const double trunc = 2.0 * V.support_radius() + 2.0 * g.spacing;
    const ConvWeights cw = make_weights(k, g.spacing, g.n_side, trunc);

    prob.a.resize(n, n);
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const cplx wij = cw.at(g.ix[i] - g.ix[j], g.iy[i] - g.iy[j]);
            prob.a(i, j) = inv_h2 * wij * g.vvals[j] + (i == j ? 1.0 : 0.0);
        }
    prob.lu.compute(prob.a);
    return prob;
}

Eigen::VectorXcd incident_column(const InteriorGrid& g, double k, double dirx, double diry) {
    const int n = static_cast<int>(g.xs.size());
    Eigen::VectorXcd b(n);
    for (int i = 0; i < n; ++i)
        b(i) = std::polar(1.0, k * (dirx * g.xs[i] + diry * g.ys[i]));
    return b;
}

// far-field amplitude f(obs) = c_f * sum_j exp(-i k obs . y_j) V_j u_j dA
cplx far_field_at(const InteriorGrid& g, const Eigen::VectorXcd& u, double k,
                  double h, double ox, double oy) {
    const cplx cf = -cplx(0.0, 0.25) / (h * h) * std::sqrt(2.0 / (M_PI * k)) *
                    std::polar(1.0, -0.25 * M_PI);
    cplx acc = 0.0;
    const int n = static_cast<int>(g.xs.size());
    for (int j = 0; j < n; ++j)
        acc += std::polar(1.0, -k * (ox * g.xs[j] + oy * g.ys[j])) * g.vvals[j] * u(j);
    return cf * acc * g.spacing * g.spacing;
}

} // namespace

InteriorGrid make_interior_grid(const Potential& V, double h, const Grid2DOptions& opts) {
    InteriorGrid g;
    const double R = V.support_radius();
    if (R <= 0.0) {
        g.spacing = 2.0 * M_PI * h / std::max(10.0, opts.points_per_wavelength);
        return g;
    }
    double target = std::min(2.0 * M_PI * h / opts.points_per_wavelength,
                             [&] {
                                 double rmin = R;
                                 for (const auto& b : V.spec().bumps)
                                     rmin = std::min(rmin, b.radius);
                                 return rmin / opts.points_per_radius;
                             }());
    if (opts.spacing_override > 0.0) target = opts.spacing_override;
    if (target > 2.0 * M_PI * h / 10.0)
        throw std::invalid_argument("grid under-resolved: need >= 10 points per wavelength");

    const int n_side = static_cast<int>(std::ceil(2.0 * R / target));
    g.n_side = n_side;
    g.spacing = 2.0 * R / n_side;
    g.extent = R;
    for (int i = 0; i < n_side; ++i)
        for (int j = 0; j < n_side; ++j) {
            const double x = -R + (i + 0.5) * g.spacing;
            const double y = -R + (j + 0.5) * g.spacing;
            const double v = V.value({x, y, 0.0});
            if (v != 0.0) {
                g.ix.push_back(i);
                g.iy.push_back(j);
                g.xs.push_back(x);
                g.ys.push_back(y);
                g.vvals.push_back(v);
            }
        }
    return g;
}

ScatteredField solve_scattered_field(const Potential& V, double h, double theta_in,
                                     const Grid2DOptions& opts, int n_far) {
    ScatteredField out;
    out.far.assign(n_far, cplx(0.0));
    if (V.is_zero()) {
        out.residual = 0.0;
        return out;
    }
    DenseProblem prob = assemble(V, h, opts);
    const double k = 1.0 / h;
    const Eigen::VectorXcd b =
        incident_column(prob.grid, k, std::cos(theta_in), std::sin(theta_in));
    const Eigen::VectorXcd u = prob.lu.solve(b);
    out.residual = (prob.a * u - b).lpNorm<Eigen::Infinity>() / b.lpNorm<Eigen::Infinity>();
    out.u.assign(u.data(), u.data() + u.size());
    for (int j = 0; j < n_far; ++j) {
        const double th = 2.0 * M_PI * j / n_far;
        out.far[j] = far_field_at(prob.grid, u, k, h, std::cos(th), std::sin(th));
    }
    return out;
}

SMatrix2D build_smatrix(const Potential& V, double h, int n_ang,
                        const Grid2DOptions& opts) {
    if (n_ang < 8 || n_ang % 2 != 0)
        throw std::invalid_argument("n_ang must be even and >= 8");
    SMatrix2D sm;
    sm.h = h;
    sm.n_ang = n_ang;
    sm.s = Eigen::MatrixXcd::Identity(n_ang, n_ang);
    if (V.is_zero()) {
        sm.unitarity_defect = 0.0;
        return sm;
    }

    DenseProblem prob = assemble(V, h, opts);
    sm.grid_spacing = prob.grid.spacing;
    sm.interior_nodes = static_cast<int>(prob.grid.xs.size());
    const double k = 1.0 / h;

    // columns: incoming data concentrated at node theta_k <-> plane wave
    // travelling along -theta_k; rows: far field observed at -theta_j.
    Eigen::MatrixXcd rhs(sm.interior_nodes, n_ang);
    for (int c = 0; c < n_ang; ++c) {
        const double th = 2.0 * M_PI * c / n_ang;
        rhs.col(c) = incident_column(prob.grid, k, -std::cos(th), -std::sin(th));
    }
    const Eigen::MatrixXcd u_all = prob.lu.solve(rhs);

    const cplx gamma = std::polar(1.0, 0.25 * M_PI) * std::sqrt(k / (2.0 * M_PI));
    const double wq = 2.0 * M_PI / n_ang;
    for (int r = 0; r < n_ang; ++r) {
        const double tho = 2.0 * M_PI * r / n_ang + M_PI; // observe at -theta_r
        const double ox = std::cos(tho), oy = std::sin(tho);
        for (int c = 0; c < n_ang; ++c)
            sm.s(r, c) += gamma * wq * far_field_at(prob.grid, u_all.col(c), k, h, ox, oy);
    }

    const Eigen::MatrixXcd defect =
        sm.s.adjoint() * sm.s - Eigen::MatrixXcd::Identity(n_ang, n_ang);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(defect);
    sm.unitarity_defect = es.eigenvalues().cwiseAbs().maxCoeff();
    return sm;
}

EigenphaseSet eigenphases(const SMatrix2D& sm) {
    if (sm.unitarity_defect >= 1e-2)
        throw std::runtime_error("S-matrix rejected: unitarity defect above 1e-2");
    EigenphaseSet set;
    set.source = PhaseSource::dense_2d;
    set.h = sm.h;
    set.d = 2;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sm.s, false);
    const double band = 2.0 * std::max(sm.unitarity_defect, 1e-13);
    for (int i = 0; i < sm.n_ang; ++i) {
        const cplx lam = es.eigenvalues()(i);
        const double mag = std::abs(lam);
        if (mag < 1.0 - band || mag > 1.0 + band)
            throw std::runtime_error("eigenvalue off the unit circle: run under-resolved");
        set.phases.push_back({std::arg(lam), 1.0});
    }
    return set;
}

void write_smatrix_binary(const std::string& path_prefix, const SMatrix2D& sm) {
    nlohmann::json hdr;
    hdr["n_ang"] = sm.n_ang;
    hdr["h"] = sm.h;
    hdr["grid_spacing"] = sm.grid_spacing;
    hdr["interior_nodes"] = sm.interior_nodes;
    hdr["unitarity_defect"] = sm.unitarity_defect;
    hdr["layout"] = "row-major complex<double> little-endian";
    std::ofstream jf(path_prefix + ".json");
    jf << hdr.dump(2) << "\n";
    std::ofstream bf(path_prefix + ".bin", std::ios::binary);
    for (int r = 0; r < sm.n_ang; ++r)
        for (int c = 0; c < sm.n_ang; ++c) {
            const cplx z = sm.s(r, c);
            const double re = z.real(), im = z.imag();
            bf.write(reinterpret_cast<const char*>(&re), sizeof re);
            bf.write(reinterpret_cast<const char*>(&im), sizeof im);
        }
}

} // namespace scatlab
