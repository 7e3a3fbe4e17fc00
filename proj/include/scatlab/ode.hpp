#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <type_traits>
#include <stdexcept>

namespace scatlab {

struct StepFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 1e-3;
    double h_max = 1.0;
};

// Dormand-Prince 5(4) embedded pair with PI step control.
// F: void(double t, const std::array<double,N>& y, std::array<double,N>& dy)
template <std::size_t N, typename F>
class DormandPrince {
  public:
    using Options = OdeOptions;

    DormandPrince(F f, Options opt) : f_(std::move(f)), opt_(opt) {}

    // Advance until stop(t, y) returns true at the end of an accepted step,
    // or t reaches t_end. Returns the final time.
    template <typename Stop>
    double run(double t, std::array<double, N>& y, double t_end, Stop&& stop) {
        std::array<double, N> k[7], ytmp, yerr, ynew;
        double h = std::min(opt_.h_init, t_end - t);
        f_(t, y, k[0]);
        double err_prev = 1.0;
        while (t < t_end) {
            h = std::min(h, t_end - t);
            if (!(h > std::abs(t) * 1e-14 + 1e-300))
                throw StepFailure("adaptive step size underflow");
            for (int s = 1; s < 7; ++s) {
                for (std::size_t i = 0; i < N; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < s; ++j) acc += A[s][j] * k[j][i];
                    ytmp[i] = y[i] + h * acc;
                }
                f_(t + C[s] * h, ytmp, k[s]);
            }
            double err = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                double acc5 = 0.0, acce = 0.0;
                for (int j = 0; j < 7; ++j) {
                    acc5 += B5[j] * k[j][i];
                    acce += (B5[j] - B4[j]) * k[j][i];
                }
                ynew[i] = y[i] + h * acc5;
                yerr[i] = h * acce;
                const double sc = opt_.atol + opt_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err += (yerr[i] / sc) * (yerr[i] / sc);
            }
            err = std::sqrt(err / N);
            if (err <= 1.0) {
                t += h;
                y = ynew;
                k[0] = k[6]; // FSAL
                if (stop(t, y)) return t;
                const double fac = 0.9 * std::pow(err + 1e-30, -0.7 / 5.0) *
                                   std::pow(err_prev, 0.4 / 5.0);
                h = std::min(opt_.h_max, h * std::clamp(fac, 0.2, 6.0));
                err_prev = std::max(err, 1e-4);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            }
        }
        return t;
    }

  private:
    F f_;
    Options opt_;

    static constexpr double C[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
    static constexpr double A[7][6] = {
        {},
        {1.0 / 5},
        {3.0 / 40, 9.0 / 40},
        {44.0 / 45, -56.0 / 15, 32.0 / 9},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
        {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static constexpr double B5[7] = {35.0 / 384,      0.0,  500.0 / 1113, 125.0 / 192,
                                     -2187.0 / 6784, 11.0 / 84, 0.0};
    static constexpr double B4[7] = {5179.0 / 57600,  0.0,   7571.0 / 16695, 393.0 / 640,
                                     -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};
};

template <std::size_t N, typename F, typename Stop>
double integrate_ode(F&& f, std::array<double, N>& y, double t0, double t_end,
                     OdeOptions opt, Stop&& stop) {
    DormandPrince<N, std::decay_t<F>> solver(std::forward<F>(f), opt);
    return solver.run(t0, y, t_end, std::forward<Stop>(stop));
}

} // namespace scatlab
