// Independent reference implementations used only by the tests. These are
// deliberately written with different algorithms than the library (Simpson
// instead of Gauss-Legendre, Riccati ODE instead of the closed-form CIR bond,
// textbook closed forms instead of quadrature) so agreement is meaningful.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b,
                      std::size_t n = 400) {
    if (n % 2 != 0) ++n;
    double h = (b - a) / static_cast<double>(n);
    double s = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) {
        s += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// P(X <= a, Y <= b) for standard bivariate normals with correlation rho,
// via Phi2(a,b,rho) = Phi(a)Phi(b) + int_0^rho phi2(a,b,r) dr.
inline double binorm_cdf(double a, double b, double rho) {
    auto dens = [&](double r) {
        double q = 1.0 - r * r;
        return std::exp(-(a * a - 2.0 * r * a * b + b * b) / (2.0 * q)) /
               (2.0 * M_PI * std::sqrt(q));
    };
    return norm_cdf(a) * norm_cdf(b) + simpson(dens, 0.0, rho, 800);
}

// Textbook closed form for the variance of int_t^T (x + z) du in a two-factor
// Gaussian model started from known state at t.
inline double g2_variance(double av, double bv, double sigma, double eta, double rho,
                          double t, double T) {
    double d = T - t;
    double ea = std::exp(-av * d), eb = std::exp(-bv * d);
    double v1 = sigma * sigma / (av * av) *
                (d + 2.0 / av * ea - 1.0 / (2.0 * av) * ea * ea - 3.0 / (2.0 * av));
    double v2 = eta * eta / (bv * bv) *
                (d + 2.0 / bv * eb - 1.0 / (2.0 * bv) * eb * eb - 3.0 / (2.0 * bv));
    double v3 = 2.0 * rho * sigma * eta / (av * bv) *
                (d + (ea - 1.0) / av + (eb - 1.0) / bv -
                 (ea * eb - 1.0) / (av + bv));
    return v1 + v2 + v3;
}

// E[exp(-int_0^t y)] for CIR dynamics, by integrating the Riccati system
// B' = 1 - kappa B - nu^2 B^2 / 2, (ln A)' = -kappa mu B with RK4.
inline double cir_survival(double kappa, double mu, double nu, double y0, double t,
                           std::size_t steps = 20000) {
    double bb = 0.0, ln_a = 0.0;
    double h = t / static_cast<double>(steps);
    auto fb = [&](double B) { return 1.0 - kappa * B - 0.5 * nu * nu * B * B; };
    for (std::size_t i = 0; i < steps; ++i) {
        double k1 = fb(bb);
        double k2 = fb(bb + 0.5 * h * k1);
        double k3 = fb(bb + 0.5 * h * k2);
        double k4 = fb(bb + h * k3);
        double b_mid = bb + 0.5 * h * k1; // for the ln A trapezoid-ish update
        double b_next = bb + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ln_a -= kappa * mu * h / 6.0 * (bb + 4.0 * b_mid + b_next);
        bb = b_next;
    }
    return std::exp(ln_a - bb * y0);
}

}  // namespace oracle
