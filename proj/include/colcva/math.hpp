#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace colcva {

// (1 - e^{-c t}) / c, stable as c -> 0.
inline double b_factor(double c, double t) {
    double x = c * t;
    if (std::fabs(x) < 1e-6) {
        return t * (1.0 - 0.5 * x + x * x / 6.0);
    }
    return -std::expm1(-x) / c;
}

struct GaussLegendre {
    std::vector<double> nodes;   // on [0,1]
    std::vector<double> weights;

    // n-point rule built by Newton iteration on Legendre polynomials.
    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        for (std::size_t i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t k = 2; k <= n; ++k) {
                    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                double dp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-15) break;
            }
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            nodes[i] = 0.5 * (1.0 + x);
            weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
        }
    }

    template <typename F>
    double integrate(F&& f, double a, double b) const {
        double s = 0.0;
        double h = b - a;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            s += weights[i] * f(a + h * nodes[i]);
        }
        return s * h;
    }
};

inline const GaussLegendre& quad24() {
    static const GaussLegendre gl(24);
    return gl;
}

// Standard normal CDF.
inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x * M_SQRT1_2);
}

// Inverse standard normal CDF: Acklam's rational approximation plus one
// Halley refinement, accurate to full double precision on (0,1).
inline double norm_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::domain_error("norm_inv: p outside (0,1)");
    }
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley step against erfc.
    double e = norm_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

class NotPositiveSemiDefinite : public std::runtime_error {
public:
    explicit NotPositiveSemiDefinite(const std::string& what)
        : std::runtime_error(what) {}
};

// Lower-triangular Cholesky factor of a small symmetric PSD matrix (row-major,
// n x n). Rank-deficient matrices are accepted: a pivot within tolerance of
// zero zeroes out the remaining column. A clearly negative pivot throws.
inline std::vector<double> cholesky_psd(const std::vector<double>& m, std::size_t n,
                                        double tol = 1e-10) {
    std::vector<double> l(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        double d = m[j * n + j];
        for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
        if (d < -tol) {
            throw NotPositiveSemiDefinite("correlation matrix not PSD");
        }
        double ljj = d > tol ? std::sqrt(d) : 0.0;
        l[j * n + j] = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = m[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            l[i * n + j] = ljj > 0.0 ? s / ljj : 0.0;
        }
    }
    return l;
}

// Kahan-compensated accumulator for order-stable reductions.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace colcva
