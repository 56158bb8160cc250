#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "colcva/curves.hpp"
#include "colcva/math.hpp"

namespace colcva {

// Two-factor additive Gaussian short-rate model, r(t) = x(t) + z(t) + phi(t),
// with the deterministic shift phi pinned by the input discount curve so the
// model reprices it exactly at time 0.
struct G2ppParams {
    double a = 0.1;      // mean reversion of x, 1/yr
    double b = 0.05;     // mean reversion of z, 1/yr
    double sigma = 0.01; // volatility of x, 1/yr
    double eta = 0.01;   // volatility of z, 1/yr
    double rho12 = 0.0;  // instantaneous correlation of the two drivers
    double r0 = 0.0;     // informational; phi(0) is implied by the curve

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("g2pp: a, b must be > 0");
        if (sigma < 0.0 || eta < 0.0) throw std::invalid_argument("g2pp: sigma, eta must be >= 0");
        if (rho12 < -1.0 || rho12 > 1.0) throw std::invalid_argument("g2pp: rho12 outside [-1,1]");
    }
};

struct G2ppState {
    double t = 0.0;
    double x = 0.0;
    double z = 0.0;
};

namespace detail {

// int_0^dt B_{c1}(u) B_{c2}(u) du, with B_c(u) = (1 - e^{-c u}) / c.
// Quadrature keeps this stable for arbitrarily small mean reversions.
inline double bb_integral(double c1, double c2, double dt) {
    return quad24().integrate(
        [&](double u) { return b_factor(c1, u) * b_factor(c2, u); }, 0.0, dt);
}

// int_0^dt e^{-c1 u} B_{c2}(u) du.
inline double eb_integral(double c1, double c2, double dt) {
    return quad24().integrate(
        [&](double u) { return std::exp(-c1 * u) * b_factor(c2, u); }, 0.0, dt);
}

}  // namespace detail

class G2ppModel {
public:
    G2ppModel(G2ppParams params, DiscountCurve curve)
        : p_(params), curve_(std::move(curve)) {
        p_.validate();
    }

    const G2ppParams& params() const { return p_; }
    const DiscountCurve& curve() const { return curve_; }

    // Variance of the integrated factor sum over [t, T] started from known
    // state at t.
    double variance(double t, double T) const {
        double dt = T - t;
        const auto& p = p_;
        return p.sigma * p.sigma * detail::bb_integral(p.a, p.a, dt) +
               p.eta * p.eta * detail::bb_integral(p.b, p.b, dt) +
               2.0 * p.rho12 * p.sigma * p.eta * detail::bb_integral(p.a, p.b, dt);
    }

    // Deterministic shift fitted to the curve.
    double phi(double t) const {
        double ba = b_factor(p_.a, t);
        double bb = b_factor(p_.b, t);
        return curve_.forward(t) + 0.5 * p_.sigma * p_.sigma * ba * ba +
               0.5 * p_.eta * p_.eta * bb * bb +
               p_.rho12 * p_.sigma * p_.eta * ba * bb;
    }

    // int_0^t phi(s) ds; follows from the time-0 repricing constraint.
    double int_phi(double t) const {
        return -curve_.log_discount(t) + 0.5 * variance(0.0, t);
    }

    // Zero-coupon bond price conditional on the factor state.
    double bond(const G2ppState& s, double T) const {
        if (T < s.t) throw std::invalid_argument("bond: T < t");
        double dt = T - s.t;
        double lp = curve_.log_discount(T) - curve_.log_discount(s.t) +
                    0.5 * (variance(s.t, T) - variance(0.0, T) + variance(0.0, s.t)) -
                    b_factor(p_.a, dt) * s.x - b_factor(p_.b, dt) * s.z;
        return std::exp(lp);
    }

private:
    G2ppParams p_;
    DiscountCurve curve_;
};

// Per-step transition coefficients on a fixed grid. x and z use their exact
// Ornstein-Uhlenbeck transitions; the integral of x + z over the step is
// sampled from its Gaussian law conditional on the drawn endpoints, so
// discount factors are unbiased on coarse grids.
class G2PathSimulator {
public:
    struct Step {
        double dt;
        double decay_x, decay_z; // e^{-a dt}, e^{-b dt}
        double sd_x, sd_z;       // exact one-step innovation std devs
        double mean_cx, mean_cz; // B_a(dt), B_b(dt): integral mean loadings
        double k1, k2;           // integral regression on the two innovations
        double resid_sd;         // integral residual std dev
    };

    struct Point {
        double x, z;
        double integral; // cumulative int_0^t (x + z) ds
    };

    G2PathSimulator(const G2ppModel& model, std::span<const double> grid)
        : model_(&model), grid_(grid.begin(), grid.end()) {
        if (grid_.size() < 2 || grid_[0] != 0.0) {
            throw std::invalid_argument("g2pp grid must start at 0 with >= 2 points");
        }
        const auto& p = model.params();
        steps_.reserve(grid_.size() - 1);
        for (std::size_t k = 0; k + 1 < grid_.size(); ++k) {
            double dt = grid_[k + 1] - grid_[k];
            if (dt <= 0.0) throw std::invalid_argument("g2pp grid must be strictly increasing");
            steps_.push_back(make_step(p, dt));
        }
        int_phi_.resize(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            int_phi_[k] = model.int_phi(grid_[k]);
        }
    }

    std::size_t num_steps() const { return steps_.size(); }
    const std::vector<double>& grid() const { return grid_; }
    const Step& step(std::size_t k) const { return steps_[k]; }
    double int_phi(std::size_t k) const { return int_phi_[k]; }

    // dz1, dz2 are Brownian increments (covariance dt per step); resid is an
    // independent standard normal per step for the integral residual.
    std::vector<Point> simulate(std::span<const double> dz1, std::span<const double> dz2,
                                std::span<const double> resid) const {
        if (dz1.size() != steps_.size() || dz2.size() != steps_.size() ||
            resid.size() != steps_.size()) {
            throw std::invalid_argument("g2pp shocks do not match grid");
        }
        std::vector<Point> out(grid_.size());
        out[0] = {0.0, 0.0, 0.0};
        for (std::size_t k = 0; k < steps_.size(); ++k) {
            const Step& s = steps_[k];
            double sq = std::sqrt(s.dt);
            double ix = s.sd_x * (dz1[k] / sq); // exact-transition innovations
            double iz = s.sd_z * (dz2[k] / sq);
            const Point& prev = out[k];
            double x1 = prev.x * s.decay_x + ix;
            double z1 = prev.z * s.decay_z + iz;
            double di = prev.x * s.mean_cx + prev.z * s.mean_cz + s.k1 * ix +
                        s.k2 * iz + s.resid_sd * resid[k];
            out[k + 1] = {x1, z1, prev.integral + di};
        }
        return out;
    }

    // Pathwise discount factor D(0, t_k) = exp(-int_0^{t_k} r).
    double discount(const std::vector<Point>& path, std::size_t k) const {
        return std::exp(-(path[k].integral + int_phi_[k]));
    }

private:
    static Step make_step(const G2ppParams& p, double dt) {
        Step s{};
        s.dt = dt;
        s.decay_x = std::exp(-p.a * dt);
        s.decay_z = std::exp(-p.b * dt);
        double g2a = b_factor(2.0 * p.a, dt); // (1-e^{-2a dt})/(2a)
        double g2b = b_factor(2.0 * p.b, dt);
        double vx = p.sigma * p.sigma * g2a;
        double vz = p.eta * p.eta * g2b;
        s.sd_x = std::sqrt(vx);
        s.sd_z = std::sqrt(vz);
        s.mean_cx = b_factor(p.a, dt);
        s.mean_cz = b_factor(p.b, dt);

        // Covariances of the integral innovation with the endpoint
        // innovations, from the continuous-time law.
        double cxi = p.sigma * p.sigma * detail::eb_integral(p.a, p.a, dt) +
                     p.rho12 * p.sigma * p.eta * detail::eb_integral(p.a, p.b, dt);
        double czi = p.eta * p.eta * detail::eb_integral(p.b, p.b, dt) +
                     p.rho12 * p.sigma * p.eta * detail::eb_integral(p.b, p.a, dt);
        double vi = p.sigma * p.sigma * detail::bb_integral(p.a, p.a, dt) +
                    p.eta * p.eta * detail::bb_integral(p.b, p.b, dt) +
                    2.0 * p.rho12 * p.sigma * p.eta * detail::bb_integral(p.a, p.b, dt);

        // Regress the integral on the two drawn innovations. The simulated
        // (ix, iz) cross-covariance is rho12 * sd_x * sd_z.
        double cxz = p.rho12 * s.sd_x * s.sd_z;
        double det = vx * vz - cxz * cxz;
        double explained;
        if (vx > 0.0 && vz > 0.0 && det > 1e-14 * vx * vz) {
            s.k1 = (vz * cxi - cxz * czi) / det;
            s.k2 = (vx * czi - cxz * cxi) / det;
            explained = s.k1 * cxi + s.k2 * czi;
        } else if (vx > 0.0) {
            s.k1 = cxi / vx;
            s.k2 = 0.0;
            explained = s.k1 * cxi;
        } else if (vz > 0.0) {
            s.k1 = 0.0;
            s.k2 = czi / vz;
            explained = s.k2 * czi;
        } else {
            s.k1 = s.k2 = 0.0;
            explained = 0.0;
        }
        double r2 = vi - explained;
        s.resid_sd = r2 > 0.0 ? std::sqrt(r2) : 0.0;
        return s;
    }

    const G2ppModel* model_;
    std::vector<double> grid_;
    std::vector<Step> steps_;
    std::vector<double> int_phi_;
};

}  // namespace colcva
