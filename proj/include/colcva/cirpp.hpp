#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "colcva/curves.hpp"

namespace colcva {

// CIR++ stochastic default intensity: lambda(t) = y(t) + psi(t) with y a
// square-root diffusion and psi fitted so the model survival curve matches
// the market hazard curve.
struct CirppParams {
    double kappa = 0.4; // mean reversion, 1/yr
    double mu = 0.02;   // long-run mean, 1/yr
    double nu = 0.1;    // volatility of intensity
    double y0 = 0.02;   // initial level

    void validate() const {
        if (!(kappa > 0.0) || !(mu > 0.0)) {
            throw std::invalid_argument("cirpp: kappa, mu must be > 0");
        }
        if (nu < 0.0 || y0 < 0.0) {
            throw std::invalid_argument("cirpp: nu, y0 must be >= 0");
        }
    }

    bool feller() const { return 2.0 * kappa * mu > nu * nu; }
};

// Analytic survival machinery for the y-component plus the fitted shift.
class CirppModel {
public:
    CirppModel(CirppParams params, HazardCurve hazard)
        : p_(params), hazard_(std::move(hazard)) {
        p_.validate();
    }

    const CirppParams& params() const { return p_; }
    const HazardCurve& hazard() const { return hazard_; }

    // E[exp(-int_0^t y)] from the CIR bond formula; deterministic limit when
    // nu is (numerically) zero.
    double cir_survival(double t) const {
        if (t <= 0.0) return 1.0;
        const auto& p = p_;
        if (p.nu < 1e-8) {
            double bint = (1.0 - std::exp(-p.kappa * t)) / p.kappa;
            return std::exp(-(p.mu * (t - bint) + p.y0 * bint));
        }
        double h = std::sqrt(p.kappa * p.kappa + 2.0 * p.nu * p.nu);
        double e = std::expm1(t * h); // e^{th} - 1
        double den = 2.0 * h + (p.kappa + h) * e;
        double bt = 2.0 * e / den;
        double lna = (2.0 * p.kappa * p.mu / (p.nu * p.nu)) *
                     (std::log(2.0 * h) + 0.5 * (p.kappa + h) * t - std::log(den));
        return std::exp(lna - bt * p.y0);
    }

    // Hazard rate implied by the y-component, -d/dt ln cir_survival(t).
    double cir_hazard(double t) const {
        const auto& p = p_;
        if (p.nu < 1e-8) {
            return p.mu + (p.y0 - p.mu) * std::exp(-p.kappa * t);
        }
        double h = std::sqrt(p.kappa * p.kappa + 2.0 * p.nu * p.nu);
        double et = std::exp(t * h);
        double den = 2.0 * h + (p.kappa + h) * (et - 1.0);
        double bprime = 4.0 * h * h * et / (den * den);
        double dlna = (2.0 * p.kappa * p.mu / (p.nu * p.nu)) * (p.kappa + h) *
                      (0.5 - h * et / den);
        return p.y0 * bprime - dlna;
    }

    // Fitted shift: exp(-int_0^t psi) = S_market(t) / S_cir(t).
    double psi(double t) const { return hazard_.rate(t) - cir_hazard(t); }

    double int_psi(double t) const {
        return hazard_.cumulative(t) + std::log(cir_survival(t));
    }

    // Model survival including the shift; equals the market curve by
    // construction.
    double survival(double t) const { return hazard_.survival(t); }

    // Most negative shift over [0, horizon]; diagnostic for clipping risk.
    double min_psi(double horizon, std::size_t scan = 200) const {
        double m = psi(0.0);
        for (std::size_t i = 1; i <= scan; ++i) {
            m = std::min(m, psi(horizon * static_cast<double>(i) / scan));
        }
        return m;
    }

private:
    CirppParams p_;
    HazardCurve hazard_;
};

struct IntensityPath {
    std::vector<double> y;      // raw CIR state
    std::vector<double> lambda; // max(y,0) + psi, clipped at 0
    std::vector<double> big_lambda; // cumulative intensity, trapezoid
    std::size_t clip_count = 0; // grid points where the clip at 0 was active
};

// Full-truncation Euler simulation on a fixed grid, so the driving shocks
// can be correlated with the rate factors step by step.
class CirPathSimulator {
public:
    CirPathSimulator(const CirppModel& model, std::span<const double> grid)
        : model_(&model), grid_(grid.begin(), grid.end()) {
        if (grid_.size() < 2 || grid_[0] != 0.0) {
            throw std::invalid_argument("cir grid must start at 0 with >= 2 points");
        }
        psi_.resize(grid_.size());
        for (std::size_t k = 0; k < grid_.size(); ++k) psi_[k] = model.psi(grid_[k]);
    }

    std::size_t num_steps() const { return grid_.size() - 1; }

    // dz3: Brownian increments (variance dt per step).
    IntensityPath simulate(std::span<const double> dz3) const {
        if (dz3.size() != num_steps()) {
            throw std::invalid_argument("cir shocks do not match grid");
        }
        const auto& p = model_->params();
        IntensityPath path;
        path.y.resize(grid_.size());
        path.lambda.resize(grid_.size());
        path.big_lambda.resize(grid_.size());
        path.y[0] = p.y0;
        path.big_lambda[0] = 0.0;
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            if (k > 0) {
                double dt = grid_[k] - grid_[k - 1];
                double yp = std::max(path.y[k - 1], 0.0);
                path.y[k] = path.y[k - 1] + p.kappa * (p.mu - yp) * dt +
                            p.nu * std::sqrt(yp) * dz3[k - 1];
            }
            double lam = std::max(path.y[k], 0.0) + psi_[k];
            if (lam < 0.0) {
                lam = 0.0;
                ++path.clip_count;
            }
            path.lambda[k] = lam;
            if (k > 0) {
                double dt = grid_[k] - grid_[k - 1];
                path.big_lambda[k] = path.big_lambda[k - 1] +
                                     0.5 * dt * (path.lambda[k - 1] + path.lambda[k]);
            }
        }
        return path;
    }

private:
    const CirppModel* model_;
    std::vector<double> grid_;
    std::vector<double> psi_;
};

}  // namespace colcva
