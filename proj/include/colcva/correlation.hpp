#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "colcva/g2pp.hpp"
#include "colcva/math.hpp"
#include "colcva/rng.hpp"

namespace colcva {

// Correlation structure of the four Brownian drivers (Z1, Z2, Z3_I, Z3_C)
// plus the Gaussian-copula parameter for the default triggers. The rate
// drivers load on each intensity with a single common coefficient
// (rho_{1i} = rho_{2i} = rho_bar_i); the two intensities are independent.
struct CorrelationParams {
    double rho12 = 0.0;
    double rho_bar_i = 0.0;
    double rho_bar_c = 0.0;
    double rho_g = 0.0;

    std::vector<double> matrix() const {
        return {1.0,       rho12,     rho_bar_i, rho_bar_c,
                rho12,     1.0,       rho_bar_i, rho_bar_c,
                rho_bar_i, rho_bar_i, 1.0,       0.0,
                rho_bar_c, rho_bar_c, 0.0,       1.0};
    }

    void validate() const {
        for (double r : {rho12, rho_bar_i, rho_bar_c}) {
            if (r < -1.0 || r > 1.0) {
                throw std::invalid_argument("correlation outside [-1,1]");
            }
        }
        if (rho_g <= -1.0 || rho_g >= 1.0) {
            throw std::invalid_argument("rho_g outside (-1,1)");
        }
        cholesky_psd(matrix(), 4); // throws NotPositiveSemiDefinite
    }
};

// Effective instantaneous rate/credit-spread correlation implied by a common
// driver loading, and its inverse.
inline double effective_rate_spread_corr(const G2ppParams& g, double rho_1i) {
    double den2 = g.sigma * g.sigma + g.eta * g.eta +
                  2.0 * g.sigma * g.eta * g.rho12;
    if (den2 <= 0.0) {
        throw std::invalid_argument("effective correlation: sigma = eta = 0");
    }
    return rho_1i * (g.sigma + g.eta) / std::sqrt(den2);
}

inline double driver_loading_for_target(const G2ppParams& g, double rho_bar_target) {
    double den2 = g.sigma * g.sigma + g.eta * g.eta +
                  2.0 * g.sigma * g.eta * g.rho12;
    if (den2 <= 0.0) {
        throw std::invalid_argument("effective correlation: sigma = eta = 0");
    }
    return rho_bar_target * std::sqrt(den2) / (g.sigma + g.eta);
}

// Correlated Brownian increments on a grid, one 4-vector per step, plus an
// independent residual normal per step for the rate-integral sampling.
// Everything is keyed by (seed, path_id, step), so streams are identical at
// any worker count.
class ShockGenerator {
public:
    ShockGenerator(const CorrelationParams& corr, std::span<const double> grid)
        : grid_(grid.begin(), grid.end()), chol_(cholesky_psd(corr.matrix(), 4)) {}

    struct PathShocks {
        std::vector<double> dz1, dz2, dz3i, dz3c; // increments, variance dt
        std::vector<double> resid;                // iid standard normals
    };

    PathShocks generate(std::uint64_t seed, std::uint64_t path_id) const {
        CounterRng rng(seed, path_id);
        std::size_t n = grid_.size() - 1;
        PathShocks s;
        s.dz1.resize(n);
        s.dz2.resize(n);
        s.dz3i.resize(n);
        s.dz3c.resize(n);
        s.resid.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            double sq = std::sqrt(grid_[k + 1] - grid_[k]);
            double u[4];
            for (std::uint32_t d = 0; d < 4; ++d) {
                u[d] = rng.normal(Stream::shocks, k, d);
            }
            s.dz1[k] = sq * chol_[0] * u[0];
            s.dz2[k] = sq * (chol_[4] * u[0] + chol_[5] * u[1]);
            s.dz3i[k] = sq * (chol_[8] * u[0] + chol_[9] * u[1] + chol_[10] * u[2]);
            s.dz3c[k] = sq * (chol_[12] * u[0] + chol_[13] * u[1] + chol_[14] * u[2] +
                              chol_[15] * u[3]);
            s.resid[k] = rng.normal(Stream::rate_integral, k, 0);
        }
        return s;
    }

private:
    std::vector<double> grid_;
    std::vector<double> chol_;
};

}  // namespace colcva
