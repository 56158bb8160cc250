#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include "colcva/math.hpp"
#include "colcva/rng.hpp"

namespace colcva {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct DefaultDraw {
    double u_i = 0.0, u_c = 0.0;   // copula uniforms
    double xi_i = 0.0, xi_c = 0.0; // exponential triggers, -ln u
    double tau_i = kNever, tau_c = kNever;
    double tau = kNever;
    bool counterparty_first = false; // tie at tau_i == tau_c resolves to C
};

// First time the cumulative intensity crosses the trigger, with linear
// interpolation between grid points; +inf when never crossed by the horizon.
inline double crossing_time(std::span<const double> grid,
                            std::span<const double> big_lambda, double xi) {
    if (big_lambda.size() != grid.size()) {
        throw std::invalid_argument("crossing_time: size mismatch");
    }
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (big_lambda[k] >= xi) {
            double l0 = big_lambda[k - 1], l1 = big_lambda[k];
            if (l1 <= l0) return grid[k];
            double w = (xi - l0) / (l1 - l0);
            return grid[k - 1] + w * (grid[k] - grid[k - 1]);
        }
    }
    return kNever;
}

// Gaussian pair for the copula: z_c first, z_i correlated with rho_g,
// matching the (z^C, z^I) ~ N2(rho_G) sampling convention. One pair per path,
// drawn from a stream independent of the Brownian shocks.
inline DefaultDraw sample_default_times(const CounterRng& rng, double rho_g,
                                        std::span<const double> grid,
                                        std::span<const double> big_lambda_i,
                                        std::span<const double> big_lambda_c,
                                        Stream stream = Stream::copula) {
    double w1 = rng.normal(stream, 0, 0);
    double w2 = rng.normal(stream, 0, 1);
    double z_c = w1;
    double z_i = rho_g * w1 + std::sqrt(1.0 - rho_g * rho_g) * w2;

    DefaultDraw d;
    d.u_c = norm_cdf(z_c);
    d.u_i = norm_cdf(z_i);
    d.xi_c = -std::log(d.u_c);
    d.xi_i = -std::log(d.u_i);
    d.tau_c = crossing_time(grid, big_lambda_c, d.xi_c);
    d.tau_i = crossing_time(grid, big_lambda_i, d.xi_i);
    d.tau = std::min(d.tau_i, d.tau_c);
    d.counterparty_first = d.tau_c <= d.tau_i; // documented tie-break
    return d;
}

}  // namespace colcva
