#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "colcva/cirpp.hpp"
#include "colcva/collateral.hpp"
#include "colcva/correlation.hpp"
#include "colcva/curves.hpp"
#include "colcva/default_times.hpp"
#include "colcva/g2pp.hpp"
#include "colcva/pricer.hpp"
#include "colcva/rng.hpp"
#include "colcva/swap.hpp"

namespace colcva {

// Simulation grid: union of a regular base step, the swap payment dates and
// every margining-date family that will run on it (so sweep cells share one
// grid and one shock stream).
inline std::vector<double> build_grid(double maturity, double base_step,
                                      const SwapSpec& swap,
                                      std::span<const double> margin_intervals) {
    std::vector<double> times{0.0, maturity};
    for (int i = 1; i * base_step < maturity - 1e-9; ++i) times.push_back(i * base_step);
    for (double d : swap.fixed_dates()) times.push_back(d);
    for (double d : swap.float_dates()) times.push_back(d);
    for (double delta : margin_intervals) {
        if (delta <= 0.0) continue;
        for (int i = 1; i * delta < maturity - 1e-9; ++i) times.push_back(i * delta);
    }
    std::sort(times.begin(), times.end());
    std::vector<double> out;
    for (double t : times) {
        if (out.empty() || t - out.back() > 1e-9) out.push_back(t);
    }
    return out;
}

inline std::vector<std::uint8_t> margin_flags(std::span<const double> grid,
                                              const MarginingRule& rule,
                                              double maturity) {
    std::vector<std::uint8_t> flags(grid.size(), 0);
    for (double d : rule.margin_dates(maturity)) {
        auto it = std::lower_bound(grid.begin(), grid.end(), d - 1e-9);
        if (it == grid.end() || std::fabs(*it - d) > 1e-9) {
            throw std::invalid_argument("margin date not on simulation grid");
        }
        flags[static_cast<std::size_t>(it - grid.begin())] = 1;
    }
    return flags;
}

struct SimulationSettings {
    std::size_t paths = 10000;
    std::uint64_t seed = 42;
    unsigned workers = 0;            // 0: hardware concurrency
    std::size_t nested_paths = 200;  // inner budget for nested close-out
    bool with_profiles = false;
};

struct SimulationResult {
    std::vector<double> grid;
    std::vector<PathOutcome> outcomes;
    std::optional<ExposureProfiles> profiles;
    std::size_t clip_count = 0; // intensity clippings across all paths
};

// Owns the calibrated models and the per-grid machinery for one market
// scenario; immutable once built, so paths can run on any number of workers.
class ScenarioEngine {
public:
    ScenarioEngine(const DiscountCurve& discount, const HazardCurve& hazard_i,
                   const HazardCurve& hazard_c, const G2ppParams& g2,
                   const CirppParams& cir_i, const CirppParams& cir_c,
                   const CorrelationParams& corr, const SwapSpec& swap,
                   double base_step, std::span<const double> margin_intervals)
        : g2_model_(g2, discount),
          cir_i_(CirppParams(cir_i), HazardCurve(hazard_i)),
          cir_c_(CirppParams(cir_c), HazardCurve(hazard_c)),
          corr_(corr),
          grid_(build_grid(swap.maturity, base_step, swap, margin_intervals)),
          shock_gen_(corr, grid_),
          g2_sim_(g2_model_, grid_),
          cir_sim_i_(cir_i_, grid_),
          cir_sim_c_(cir_c_, grid_),
          swap_(swap, g2_model_, grid_),
          maturity_(swap.maturity) {
        corr_.validate();
    }

    const std::vector<double>& grid() const { return grid_; }
    const G2ppModel& g2_model() const { return g2_model_; }
    const CirppModel& cir_model_i() const { return cir_i_; }
    const CirppModel& cir_model_c() const { return cir_c_; }
    const SwapPricer& swap_pricer() const { return swap_; }

    double min_psi_i() const { return cir_i_.min_psi(maturity_); }
    double min_psi_c() const { return cir_c_.min_psi(maturity_); }

    SimulationResult run(const MarginingRule& rule, const RecoveryParams& recovery,
                         const SimulationSettings& s) const {
        rule.validate();
        recovery.validate();
        std::vector<std::uint8_t> flags = margin_flags(grid_, rule, maturity_);

        SimulationResult res;
        res.grid = grid_;
        res.outcomes.resize(s.paths);
        std::unique_ptr<ProfileAccumulator> prof;
        if (s.with_profiles) {
            prof = std::make_unique<ProfileAccumulator>(grid_, s.paths);
        }

        std::atomic<std::size_t> next_block{0};
        std::atomic<std::size_t> clips{0};
        const std::size_t block = 256;
        unsigned workers = s.workers == 0
                               ? std::max(1u, std::thread::hardware_concurrency())
                               : s.workers;

        auto worker = [&]() {
            for (;;) {
                std::size_t b = next_block.fetch_add(1);
                std::size_t lo = b * block;
                if (lo >= s.paths) break;
                std::size_t hi = std::min(lo + block, s.paths);
                std::size_t local_clips = 0;
                for (std::size_t p = lo; p < hi; ++p) {
                    res.outcomes[p] =
                        simulate_path(p, rule, recovery, flags, s, prof.get(), local_clips);
                }
                clips.fetch_add(local_clips);
            }
        };
        if (workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        res.clip_count = clips.load();
        if (prof) res.profiles = prof->finalize();
        return res;
    }

private:
    PathOutcome simulate_path(std::size_t path_id, const MarginingRule& rule,
                              const RecoveryParams& recovery,
                              const std::vector<std::uint8_t>& flags,
                              const SimulationSettings& s, ProfileAccumulator* prof,
                              std::size_t& clips) const {
        auto shocks = shock_gen_.generate(s.seed, path_id);
        auto pts = g2_sim_.simulate(shocks.dz1, shocks.dz2, shocks.resid);
        IntensityPath lam_i = cir_sim_i_.simulate(shocks.dz3i);
        IntensityPath lam_c = cir_sim_c_.simulate(shocks.dz3c);
        clips += lam_i.clip_count + lam_c.clip_count;

        std::size_t n = grid_.size();
        std::vector<double> eps(n), disc(n), fixings(n);
        swap_.exposure_path(pts, eps, fixings);
        for (std::size_t k = 0; k < n; ++k) disc[k] = g2_sim_.discount(pts, k);

        CounterRng rng(s.seed, path_id);
        DefaultDraw draw = sample_default_times(rng, corr_.rho_g, grid_,
                                                lam_i.big_lambda, lam_c.big_lambda);

        CollateralPath col = run_collateral(
            eps, disc, std::span<const std::uint8_t>(flags.data(), flags.size()),
            rule);
        if (prof) prof->add_path(path_id, eps, col.post);

        PathOutcome o;
        if (!(draw.tau < maturity_)) return o;
        std::size_t idx = snap_index(draw.tau);
        if (idx + 1 >= n) return o; // settles with the final cash flows
        o.flag = draw.counterparty_first ? DefaultFlag::counterparty
                                         : DefaultFlag::investor;
        o.tau = grid_[idx];
        o.disc = disc[idx];
        o.eps_tau = eps[idx];
        o.c_tau = collateral_at_default(col, eps, idx, rule);
        o.eps_i = o.eps_tau;
        o.eps_c = o.eps_tau;
        if (rule.closeout == Closeout::nested) {
            if (o.flag == DefaultFlag::counterparty) {
                o.eps_i = nested_exposure(path_id, idx, pts[idx], lam_i.y[idx],
                                          fixings[idx], true, rule, recovery, flags, s);
            } else {
                o.eps_c = nested_exposure(path_id, idx, pts[idx], lam_c.y[idx],
                                          fixings[idx], false, rule, recovery, flags, s);
            }
        }
        return o;
    }

    std::size_t snap_index(double tau) const {
        auto it = std::lower_bound(grid_.begin(), grid_.end(), tau - 1e-12);
        return static_cast<std::size_t>(it - grid_.begin());
    }

    // Survivor-risk-adjusted on-default exposure: the mid-market value minus
    // the survivor's own default-leg terms, estimated by an inner simulation
    // restarted from the outer state with fresh sub-streams and a fresh
    // collateral account.
    double nested_exposure(std::size_t path_id, std::size_t k0,
                           const G2PathSimulator::Point& start, double y_start,
                           double fixing0, bool survivor_is_investor,
                           const MarginingRule& rule, const RecoveryParams& recovery,
                           const std::vector<std::uint8_t>& flags,
                           const SimulationSettings& s) const {
        if (s.nested_paths == 0) {
            throw std::invalid_argument("nested close-out requires an inner path budget");
        }
        double lgd = survivor_is_investor ? recovery.lgd_i() : recovery.lgd_c();
        double lgd_p = survivor_is_investor ? recovery.lgd_i_prime() : recovery.lgd_c_prime();

        double rho_bar = survivor_is_investor ? corr_.rho_bar_i : corr_.rho_bar_c;
        std::vector<double> m{1.0,     corr_.rho12, rho_bar, corr_.rho12, 1.0,
                              rho_bar, rho_bar,     rho_bar, 1.0};
        std::vector<double> chol = cholesky_psd(m, 3);

        const CirppModel& cmod = survivor_is_investor ? cir_i_ : cir_c_;
        const CirppParams& cp = cmod.params();
        std::size_t n = grid_.size();
        CounterRng rng(s.seed, path_id);
        double eps_mid = swap_.value_at(k0, start, fixing0);

        KahanSum corr_sum;
        std::vector<G2PathSimulator::Point> pts(n);
        std::vector<double> eps(n, 0.0), disc(n, 0.0);
        for (std::size_t inner = 0; inner < s.nested_paths; ++inner) {
            // evolve rates, survivor intensity and exposure from k0
            pts[k0] = {start.x, start.z, 0.0};
            disc[k0] = 1.0; // discounting relative to the default time
            double y = y_start;
            double big_lambda = 0.0;
            double fixing = fixing0;
            eps[k0] = eps_mid;
            double xi = -std::log(rng.uniform(Stream::nested_copula, 0,
                                              static_cast<std::uint32_t>(inner)));
            double tau2 = kNever;
            double prev_lambda = std::max(std::max(y, 0.0) + cmod.psi(grid_[k0]), 0.0);
            for (std::size_t k = k0; k + 1 < n; ++k) {
                double dt = grid_[k + 1] - grid_[k];
                double sq = std::sqrt(dt);
                std::uint32_t base = static_cast<std::uint32_t>(inner) * 8;
                double u0 = rng.normal(Stream::nested, k, base + 0);
                double u1 = rng.normal(Stream::nested, k, base + 1);
                double u2 = rng.normal(Stream::nested, k, base + 2);
                double ur = rng.normal(Stream::nested, k, base + 3);
                double dz1 = sq * chol[0] * u0;
                double dz2 = sq * (chol[3] * u0 + chol[4] * u1);
                double dz3 = sq * (chol[6] * u0 + chol[7] * u1 + chol[8] * u2);

                const auto& st = g2_sim_.step(k);
                double ix = st.sd_x * (dz1 / sq);
                double iz = st.sd_z * (dz2 / sq);
                double di = pts[k].x * st.mean_cx + pts[k].z * st.mean_cz +
                            st.k1 * ix + st.k2 * iz + st.resid_sd * ur;
                pts[k + 1] = {pts[k].x * st.decay_x + ix, pts[k].z * st.decay_z + iz,
                              pts[k].integral + di};
                disc[k + 1] = std::exp(-(pts[k + 1].integral +
                                         (g2_sim_.int_phi(k + 1) - g2_sim_.int_phi(k0))));

                double yp = std::max(y, 0.0);
                y = y + cp.kappa * (cp.mu - yp) * dt + cp.nu * std::sqrt(yp) * dz3;
                double lam = std::max(std::max(y, 0.0) + cmod.psi(grid_[k + 1]), 0.0);
                double next_big = big_lambda + 0.5 * dt * (prev_lambda + lam);
                if (tau2 == kNever && next_big >= xi) {
                    double w = next_big > big_lambda
                                   ? (xi - big_lambda) / (next_big - big_lambda)
                                   : 1.0;
                    tau2 = grid_[k] + w * dt;
                }
                big_lambda = next_big;
                prev_lambda = lam;

                if (swap_is_reset(k + 1)) fixing = swap_fixing_at(k + 1, pts[k + 1]);
                eps[k + 1] = swap_.value_at(k + 1, pts[k + 1], fixing);
            }

            double contrib = 0.0;
            if (tau2 < maturity_) {
                std::size_t idx2 = snap_index(tau2);
                if (idx2 > k0 && idx2 + 1 < n) {
                    CollateralPath col = run_collateral_from(k0, eps, disc, flags, rule);
                    double c2 = collateral_at_default(col, eps, idx2, rule);
                    auto pos = [](double x) { return std::max(x, 0.0); };
                    auto neg = [](double x) { return std::min(x, 0.0); };
                    if (survivor_is_investor) {
                        contrib = disc[idx2] *
                                  (lgd * neg(neg(eps[idx2]) - neg(c2)) +
                                   lgd_p * neg(pos(eps[idx2]) - pos(c2)));
                    } else {
                        contrib = disc[idx2] *
                                  (lgd * pos(pos(eps[idx2]) - pos(c2)) +
                                   lgd_p * pos(neg(eps[idx2]) - neg(c2)));
                    }
                }
            }
            corr_sum.add(contrib);
        }
        return eps_mid - corr_sum.value() / static_cast<double>(s.nested_paths);
    }

    // Collateral machine restricted to [k0, T] with a fresh account.
    CollateralPath run_collateral_from(std::size_t k0, std::span<const double> eps,
                                       std::span<const double> disc,
                                       const std::vector<std::uint8_t>& flags,
                                       const MarginingRule& rule) const {
        std::size_t n = grid_.size();
        std::size_t m = n - k0;
        std::vector<double> e(eps.begin() + static_cast<std::ptrdiff_t>(k0), eps.end());
        std::vector<double> d(disc.begin() + static_cast<std::ptrdiff_t>(k0), disc.end());
        std::vector<std::uint8_t> f(flags.begin() + static_cast<std::ptrdiff_t>(k0),
                                    flags.end());
        f[0] = 0;
        CollateralPath sub =
            run_collateral(e, d, std::span<const std::uint8_t>(f.data(), m), rule);
        CollateralPath full;
        full.pre.assign(n, 0.0);
        full.post.assign(n, 0.0);
        full.beta.assign(n, k0);
        for (std::size_t k = 0; k < m; ++k) {
            full.pre[k0 + k] = sub.pre[k];
            full.post[k0 + k] = sub.post[k];
            full.beta[k0 + k] = sub.beta[k] + k0;
        }
        return full;
    }

    bool swap_is_reset(std::size_t k) const { return swap_.is_reset(k); }
    double swap_fixing_at(std::size_t k, const G2PathSimulator::Point& pt) const {
        return swap_.fixing_at(k, pt);
    }

    G2ppModel g2_model_;
    CirppModel cir_i_;
    CirppModel cir_c_;
    CorrelationParams corr_;
    std::vector<double> grid_;
    ShockGenerator shock_gen_;
    G2PathSimulator g2_sim_;
    CirPathSimulator cir_sim_i_;
    CirPathSimulator cir_sim_c_;
    SwapPricer swap_;
    double maturity_;
};

}  // namespace colcva
