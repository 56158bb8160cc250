#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace colcva {

enum class MarginMode { none, margined, perfect };
enum class Closeout { mid_market, nested };

struct MarginingRule {
    MarginMode mode = MarginMode::margined;
    double update_interval = 1.0 / 52.0; // delta, years
    double threshold_i = 0.0;            // H_I
    double threshold_c = 0.0;            // H_C
    double min_transfer = 0.0;           // M
    bool rehypothecation = false;
    Closeout closeout = Closeout::mid_market;
    bool allow_h_below_m = false; // waive the H >= M practice constraint

    void validate() const {
        if (threshold_i < 0.0 || threshold_c < 0.0 || min_transfer < 0.0) {
            throw std::invalid_argument("margining: H and M must be >= 0");
        }
        if (mode == MarginMode::margined) {
            if (!(update_interval > 0.0)) {
                throw std::invalid_argument("margining: update interval must be > 0");
            }
            if (!allow_h_below_m &&
                (threshold_i < min_transfer || threshold_c < min_transfer)) {
                throw std::invalid_argument(
                    "margining: thresholds must be >= minimum transfer amount "
                    "(set allow_h_below_m to waive)");
            }
        }
    }

    // Update dates strictly inside (0, T).
    std::vector<double> margin_dates(double maturity) const {
        std::vector<double> out;
        if (mode != MarginMode::margined) return out;
        for (int i = 1;; ++i) {
            double t = i * update_interval;
            if (t >= maturity - 1e-9) break;
            out.push_back(t);
        }
        return out;
    }
};

// One margin call: each party posts or withdraws against its threshold,
// gated by the minimum transfer amount.
inline double margin_update(double epsilon, double c_pre, const MarginingRule& rule) {
    auto pos = [](double x) { return std::max(x, 0.0); };
    auto neg = [](double x) { return std::min(x, 0.0); };
    double investor = neg(epsilon + rule.threshold_i) - neg(c_pre);
    double counterparty = pos(epsilon - rule.threshold_c) - pos(c_pre);
    double c = c_pre;
    if (std::fabs(investor) > rule.min_transfer) c += investor;
    if (std::fabs(counterparty) > rule.min_transfer) c += counterparty;
    return c;
}

// Account accrual between updates: C_{u^-} = C_{beta(u)^+} / D(beta(u), u),
// with D the path's own stochastic discount factor.
inline double accrue(double c_post, double df_at_update, double df_at_u) {
    return c_post * (df_at_update / df_at_u);
}

struct CollateralPath {
    std::vector<double> pre;  // accrued value just before any update at t_k
    std::vector<double> post; // value just after the update at t_k
    std::size_t last_update_before(std::size_t k) const { return beta[k]; }
    std::vector<std::size_t> beta; // index of the last update at or before k
};

// Runs the account along one path. `is_margin_date[k]` marks update dates;
// `discount[k]` is the pathwise D(0, t_k). The account starts at 0 and is
// closed at maturity.
inline CollateralPath run_collateral(std::span<const double> epsilon,
                                     std::span<const double> discount,
                                     std::span<const std::uint8_t> is_margin_date,
                                     const MarginingRule& rule) {
    std::size_t n = epsilon.size();
    if (discount.size() != n || is_margin_date.size() != n) {
        throw std::invalid_argument("run_collateral: size mismatch");
    }
    CollateralPath cp;
    cp.pre.assign(n, 0.0);
    cp.post.assign(n, 0.0);
    cp.beta.assign(n, 0);
    if (rule.mode == MarginMode::none) return cp;

    std::size_t last = 0; // index of last update (t_0 counts, C=0)
    double c_post = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double c_pre = k == 0 ? 0.0 : accrue(c_post, discount[last], discount[k]);
        cp.pre[k] = c_pre;
        cp.beta[k] = last;
        bool update = rule.mode == MarginMode::perfect
                          ? true
                          : (k > 0 && is_margin_date[k]);
        if (k + 1 == n) {
            // account closed at maturity
            cp.post[k] = 0.0;
            break;
        }
        if (update) {
            c_post = rule.mode == MarginMode::perfect
                         ? epsilon[k]
                         : margin_update(epsilon[k], c_pre, rule);
            last = k;
        }
        cp.post[k] = (k == last) ? c_post : c_pre;
    }
    return cp;
}

// Account value used at default: the accrued pre-update value (a call
// scheduled at the default date is never completed). Perfect
// collateralization tracks the exposure exactly.
inline double collateral_at_default(const CollateralPath& cp,
                                    std::span<const double> epsilon,
                                    std::size_t default_idx,
                                    const MarginingRule& rule) {
    if (rule.mode == MarginMode::none) return 0.0;
    if (rule.mode == MarginMode::perfect) return epsilon[default_idx];
    return cp.pre[default_idx];
}

}  // namespace colcva
