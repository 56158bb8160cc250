#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "colcva/g2pp.hpp"

namespace colcva {

enum class SwapSide { payer, receiver }; // fixed-leg direction, investor view

struct SwapSpec {
    double notional = 1.0;
    double maturity = 10.0;           // years
    double fixed_rate = std::nan(""); // NaN: use the par rate off the curve
    int fixed_frequency = 1;          // payments per year
    int float_frequency = 2;
    SwapSide side = SwapSide::payer;

    void validate() const {
        if (!(maturity > 0.0)) throw std::invalid_argument("swap: maturity must be > 0");
        if (fixed_frequency < 1 || float_frequency < 1) {
            throw std::invalid_argument("swap: frequencies must be >= 1");
        }
        auto divides = [&](int f) {
            double n = maturity * f;
            return std::fabs(n - std::round(n)) < 1e-9;
        };
        if (!divides(fixed_frequency) || !divides(float_frequency)) {
            throw std::invalid_argument("swap: frequencies must divide the maturity evenly");
        }
    }

    std::vector<double> fixed_dates() const { return dates(fixed_frequency); }
    std::vector<double> float_dates() const { return dates(float_frequency); }

private:
    std::vector<double> dates(int freq) const {
        int n = static_cast<int>(std::round(maturity * freq));
        std::vector<double> out(n);
        for (int i = 1; i <= n; ++i) out[i - 1] = maturity * i / n;
        return out;
    }
};

// Par fixed rate off the time-0 curve: (1 - P(0,T)) / annuity.
inline double fair_rate(const SwapSpec& spec, const DiscountCurve& curve) {
    spec.validate();
    double annuity = 0.0;
    double delta = 1.0 / spec.fixed_frequency;
    for (double t : spec.fixed_dates()) annuity += delta * curve.discount(t);
    if (annuity <= 0.0) throw std::invalid_argument("fair_rate: zero annuity");
    return (1.0 - curve.discount(spec.maturity)) / annuity;
}

// Analytic mid-market exposure of the swap along simulated factor paths.
// Payment dates must lie on the grid; the running floating coupon's fixing is
// captured from the path state at each reset date.
class SwapPricer {
public:
    SwapPricer(const SwapSpec& spec, const G2ppModel& model,
               std::span<const double> grid)
        : spec_(spec), grid_(grid.begin(), grid.end()) {
        spec_.validate();
        rate_ = std::isnan(spec_.fixed_rate) ? fair_rate(spec_, model.curve())
                                             : spec_.fixed_rate;
        const auto fixed = spec_.fixed_dates();
        const auto flt = spec_.float_dates();

        auto grid_index = [&](double t) {
            for (std::size_t k = 0; k < grid_.size(); ++k) {
                if (std::fabs(grid_[k] - t) < 1e-9) return k;
            }
            throw std::invalid_argument("swap payment date not on simulation grid");
        };

        // Bond coefficient tables: log A(t,T) and the two factor loadings,
        // per (payment date, grid index).
        std::vector<double> all_dates = fixed;
        all_dates.insert(all_dates.end(), flt.begin(), flt.end());
        for (double d : all_dates) (void)grid_index(d);

        auto make_table = [&](double T) {
            BondTable bt;
            bt.maturity = T;
            bt.log_a.resize(grid_.size(), 0.0);
            bt.ba.resize(grid_.size(), 0.0);
            bt.bb.resize(grid_.size(), 0.0);
            const auto& p = model.params();
            double v0T = model.variance(0.0, T);
            for (std::size_t k = 0; k < grid_.size(); ++k) {
                double t = grid_[k];
                if (t > T + 1e-12) break;
                double dt = T - t;
                bt.log_a[k] = model.curve().log_discount(T) -
                              model.curve().log_discount(t) +
                              0.5 * (model.variance(t, T) - v0T + model.variance(0.0, t));
                bt.ba[k] = b_factor(p.a, dt);
                bt.bb[k] = b_factor(p.b, dt);
            }
            return bt;
        };

        for (double d : fixed) {
            fixed_tables_.push_back(make_table(d));
        }
        for (double d : flt) {
            float_tables_.push_back(make_table(d));
        }

        // Per grid index: first not-yet-paid fixed/float payment, and reset
        // bookkeeping (reset at period start, fixing for the period ending at
        // float date j).
        next_fixed_.resize(grid_.size());
        next_float_.resize(grid_.size());
        reset_period_.assign(grid_.size(), SIZE_MAX);
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            double t = grid_[k];
            std::size_t nf = 0;
            while (nf < fixed.size() && fixed[nf] <= t + 1e-9) ++nf;
            next_fixed_[k] = nf;
            std::size_t nl = 0;
            while (nl < flt.size() && flt[nl] <= t + 1e-9) ++nl;
            next_float_[k] = nl;
            if (nl < flt.size()) {
                double start = nl == 0 ? 0.0 : flt[nl - 1];
                if (std::fabs(t - start) < 1e-9) reset_period_[k] = nl;
            }
        }
    }

    double rate() const { return rate_; }
    const SwapSpec& spec() const { return spec_; }

    // eps_out[k] = mid-market exposure at grid time k; length grid.size().
    // fixings_out, when non-empty, receives the running floating-period
    // fixing discount factor per grid time.
    void exposure_path(std::span<const G2PathSimulator::Point> pts,
                       std::span<double> eps_out,
                       std::span<double> fixings_out = {}) const {
        if (pts.size() != grid_.size() || eps_out.size() != grid_.size()) {
            throw std::invalid_argument("exposure_path: size mismatch");
        }
        double fixing_df = 1.0;
        for (std::size_t k = 0; k < grid_.size(); ++k) {
            if (reset_period_[k] != SIZE_MAX) {
                fixing_df = bond(float_tables_[reset_period_[k]], k, pts[k]);
            }
            eps_out[k] = value_at(k, pts[k], fixing_df);
            if (!fixings_out.empty()) fixings_out[k] = fixing_df;
        }
    }

    bool is_reset(std::size_t k) const { return reset_period_[k] != SIZE_MAX; }

    double fixing_at(std::size_t k, const G2PathSimulator::Point& pt) const {
        return bond(float_tables_[reset_period_[k]], k, pt);
    }

    // Exposure at one grid index given the running period's fixing discount
    // factor (1.0 at a reset date).
    double value_at(std::size_t k, const G2PathSimulator::Point& pt,
                    double fixing_df) const {
        if (next_float_[k] >= float_tables_.size() &&
            grid_[k] >= spec_.maturity - 1e-9) {
            return 0.0;
        }
        double p_end = bond(float_tables_[next_float_[k]], k, pt);
        double p_mat = bond(float_tables_.back(), k, pt);
        double float_pv = p_end / fixing_df - p_mat;
        double delta = 1.0 / spec_.fixed_frequency;
        double fixed_pv = 0.0;
        for (std::size_t i = next_fixed_[k]; i < fixed_tables_.size(); ++i) {
            fixed_pv += delta * bond(fixed_tables_[i], k, pt);
        }
        fixed_pv *= rate_;
        double v = spec_.notional * (float_pv - fixed_pv);
        return spec_.side == SwapSide::payer ? v : -v;
    }

private:
    struct BondTable {
        double maturity;
        std::vector<double> log_a, ba, bb;
    };

    static double bond(const BondTable& bt, std::size_t k,
                       const G2PathSimulator::Point& pt) {
        return std::exp(bt.log_a[k] - bt.ba[k] * pt.x - bt.bb[k] * pt.z);
    }

    SwapSpec spec_;
    std::vector<double> grid_;
    double rate_;
    std::vector<BondTable> fixed_tables_;
    std::vector<BondTable> float_tables_;
    std::vector<std::size_t> next_fixed_;
    std::vector<std::size_t> next_float_;
    std::vector<std::size_t> reset_period_;
};

}  // namespace colcva
