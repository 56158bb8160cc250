#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "colcva/collateral.hpp"
#include "colcva/math.hpp"

namespace colcva {

struct RecoveryParams {
    double rec_i = 0.4;
    double rec_c = 0.4;
    double rec_i_prime = 1.0; // collateral recovery on investor default
    double rec_c_prime = 1.0;

    void validate() const {
        auto in01 = [](double x) { return x >= 0.0 && x <= 1.0; };
        if (!in01(rec_i) || !in01(rec_c) || !in01(rec_i_prime) || !in01(rec_c_prime)) {
            throw std::invalid_argument("recovery: values must lie in [0,1]");
        }
        if (rec_i_prime < rec_i || rec_c_prime < rec_c) {
            throw std::invalid_argument(
                "recovery: collateral recovery cannot be below trade recovery");
        }
    }

    // Segregated collateral (no re-hypothecation) means full collateral
    // recovery for the provider.
    RecoveryParams with_rehypothecation(bool rehyp) const {
        RecoveryParams r = *this;
        if (!rehyp) {
            r.rec_i_prime = 1.0;
            r.rec_c_prime = 1.0;
        }
        return r;
    }

    double lgd_i() const { return 1.0 - rec_i; }
    double lgd_c() const { return 1.0 - rec_c; }
    double lgd_i_prime() const { return 1.0 - rec_i_prime; }
    double lgd_c_prime() const { return 1.0 - rec_c_prime; }
};

enum class DefaultFlag { none, counterparty, investor };

// Per-path inputs at the (grid-snapped) first default time.
struct PathOutcome {
    DefaultFlag flag = DefaultFlag::none;
    double tau = 0.0;
    double disc = 0.0;    // pathwise D(0, tau)
    double eps_tau = 0.0; // mid-market exposure at tau
    double eps_i = 0.0;   // investor on-default exposure
    double eps_c = 0.0;   // counterparty on-default exposure
    double c_tau = 0.0;   // collateral account at tau
};

// The five term contributions of the compact default-leg formula, signed so
// that bccva = mismatch - ccva + cdva.
struct PathTerms {
    double mismatch = 0.0;
    double term_lgd_c = 0.0;       // LGD_C (eps_I^+ - C^+)^+      (>= 0)
    double term_lgd_c_prime = 0.0; // LGD'_C (eps_I^- - C^-)^+     (>= 0)
    double term_lgd_i = 0.0;       // -LGD_I (eps_C^- - C^-)^-     (>= 0)
    double term_lgd_i_prime = 0.0; // -LGD'_I (eps_C^+ - C^+)^-    (>= 0)

    double ccva() const { return term_lgd_c + term_lgd_c_prime; }
    double cdva() const { return term_lgd_i + term_lgd_i_prime; }
    double bccva() const { return mismatch - ccva() + cdva(); }
};

inline PathTerms path_terms_compact(const PathOutcome& o, const RecoveryParams& r) {
    PathTerms t;
    if (o.flag == DefaultFlag::none) return t;
    auto pos = [](double x) { return std::max(x, 0.0); };
    auto neg = [](double x) { return std::min(x, 0.0); };
    if (o.flag == DefaultFlag::counterparty) {
        t.mismatch = -o.disc * (o.eps_tau - o.eps_i);
        t.term_lgd_c = o.disc * r.lgd_c() * pos(pos(o.eps_i) - pos(o.c_tau));
        t.term_lgd_c_prime = o.disc * r.lgd_c_prime() * pos(neg(o.eps_i) - neg(o.c_tau));
    } else {
        t.mismatch = -o.disc * (o.eps_tau - o.eps_c);
        t.term_lgd_i = -o.disc * r.lgd_i() * neg(neg(o.eps_c) - neg(o.c_tau));
        t.term_lgd_i_prime = -o.disc * r.lgd_i_prime() * neg(pos(o.eps_c) - pos(o.c_tau));
    }
    return t;
}

// The on-default cash flows evaluated branch by branch as enumerated, plus
// the returned collateral: D(0,tau) * (C_tau + case payoff). Kept separate
// from the compact route so the two can be cross-checked pathwise.
inline double path_terms_ledger(const PathOutcome& o, const RecoveryParams& r) {
    if (o.flag == DefaultFlag::none) return 0.0;
    auto pos = [](double x) { return std::max(x, 0.0); };
    auto neg = [](double x) { return std::min(x, 0.0); };
    double c = o.c_tau;
    double payoff;
    if (o.flag == DefaultFlag::counterparty) {
        double e = o.eps_i;
        if (e > 0.0 && c >= 0.0) {
            payoff = r.rec_c * pos(e - c) + neg(e - c);
        } else if (e > 0.0 && c < 0.0) {
            payoff = r.rec_c * e - r.rec_c_prime * c;
        } else if (c >= 0.0) { // e <= 0
            payoff = e - c;
        } else {
            payoff = neg(e - c) + r.rec_c_prime * pos(e - c);
        }
    } else {
        double e = o.eps_c;
        if (e < 0.0 && c <= 0.0) {
            payoff = r.rec_i * neg(e - c) + pos(e - c);
        } else if (e < 0.0 && c > 0.0) {
            payoff = r.rec_i * e - r.rec_i_prime * c;
        } else if (c <= 0.0) { // e >= 0
            payoff = e - c;
        } else {
            payoff = pos(e - c) + r.rec_i_prime * neg(e - c);
        }
    }
    return o.disc * (c + payoff);
}

struct ValueSE {
    double value = 0.0;
    double se = 0.0;
};

struct AdjustmentReport {
    ValueSE bccva, ccva, cdva, mismatch;
    ValueSE term_lgd_c, term_lgd_c_prime, term_lgd_i, term_lgd_i_prime;
    std::size_t paths = 0;
    std::size_t counterparty_defaults = 0;
    std::size_t investor_defaults = 0;
    std::vector<std::string> special_cases;
    // per-path bccva contributions, kept for common-random-number
    // difference estimators
    std::vector<double> path_bccva;
    std::vector<double> path_ccva;
    std::vector<double> path_cdva;
};

inline AdjustmentReport estimate(std::span<const PathOutcome> outcomes,
                                 const MarginingRule& rule,
                                 const RecoveryParams& recovery) {
    if (outcomes.empty()) throw std::invalid_argument("estimate: no paths");
    recovery.validate();
    AdjustmentReport rep;
    rep.paths = outcomes.size();
    rep.path_bccva.reserve(outcomes.size());
    rep.path_ccva.reserve(outcomes.size());
    rep.path_cdva.reserve(outcomes.size());

    struct Acc {
        KahanSum s, s2;
        void add(double x) {
            s.add(x);
            s2.add(x * x);
        }
        ValueSE finish(std::size_t n) const {
            double mean = s.value() / static_cast<double>(n);
            double var = (s2.value() / static_cast<double>(n) - mean * mean) *
                         static_cast<double>(n) / static_cast<double>(n - 1);
            return {mean, n > 1 && var > 0.0 ? std::sqrt(var / static_cast<double>(n)) : 0.0};
        }
    };
    Acc a_mis, a_ccva, a_cdva, a_bccva, a_c, a_cp, a_i, a_ip;

    for (const auto& o : outcomes) {
        PathTerms t = path_terms_compact(o, recovery);
        a_mis.add(t.mismatch);
        a_ccva.add(t.ccva());
        a_cdva.add(t.cdva());
        a_bccva.add(t.bccva());
        a_c.add(t.term_lgd_c);
        a_cp.add(t.term_lgd_c_prime);
        a_i.add(t.term_lgd_i);
        a_ip.add(t.term_lgd_i_prime);
        rep.path_bccva.push_back(t.bccva());
        rep.path_ccva.push_back(t.ccva());
        rep.path_cdva.push_back(t.cdva());
        if (o.flag == DefaultFlag::counterparty) ++rep.counterparty_defaults;
        if (o.flag == DefaultFlag::investor) ++rep.investor_defaults;
    }
    std::size_t n = outcomes.size();
    rep.mismatch = a_mis.finish(n);
    rep.ccva = a_ccva.finish(n);
    rep.cdva = a_cdva.finish(n);
    rep.term_lgd_c = a_c.finish(n);
    rep.term_lgd_c_prime = a_cp.finish(n);
    rep.term_lgd_i = a_i.finish(n);
    rep.term_lgd_i_prime = a_ip.finish(n);
    // decomposition identity holds exactly by construction
    rep.bccva.value = rep.mismatch.value - rep.ccva.value + rep.cdva.value;
    rep.bccva.se = a_bccva.finish(n).se;

    if (rule.mode == MarginMode::perfect) rep.special_cases.push_back("perfect_collateralization");
    if (rule.mode == MarginMode::none) rep.special_cases.push_back("uncollateralized_bcva");
    if (recovery.rec_c_prime == 1.0 && recovery.rec_i_prime == 1.0) {
        rep.special_cases.push_back("no_rehypothecation");
    } else if (recovery.rec_c_prime == recovery.rec_c &&
               recovery.rec_i_prime == recovery.rec_i) {
        rep.special_cases.push_back("worst_case_rehypothecation");
    }
    if (rule.mode == MarginMode::none && rep.investor_defaults == 0) {
        rep.special_cases.push_back("unilateral_cva");
    }
    return rep;
}

// Plot-ready exposure statistics per grid time.
struct ExposureProfiles {
    std::vector<double> times;
    std::vector<double> mean_eps, p95_eps;
    std::vector<double> mean_eps_pos, mean_eps_neg;
    std::vector<double> mean_net_pos_rehyp, mean_net_neg_rehyp;     // (eps-C)^+/-
    std::vector<double> mean_net_pos_norehyp, mean_net_neg_norehyp; // (e^+-C^+)^+, (e^--C^-)^-
};

// Accumulates per-path exposure/collateral series. Values are stored per
// (time, path) and reduced in path order at the end, so results do not
// depend on which worker produced which path.
class ProfileAccumulator {
public:
    ProfileAccumulator(std::vector<double> times, std::size_t num_paths)
        : times_(std::move(times)), num_paths_(num_paths),
          eps_(times_.size() * num_paths, 0.0f),
          col_(times_.size() * num_paths, 0.0f) {}

    void add_path(std::size_t path_id, std::span<const double> eps,
                  std::span<const double> collateral) {
        if (eps.size() != times_.size() || collateral.size() != times_.size()) {
            throw std::invalid_argument("profile: series length mismatch");
        }
        for (std::size_t k = 0; k < times_.size(); ++k) {
            eps_[k * num_paths_ + path_id] = static_cast<float>(eps[k]);
            col_[k * num_paths_ + path_id] = static_cast<float>(collateral[k]);
        }
    }

    ExposureProfiles finalize() const {
        ExposureProfiles p;
        std::size_t nt = times_.size();
        p.times = times_;
        auto sized = [&](std::vector<double>& v) { v.assign(nt, 0.0); };
        sized(p.mean_eps);
        sized(p.p95_eps);
        sized(p.mean_eps_pos);
        sized(p.mean_eps_neg);
        sized(p.mean_net_pos_rehyp);
        sized(p.mean_net_neg_rehyp);
        sized(p.mean_net_pos_norehyp);
        sized(p.mean_net_neg_norehyp);
        std::vector<float> sorted(num_paths_);
        double n = static_cast<double>(num_paths_);
        for (std::size_t k = 0; k < nt; ++k) {
            KahanSum se, sep, sen, srp, srn, snp, snn;
            for (std::size_t i = 0; i < num_paths_; ++i) {
                double e = eps_[k * num_paths_ + i];
                double c = col_[k * num_paths_ + i];
                se.add(e);
                sep.add(std::max(e, 0.0));
                sen.add(std::min(e, 0.0));
                srp.add(std::max(e - c, 0.0));
                srn.add(std::min(e - c, 0.0));
                snp.add(std::max(std::max(e, 0.0) - std::max(c, 0.0), 0.0));
                snn.add(std::min(std::min(e, 0.0) - std::min(c, 0.0), 0.0));
                sorted[i] = eps_[k * num_paths_ + i];
            }
            std::sort(sorted.begin(), sorted.end());
            std::size_t q = static_cast<std::size_t>(
                std::ceil(0.95 * static_cast<double>(num_paths_))) - 1;
            p.mean_eps[k] = se.value() / n;
            p.p95_eps[k] = sorted[std::min(q, num_paths_ - 1)];
            p.mean_eps_pos[k] = sep.value() / n;
            p.mean_eps_neg[k] = sen.value() / n;
            p.mean_net_pos_rehyp[k] = srp.value() / n;
            p.mean_net_neg_rehyp[k] = srn.value() / n;
            p.mean_net_pos_norehyp[k] = snp.value() / n;
            p.mean_net_neg_norehyp[k] = snn.value() / n;
        }
        return p;
    }

private:
    std::vector<double> times_;
    std::size_t num_paths_;
    std::vector<float> eps_;
    std::vector<float> col_;
};

}  // namespace colcva
