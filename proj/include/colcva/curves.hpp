#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace colcva {

class CurveError : public std::invalid_argument {
public:
    explicit CurveError(const std::string& what) : std::invalid_argument(what) {}
};

// Risk-free discount curve. Log-linear interpolation between pillars, flat
// continuously-compounded extrapolation beyond the last pillar. Times are
// year fractions (ACT/365F throughout the library).
class DiscountCurve {
public:
    explicit DiscountCurve(std::vector<std::pair<double, double>> pillars)
        : pillars_(std::move(pillars)) {
        if (pillars_.empty()) throw CurveError("discount curve: no pillars");
        if (pillars_.front().first != 0.0 || pillars_.front().second != 1.0) {
            throw CurveError("discount curve: first pillar must be (0, 1)");
        }
        for (std::size_t i = 1; i < pillars_.size(); ++i) {
            if (pillars_[i].first <= pillars_[i - 1].first) {
                throw CurveError("discount curve: times must be strictly increasing");
            }
            if (pillars_[i].second <= 0.0) {
                throw CurveError("discount curve: discount factors must be positive");
            }
            if (pillars_[i].second > pillars_[i - 1].second) {
                throw CurveError("discount curve: discount factors must be non-increasing");
            }
        }
    }

    static DiscountCurve flat(double rate, double horizon = 60.0) {
        return DiscountCurve({{0.0, 1.0}, {horizon, std::exp(-rate * horizon)}});
    }

    double discount(double t) const {
        if (t < 0.0) throw CurveError("discount: t < 0");
        return std::exp(log_discount(t));
    }

    double log_discount(double t) const {
        const auto& p = pillars_;
        if (t <= 0.0) return 0.0;
        if (t >= p.back().first) {
            // flat continuously-compounded extrapolation
            double tl = p.back().first;
            double r = tl > 0.0 ? -std::log(p.back().second) / tl : 0.0;
            return -r * t;
        }
        std::size_t i = 1;
        while (p[i].first < t) ++i;
        double t0 = p[i - 1].first, t1 = p[i].first;
        double w = (t - t0) / (t1 - t0);
        return (1.0 - w) * std::log(p[i - 1].second) + w * std::log(p[i].second);
    }

    // Instantaneous forward rate; piecewise constant under log-linear
    // interpolation. At a pillar the right-hand value is returned.
    double forward(double t) const {
        const auto& p = pillars_;
        if (p.size() == 1 || t >= p.back().first) {
            double tl = p.back().first;
            return tl > 0.0 ? -std::log(p.back().second) / tl : 0.0;
        }
        std::size_t i = 1;
        while (p[i].first <= t) ++i;
        double t0 = p[i - 1].first, t1 = p[i].first;
        return -(std::log(p[i].second) - std::log(p[i - 1].second)) / (t1 - t0);
    }

    const std::vector<std::pair<double, double>>& pillars() const { return pillars_; }

private:
    std::vector<std::pair<double, double>> pillars_;
};

// Piecewise-constant hazard curve. Each pillar (t_i, h_i) gives the hazard
// rate on (t_{i-1}, t_i]; the last rate extends to infinity.
class HazardCurve {
public:
    explicit HazardCurve(std::vector<std::pair<double, double>> pillars)
        : pillars_(std::move(pillars)) {
        if (pillars_.empty()) throw CurveError("hazard curve: no pillars");
        double prev = 0.0;
        for (const auto& [t, h] : pillars_) {
            if (t <= prev) throw CurveError("hazard curve: times must be strictly increasing");
            if (h < 0.0) throw CurveError("hazard curve: rates must be non-negative");
            prev = t;
        }
    }

    static HazardCurve flat(double h) { return HazardCurve({{1.0, h}}); }

    // Integrated hazard on [0, t].
    double cumulative(double t) const {
        if (t < 0.0) throw CurveError("survival: t < 0");
        double acc = 0.0;
        double prev = 0.0;
        for (const auto& [te, h] : pillars_) {
            if (t <= te) {
                return acc + h * (t - prev);
            }
            acc += h * (te - prev);
            prev = te;
        }
        return acc + pillars_.back().second * (t - prev);
    }

    double survival(double t) const { return std::exp(-cumulative(t)); }

    double rate(double t) const {
        for (const auto& [te, h] : pillars_) {
            if (t <= te) return h;
        }
        return pillars_.back().second;
    }

    const std::vector<std::pair<double, double>>& pillars() const { return pillars_; }

private:
    std::vector<std::pair<double, double>> pillars_;
};

}  // namespace colcva
