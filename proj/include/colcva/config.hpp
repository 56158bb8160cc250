#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colcva/cirpp.hpp"
#include "colcva/collateral.hpp"
#include "colcva/correlation.hpp"
#include "colcva/curves.hpp"
#include "colcva/g2pp.hpp"
#include "colcva/pricer.hpp"
#include "colcva/simulate.hpp"
#include "colcva/swap.hpp"

namespace colcva {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Full run description; everything the engine needs in one JSON document.
struct RunConfig {
    std::string comment;
    DiscountCurve discount = DiscountCurve::flat(0.0);
    HazardCurve hazard_i = HazardCurve::flat(0.0);
    HazardCurve hazard_c = HazardCurve::flat(0.0);
    G2ppParams g2;
    CirppParams cir_i;
    CirppParams cir_c;
    CorrelationParams correlation;
    RecoveryParams recovery;
    SwapSpec swap;
    MarginingRule margining;
    SimulationSettings simulation;
    double base_step = 1.0 / 52.0;

    void validate() const {
        auto wrap = [](const char* field, auto&& fn) {
            try {
                fn();
            } catch (const std::exception& e) {
                throw ConfigError(std::string(field) + ": " + e.what());
            }
        };
        wrap("rates_model", [&] { g2.validate(); });
        wrap("intensity_investor", [&] { cir_i.validate(); });
        wrap("intensity_counterparty", [&] { cir_c.validate(); });
        try {
            correlation.validate();
        } catch (const NotPositiveSemiDefinite&) {
            throw; // numerical failure, not a malformed config
        } catch (const std::exception& e) {
            throw ConfigError(std::string("correlation: ") + e.what());
        }
        wrap("recovery", [&] { recovery.validate(); });
        wrap("swap", [&] { swap.validate(); });
        wrap("margining", [&] { margining.validate(); });
        if (!(base_step > 0.0)) {
            throw ConfigError("simulation.base_step: must be > 0");
        }
        if (simulation.paths == 0) {
            throw ConfigError("simulation.paths: must be >= 1");
        }
        if (margining.closeout == Closeout::nested && simulation.nested_paths == 0) {
            throw ConfigError("simulation.nested_paths: must be >= 1 for nested close-out");
        }
    }
};

namespace detail {

using nlohmann::json;

inline const json& require(const json& j, const char* key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + "." + key + ": missing field");
    return *it;
}

inline double num(const json& j, const char* key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
    return v.get<double>();
}

inline double num_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

inline std::vector<std::pair<double, double>> pillars(const json& j,
                                                      const std::string& ctx) {
    const json& p = require(j, "pillars", ctx);
    if (!p.is_array()) throw ConfigError(ctx + ".pillars: expected an array");
    std::vector<std::pair<double, double>> out;
    for (const auto& row : p) {
        if (!row.is_array() || row.size() != 2) {
            throw ConfigError(ctx + ".pillars: each entry must be [time, value]");
        }
        out.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return out;
}

inline DiscountCurve parse_discount(const json& j, const std::string& ctx) {
    try {
        if (j.contains("flat_rate")) {
            return DiscountCurve::flat(j.at("flat_rate").get<double>());
        }
        return DiscountCurve(pillars(j, ctx));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

inline HazardCurve parse_hazard(const json& j, const std::string& ctx) {
    try {
        if (j.contains("flat_rate")) {
            return HazardCurve::flat(j.at("flat_rate").get<double>());
        }
        return HazardCurve(pillars(j, ctx));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(ctx + ": " + e.what());
    }
}

inline json curve_json(const DiscountCurve& c) {
    json out;
    json p = json::array();
    for (const auto& [t, df] : c.pillars()) p.push_back({t, df});
    out["pillars"] = p;
    return out;
}

inline json curve_json(const HazardCurve& c) {
    json out;
    json p = json::array();
    for (const auto& [t, h] : c.pillars()) p.push_back({t, h});
    out["pillars"] = p;
    return out;
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::num;
    using detail::require;
    RunConfig c;
    if (j.contains("comment")) c.comment = j.at("comment").get<std::string>();

    c.discount = detail::parse_discount(require(j, "discount_curve", "config"),
                                        "discount_curve");
    c.hazard_i = detail::parse_hazard(require(j, "hazard_investor", "config"),
                                      "hazard_investor");
    c.hazard_c = detail::parse_hazard(require(j, "hazard_counterparty", "config"),
                                      "hazard_counterparty");

    {
        const auto& g = require(j, "rates_model", "config");
        c.g2.a = num(g, "a", "rates_model");
        c.g2.b = num(g, "b", "rates_model");
        c.g2.sigma = num(g, "sigma", "rates_model");
        c.g2.eta = num(g, "eta", "rates_model");
        c.g2.rho12 = num(g, "rho12", "rates_model");
    }
    auto parse_cir = [&](const char* key) {
        const auto& g = require(j, key, "config");
        CirppParams p;
        p.kappa = num(g, "kappa", key);
        p.mu = num(g, "mu", key);
        p.nu = num(g, "nu", key);
        p.y0 = num(g, "y0", key);
        return p;
    };
    c.cir_i = parse_cir("intensity_investor");
    c.cir_c = parse_cir("intensity_counterparty");

    {
        const auto& g = require(j, "correlation", "config");
        c.correlation.rho12 = c.g2.rho12;
        c.correlation.rho_bar_i = num(g, "rho_bar_investor", "correlation");
        c.correlation.rho_bar_c = num(g, "rho_bar_counterparty", "correlation");
        c.correlation.rho_g = num(g, "rho_g", "correlation");
    }
    {
        const auto& g = require(j, "recovery", "config");
        c.recovery.rec_i = num(g, "investor", "recovery");
        c.recovery.rec_c = num(g, "counterparty", "recovery");
        c.recovery.rec_i_prime = detail::num_or(g, "investor_collateral", 1.0);
        c.recovery.rec_c_prime = detail::num_or(g, "counterparty_collateral", 1.0);
    }
    {
        const auto& g = require(j, "swap", "config");
        c.swap.notional = num(g, "notional", "swap");
        c.swap.maturity = num(g, "maturity", "swap");
        auto fr = g.find("fixed_rate");
        c.swap.fixed_rate = (fr == g.end() || fr->is_null()) ? std::nan("")
                                                             : fr->get<double>();
        c.swap.fixed_frequency = static_cast<int>(num(g, "fixed_frequency", "swap"));
        c.swap.float_frequency = static_cast<int>(num(g, "float_frequency", "swap"));
        std::string side = require(g, "side", "swap").get<std::string>();
        if (side == "payer") {
            c.swap.side = SwapSide::payer;
        } else if (side == "receiver") {
            c.swap.side = SwapSide::receiver;
        } else {
            throw ConfigError("swap.side: must be \"payer\" or \"receiver\"");
        }
    }
    {
        const auto& g = require(j, "margining", "config");
        std::string mode = require(g, "mode", "margining").get<std::string>();
        if (mode == "none") {
            c.margining.mode = MarginMode::none;
        } else if (mode == "margined") {
            c.margining.mode = MarginMode::margined;
        } else if (mode == "perfect") {
            c.margining.mode = MarginMode::perfect;
        } else {
            throw ConfigError("margining.mode: must be none|margined|perfect");
        }
        c.margining.update_interval = detail::num_or(g, "update_interval", 1.0 / 52.0);
        c.margining.threshold_i = detail::num_or(g, "threshold_investor", 0.0);
        c.margining.threshold_c = detail::num_or(g, "threshold_counterparty", 0.0);
        c.margining.min_transfer = detail::num_or(g, "min_transfer", 0.0);
        if (g.contains("rehypothecation")) {
            c.margining.rehypothecation = g.at("rehypothecation").get<bool>();
        }
        std::string co = g.value("closeout", std::string("mid_market"));
        if (co == "mid_market") {
            c.margining.closeout = Closeout::mid_market;
        } else if (co == "nested") {
            c.margining.closeout = Closeout::nested;
        } else {
            throw ConfigError("margining.closeout: must be mid_market|nested");
        }
    }
    {
        const auto& g = require(j, "simulation", "config");
        c.simulation.paths = static_cast<std::size_t>(num(g, "paths", "simulation"));
        c.simulation.seed =
            static_cast<std::uint64_t>(detail::num_or(g, "seed", 42.0));
        c.simulation.workers =
            static_cast<unsigned>(detail::num_or(g, "workers", 1.0));
        c.simulation.nested_paths =
            static_cast<std::size_t>(detail::num_or(g, "nested_paths", 200.0));
        c.base_step = detail::num_or(g, "base_step", 1.0 / 52.0);
    }
    c.validate();
    return c;
}

inline nlohmann::json to_json(const RunConfig& c) {
    using nlohmann::json;
    json j;
    j["comment"] = c.comment;
    j["discount_curve"] = detail::curve_json(c.discount);
    j["hazard_investor"] = detail::curve_json(c.hazard_i);
    j["hazard_counterparty"] = detail::curve_json(c.hazard_c);
    j["rates_model"] = {{"a", c.g2.a},
                        {"b", c.g2.b},
                        {"sigma", c.g2.sigma},
                        {"eta", c.g2.eta},
                        {"rho12", c.g2.rho12}};
    auto cir = [](const CirppParams& p) {
        return json{{"kappa", p.kappa}, {"mu", p.mu}, {"nu", p.nu}, {"y0", p.y0}};
    };
    j["intensity_investor"] = cir(c.cir_i);
    j["intensity_counterparty"] = cir(c.cir_c);
    j["correlation"] = {{"rho_bar_investor", c.correlation.rho_bar_i},
                        {"rho_bar_counterparty", c.correlation.rho_bar_c},
                        {"rho_g", c.correlation.rho_g}};
    j["recovery"] = {{"investor", c.recovery.rec_i},
                     {"counterparty", c.recovery.rec_c},
                     {"investor_collateral", c.recovery.rec_i_prime},
                     {"counterparty_collateral", c.recovery.rec_c_prime}};
    j["swap"] = {{"notional", c.swap.notional},
                 {"maturity", c.swap.maturity},
                 {"fixed_rate", std::isnan(c.swap.fixed_rate)
                                    ? nlohmann::json()
                                    : nlohmann::json(c.swap.fixed_rate)},
                 {"fixed_frequency", c.swap.fixed_frequency},
                 {"float_frequency", c.swap.float_frequency},
                 {"side", c.swap.side == SwapSide::payer ? "payer" : "receiver"}};
    const char* mode = c.margining.mode == MarginMode::none      ? "none"
                       : c.margining.mode == MarginMode::perfect ? "perfect"
                                                                 : "margined";
    j["margining"] = {
        {"mode", mode},
        {"update_interval", c.margining.update_interval},
        {"threshold_investor", c.margining.threshold_i},
        {"threshold_counterparty", c.margining.threshold_c},
        {"min_transfer", c.margining.min_transfer},
        {"rehypothecation", c.margining.rehypothecation},
        {"closeout",
         c.margining.closeout == Closeout::nested ? "nested" : "mid_market"}};
    j["simulation"] = {{"paths", c.simulation.paths},
                       {"seed", c.simulation.seed},
                       {"workers", c.simulation.workers},
                       {"nested_paths", c.simulation.nested_paths},
                       {"base_step", c.base_step}};
    return j;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace colcva
