#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "colcva/config.hpp"
#include "colcva/output.hpp"
#include "colcva/simulate.hpp"

namespace colcva {

// Sweepable parameters: margin update interval, the joint rate/credit
// correlation (applied to both names), the copula correlation, and the
// counterparty's credit-spread volatility.
enum class SweepParam { delta, rho_bar, rho_g, nu_c };

struct SweepSpec {
    SweepParam param = SweepParam::delta;
    std::vector<double> values;
};

// Accepts "name=start:stop:step" or "name=v1,v2,...".
inline SweepSpec parse_sweep(const std::string& text) {
    auto eq = text.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("sweep: expected <param>=<start>:<stop>:<step>");
    }
    std::string name = text.substr(0, eq);
    std::string rest = text.substr(eq + 1);
    SweepSpec s;
    if (name == "delta") {
        s.param = SweepParam::delta;
    } else if (name == "rho_bar") {
        s.param = SweepParam::rho_bar;
    } else if (name == "rho_g") {
        s.param = SweepParam::rho_g;
    } else if (name == "nu_c") {
        s.param = SweepParam::nu_c;
    } else {
        throw ConfigError("sweep: unknown parameter '" + name +
                          "' (expected delta|rho_bar|rho_g|nu_c)");
    }
    try {
        if (rest.find(',') != std::string::npos) {
            std::size_t pos = 0;
            while (pos < rest.size()) {
                auto next = rest.find(',', pos);
                if (next == std::string::npos) next = rest.size();
                s.values.push_back(std::stod(rest.substr(pos, next - pos)));
                pos = next + 1;
            }
        } else {
            auto c1 = rest.find(':');
            auto c2 = rest.find(':', c1 + 1);
            if (c1 == std::string::npos || c2 == std::string::npos) {
                throw ConfigError("sweep: expected start:stop:step or a comma list");
            }
            double start = std::stod(rest.substr(0, c1));
            double stop = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
            double step = std::stod(rest.substr(c2 + 1));
            if (!(step > 0.0)) throw ConfigError("sweep: step must be > 0");
            for (double v = start; v <= stop + 1e-12; v += step) s.values.push_back(v);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("sweep: could not parse numbers in '" + rest + "'");
    }
    if (s.values.empty()) throw ConfigError("sweep: empty value range");
    return s;
}

inline const char* sweep_name(SweepParam p) {
    switch (p) {
        case SweepParam::delta: return "delta";
        case SweepParam::rho_bar: return "rho_bar";
        case SweepParam::rho_g: return "rho_g";
        case SweepParam::nu_c: return "nu_c";
    }
    return "?";
}

inline RunConfig apply_sweep_value(RunConfig c, SweepParam p, double v) {
    switch (p) {
        case SweepParam::delta:
            c.margining.update_interval = v;
            break;
        case SweepParam::rho_bar:
            c.correlation.rho_bar_i = v;
            c.correlation.rho_bar_c = v;
            break;
        case SweepParam::rho_g:
            c.correlation.rho_g = v;
            break;
        case SweepParam::nu_c:
            c.cir_c.nu = v;
            break;
    }
    return c;
}

// Runs one cell per (value, rehyp flag). All cells share a single time grid
// (union of every cell's margin dates) and counter-keyed random numbers, so
// cell-to-cell differences are common-random-number estimates.
inline std::vector<ResultRow> run_grid(const RunConfig& base, const SweepSpec& sweep,
                                       bool rehyp_on, bool rehyp_off) {
    std::vector<double> intervals{base.margining.update_interval};
    if (sweep.param == SweepParam::delta) {
        intervals = sweep.values;
    }
    std::vector<ResultRow> rows;
    for (double v : sweep.values) {
        RunConfig c = apply_sweep_value(base, sweep.param, v);
        try {
            c.validate();
            ScenarioEngine engine(c.discount, c.hazard_i, c.hazard_c, c.g2, c.cir_i,
                                  c.cir_c, c.correlation, c.swap, c.base_step,
                                  intervals);
            for (bool rehyp : {true, false}) {
                if (rehyp && !rehyp_on) continue;
                if (!rehyp && !rehyp_off) continue;
                MarginingRule rule = c.margining;
                rule.rehypothecation = rehyp;
                RecoveryParams rec = c.recovery.with_rehypothecation(rehyp);
                auto res = engine.run(rule, rec, c.simulation);
                auto rep = estimate(res.outcomes, rule, rec);
                ResultRow row;
                row.parameter = sweep_name(sweep.param);
                row.value = v;
                row.rehypothecation = rehyp;
                row.bccva = rep.bccva;
                row.ccva = rep.ccva;
                row.cdva = rep.cdva;
                rows.push_back(row);
            }
        } catch (const NotPositiveSemiDefinite& e) {
            throw NotPositiveSemiDefinite(std::string(e.what()) + " at " +
                                          sweep_name(sweep.param) + "=" + fmt_num(v));
        }
    }
    return rows;
}

}  // namespace colcva
