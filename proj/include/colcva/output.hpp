#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "colcva/pricer.hpp"

namespace colcva {

// Shortest-round-trip-ish formatting with a fixed precision so outputs are
// byte-stable across runs and worker counts; no locale involvement.
inline std::string fmt_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

inline double to_bp(double value, double notional) {
    return 1e4 * value / notional;
}

inline nlohmann::json report_json(const AdjustmentReport& rep, double notional) {
    using nlohmann::json;
    auto entry = [&](const ValueSE& v) {
        return json{{"value", v.value},
                    {"se", v.se},
                    {"bp", to_bp(v.value, notional)},
                    {"se_bp", to_bp(v.se, notional)}};
    };
    json j;
    j["bccva"] = entry(rep.bccva);
    j["ccva"] = entry(rep.ccva);
    j["cdva"] = entry(rep.cdva);
    j["mismatch"] = entry(rep.mismatch);
    j["terms"] = {{"lgd_c", entry(rep.term_lgd_c)},
                  {"lgd_c_prime", entry(rep.term_lgd_c_prime)},
                  {"lgd_i", entry(rep.term_lgd_i)},
                  {"lgd_i_prime", entry(rep.term_lgd_i_prime)}};
    j["paths"] = rep.paths;
    j["counterparty_defaults"] = rep.counterparty_defaults;
    j["investor_defaults"] = rep.investor_defaults;
    j["special_cases"] = rep.special_cases;
    j["notional"] = notional;
    return j;
}

inline void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
}

inline void write_report(const std::string& path, const AdjustmentReport& rep,
                         double notional) {
    write_text(path, report_json(rep, notional).dump(2) + "\n");
}

inline void write_profiles(const std::string& path, const ExposureProfiles& p) {
    std::string body =
        "time,mean_eps,p95_eps,mean_eps_pos,mean_eps_neg,"
        "mean_net_pos_rehyp,mean_net_neg_rehyp,"
        "mean_net_pos_norehyp,mean_net_neg_norehyp\n";
    for (std::size_t k = 0; k < p.times.size(); ++k) {
        body += fmt_num(p.times[k]) + ',' + fmt_num(p.mean_eps[k]) + ',' +
                fmt_num(p.p95_eps[k]) + ',' + fmt_num(p.mean_eps_pos[k]) + ',' +
                fmt_num(p.mean_eps_neg[k]) + ',' +
                fmt_num(p.mean_net_pos_rehyp[k]) + ',' +
                fmt_num(p.mean_net_neg_rehyp[k]) + ',' +
                fmt_num(p.mean_net_pos_norehyp[k]) + ',' +
                fmt_num(p.mean_net_neg_norehyp[k]) + '\n';
    }
    write_text(path, body);
}

inline void write_run_meta(const std::string& path, std::uint64_t seed,
                           std::size_t paths, std::size_t grid_size,
                           double wall_seconds) {
    nlohmann::json j{{"seed", seed},
                     {"paths", paths},
                     {"grid_size", grid_size},
                     {"wall_seconds", wall_seconds}};
    write_text(path, j.dump(2) + "\n");
}

// One sensitivity-grid cell, already normalized to basis points of notional.
struct ResultRow {
    std::string parameter;
    double value = 0.0;
    bool rehypothecation = false;
    ValueSE bccva, ccva, cdva;
};

inline void write_grid(const std::string& path, const std::vector<ResultRow>& rows,
                       double notional) {
    std::string body =
        "parameter,value,rehypothecation,"
        "bccva_bp,bccva_se_bp,ccva_bp,ccva_se_bp,cdva_bp,cdva_se_bp\n";
    for (const auto& r : rows) {
        body += r.parameter + ',' + fmt_num(r.value) + ',' +
                (r.rehypothecation ? "1" : "0") + ',' +
                fmt_num(to_bp(r.bccva.value, notional)) + ',' +
                fmt_num(to_bp(r.bccva.se, notional)) + ',' +
                fmt_num(to_bp(r.ccva.value, notional)) + ',' +
                fmt_num(to_bp(r.ccva.se, notional)) + ',' +
                fmt_num(to_bp(r.cdva.value, notional)) + ',' +
                fmt_num(to_bp(r.cdva.se, notional)) + '\n';
    }
    write_text(path, body);
}

}  // namespace colcva
