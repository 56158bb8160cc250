// End-to-end checks of the command-line binary: determinism of the written
// artifacts, exit codes for bad inputs, and the grid output shape.
// Usage: test_cli <path-to-colcva-binary> <path-to-configs-dir>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        ++failures;
        std::cerr << "FAILED: " << what << "\n";
    }
}

int run_cmd(const std::string& cmd) {
    int rc = std::system((cmd + " > /dev/null 2>&1").c_str());
    if (rc == -1 || !WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream out(p);
    out << body;
}

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += (c == '\n');
    return n;
}

const char* kSmallConfig = R"({
  "discount_curve": {"flat_rate": 0.03},
  "hazard_investor": {"flat_rate": 0.01},
  "hazard_counterparty": {"flat_rate": 0.025},
  "rates_model": {"a": 0.1, "b": 0.05, "sigma": 0.01, "eta": 0.008, "rho12": -0.5},
  "intensity_investor": {"kappa": 0.4, "mu": 0.01, "nu": 0.05, "y0": 0.01},
  "intensity_counterparty": {"kappa": 0.4, "mu": 0.025, "nu": 0.14, "y0": 0.025},
  "correlation": {"rho_bar_investor": 0.2, "rho_bar_counterparty": 0.2, "rho_g": 0.1},
  "recovery": {"investor": 0.4, "counterparty": 0.4,
               "investor_collateral": 0.4, "counterparty_collateral": 0.4},
  "swap": {"notional": 100.0, "maturity": 5.0, "fixed_rate": null,
           "fixed_frequency": 1, "float_frequency": 2, "side": "payer"},
  "margining": {"mode": "margined", "update_interval": 0.25,
                "rehypothecation": true},
  "simulation": {"paths": 400, "seed": 9, "workers": 1, "base_step": 0.125}
})";

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: test_cli <binary> <configs-dir>\n";
        return 2;
    }
    std::string bin = argv[1];
    fs::path configs = argv[2];
    fs::path work = fs::temp_directory_path() / "colcva_cli_test";
    fs::remove_all(work);
    fs::create_directories(work);

    fs::path small = work / "small.json";
    write_file(small, kSmallConfig);

    // --- run: same config and seed must produce byte-identical artifacts ---
    check(run_cmd(bin + " run --config " + small.string() + " --out " +
                  (work / "a").string()) == 0,
          "run exits 0");
    check(run_cmd(bin + " run --config " + small.string() + " --out " +
                  (work / "b").string()) == 0,
          "second run exits 0");
    check(slurp(work / "a/report.json") == slurp(work / "b/report.json"),
          "report.json is deterministic");
    check(slurp(work / "a/profiles.csv") == slurp(work / "b/profiles.csv"),
          "profiles.csv is deterministic");
    check(!slurp(work / "a/report.json").empty(), "report.json is non-empty");
    check(!slurp(work / "a/run_meta.json").empty(), "run_meta.json is written");
    check(count_lines(slurp(work / "a/profiles.csv")) > 2,
          "profiles.csv has data rows");

    // --- run: overrides change the result ---
    check(run_cmd(bin + " run --config " + small.string() + " --seed 123 --out " +
                  (work / "c").string()) == 0,
          "run with --seed exits 0");
    check(slurp(work / "a/report.json") != slurp(work / "c/report.json"),
          "--seed changes the estimate");

    // --- run on the shipped baseline config ---
    check(run_cmd(bin + " run --config " + (configs / "baseline.json").string() +
                  " --paths 200 --out " + (work / "base").string()) == 0,
          "baseline config runs");

    // --- exit code 2: malformed or invalid configs ---
    check(run_cmd(bin + " run --config " + (work / "missing.json").string()) == 2,
          "missing config file exits 2");
    write_file(work / "not_json.json", "{ this is not json");
    check(run_cmd(bin + " run --config " + (work / "not_json.json").string()) == 2,
          "invalid JSON exits 2");
    {
        std::string body = kSmallConfig;
        auto pos = body.find("\"swap\"");
        body.replace(pos, 6, "\"swp\"");
        write_file(work / "no_swap.json", body);
        check(run_cmd(bin + " run --config " + (work / "no_swap.json").string()) == 2,
              "missing section exits 2");
    }

    // --- exit code 3: jointly infeasible correlation ---
    {
        std::string body = kSmallConfig;
        auto pos = body.find("\"rho_bar_investor\": 0.2");
        body.replace(pos, 23, "\"rho_bar_investor\": 0.6");
        pos = body.find("\"rho_bar_counterparty\": 0.2");
        body.replace(pos, 27, "\"rho_bar_counterparty\": 0.6");
        write_file(work / "non_psd.json", body);
        check(run_cmd(bin + " run --config " + (work / "non_psd.json").string()) == 3,
              "non-PSD correlation exits 3");
    }

    // --- grid: shape and sweep-time PSD failure ---
    {
        fs::path gout = work / "grid";
        check(run_cmd(bin + " grid --config " + small.string() +
                      " --sweep rho_g=0:0.5:0.25 --rehyp both --out " +
                      gout.string()) == 0,
              "grid exits 0");
        std::string csv = slurp(gout / "grid.csv");
        check(count_lines(csv) == 7, "grid.csv has header + 3 values x 2 modes");
        check(csv.rfind("parameter,value,rehypothecation,"
                        "bccva_bp,bccva_se_bp,ccva_bp,ccva_se_bp,"
                        "cdva_bp,cdva_se_bp\n", 0) == 0,
              "grid.csv header matches the documented schema");

        check(run_cmd(bin + " grid --config " + small.string() +
                      " --sweep rho_bar=0:0.6:0.3 --rehyp on --out " +
                      (work / "grid2").string()) == 3,
              "sweep crossing the PSD boundary exits 3");
        check(run_cmd(bin + " grid --config " + small.string() +
                      " --sweep delta=0.25,0.5 --rehyp sideways --out " +
                      (work / "grid3").string()) == 2,
              "bad --rehyp value exits 2");
        check(run_cmd(bin + " grid --config " + small.string() +
                      " --sweep gamma=0:1:0.5 --out " + (work / "grid4").string()) == 2,
              "unknown sweep parameter exits 2");
    }

    if (failures == 0) {
        std::cout << "test_cli: all checks passed\n";
        return 0;
    }
    std::cerr << "test_cli: " << failures << " check(s) failed\n";
    return 1;
}
