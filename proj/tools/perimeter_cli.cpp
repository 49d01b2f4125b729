// perimeter command line: run / sweep / advantage / check.
// Exit codes: 0 verdict matches the config's expectation (or none stated),
// 1 mismatch or property violation, 2 config/trace/usage error.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "perimeter.h"

namespace {

struct StringHolder {
    char* s = nullptr;
    ~StringHolder() { perim_string_free(s); }
};

int config_error() {
    std::cerr << "error: " << perim_last_error() << "\n";
    return 2;
}

bool write_file(const std::string& path, const char* text) {
    if (path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

uint64_t env_seed() {
    const char* env = std::getenv("PERIMETER_SEED");
    return env ? std::strtoull(env, nullptr, 10) : 0;
}

using ScenarioPtr = std::unique_ptr<perim_scenario, decltype(&perim_scenario_free)>;

ScenarioPtr load(const std::string& path, const std::vector<std::string>& overrides, int& err) {
    perim_scenario* raw = nullptr;
    err = perim_scenario_load_file(path.c_str(), &raw);
    ScenarioPtr sc(raw, perim_scenario_free);
    if (err != PERIM_OK) return sc;
    for (const auto& ov : overrides) {
        auto eq = ov.find('=');
        if (eq == std::string::npos) {
            err = PERIM_ERR_CONFIG;
            std::cerr << "error: override '" << ov << "': expected KEY=VALUE\n";
            return sc;
        }
        err = perim_scenario_override(sc.get(), ov.substr(0, eq).c_str(),
                                      ov.substr(eq + 1).c_str());
        if (err != PERIM_OK) return sc;
    }
    return sc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perimeter: vehicle access protocol engine and adversarial simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(perim_version()));

    std::string config_path, trace_out, report_out = "-";
    uint64_t seed = 0;
    std::vector<std::string> overrides;

    auto* run = app.add_subcommand("run", "run one scenario and report the verdict");
    run->add_option("config", config_path, "scenario JSON")->required();
    run->add_option("--seed", seed, "seed override (also: PERIMETER_SEED)");
    run->add_option("--trace", trace_out, "write the session trace here");
    run->add_option("--report", report_out, "report destination (default stdout)");
    run->add_option("--set", overrides, "config override KEY=VALUE (repeatable)");

    std::vector<std::string> grid;
    std::string table_out = "-";
    auto* sweep = app.add_subcommand("sweep", "cartesian parameter sweep, TSV output");
    sweep->add_option("config", config_path, "scenario JSON")->required();
    sweep->add_option("--grid", grid, "sweep axis KEY=v1,v2,... (repeatable)")->required();
    sweep->add_option("--out", table_out, "table destination (default stdout)");
    sweep->add_option("--set", overrides, "config override KEY=VALUE (repeatable)");

    int rounds = 1;
    uint64_t trials = 100000, adv_seed = 1;
    auto* advantage = app.add_subcommand("advantage", "estimate guessing-game advantage");
    advantage->add_option("--rounds", rounds, "one-bit rounds per session")->required();
    advantage->add_option("--trials", trials, "Monte Carlo sessions");
    advantage->add_option("--seed", adv_seed, "root seed");

    std::string trace_path, verifier = "vehicle", prover = "keyfob";
    auto* check = app.add_subcommand("check", "check authentication properties on a trace");
    check->add_option("trace", trace_path, "trace file")->required();
    check->add_option("--verifier", verifier, "verifier actor name");
    check->add_option("--prover", prover, "prover actor name");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        int err = 0;
        auto sc = load(config_path, overrides, err);
        if (err != PERIM_OK) return err == PERIM_ERR_CONFIG ? config_error() : 2;
        StringHolder report, trace;
        int match = 0;
        uint64_t effective = seed ? seed : env_seed();
        if (perim_run(sc.get(), effective, &report.s, &trace.s, &match) != PERIM_OK)
            return config_error();
        if (!write_file(report_out, report.s)) return config_error();
        if (!trace_out.empty() && !write_file(trace_out, trace.s)) return config_error();
        return match ? 0 : 1;
    }

    if (sweep->parsed()) {
        int err = 0;
        auto sc = load(config_path, overrides, err);
        if (err != PERIM_OK) return err == PERIM_ERR_CONFIG ? config_error() : 2;
        std::vector<const char*> axes;
        for (const auto& g : grid) axes.push_back(g.c_str());
        StringHolder table;
        if (perim_sweep(sc.get(), axes.data(), axes.size(), &table.s) != PERIM_OK)
            return config_error();
        if (!write_file(table_out, table.s)) return config_error();
        return 0;
    }

    if (advantage->parsed()) {
        StringHolder report;
        double adv = 0, z = 0;
        if (perim_advantage(adv_seed, rounds, trials, &report.s, &adv, &z) != PERIM_OK)
            return config_error();
        std::cout << report.s;
        return 0;
    }

    // check
    std::ifstream in(trace_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot read trace file '" << trace_path << "'\n";
        return 2;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    StringHolder report;
    int all_hold = 0;
    int rc = perim_check_trace(buf.str().c_str(), verifier.c_str(), prover.c_str(), &report.s,
                               &all_hold);
    if (rc != PERIM_OK) return config_error();
    std::cout << report.s;
    return all_hold ? 0 : 1;
}
