#include "perimeter.h"

#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "properties.hpp"
#include "scenario.hpp"
#include "sim.hpp"
#include "trace.hpp"

using namespace perimeter;

struct perim_scenario {
    sim::Scenario sc;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

int fail(int code, const std::string& msg) {
    g_last_error = msg;
    return code;
}

}  // namespace

extern "C" {

const char* perim_version(void) { return trace::kBuildId; }

int perim_scenario_load_file(const char* path, perim_scenario** out) {
    if (!path || !out) return fail(PERIM_ERR_ARG, "null argument");
    try {
        *out = new perim_scenario{sim::load_scenario_file(path)};
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_CONFIG, e.what());
    }
}

int perim_scenario_load_json(const char* json_text, perim_scenario** out) {
    if (!json_text || !out) return fail(PERIM_ERR_ARG, "null argument");
    try {
        *out = new perim_scenario{sim::load_scenario(json_text)};
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_CONFIG, e.what());
    }
}

void perim_scenario_free(perim_scenario* sc) { delete sc; }

int perim_scenario_override(perim_scenario* sc, const char* dotted_key, const char* value) {
    if (!sc || !dotted_key || !value) return fail(PERIM_ERR_ARG, "null argument");
    try {
        sc->sc = sim::with_override(sc->sc, dotted_key, value);
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_CONFIG, e.what());
    }
}

int perim_run(const perim_scenario* sc, uint64_t seed_override, char** report_out,
              char** trace_out, int* verdict_match) {
    if (!sc) return fail(PERIM_ERR_ARG, "null scenario");
    try {
        uint64_t seed = seed_override ? seed_override : sc->sc.seed;
        auto r = sim::run_scenario(sc->sc, seed);
        if (report_out) *report_out = dup_string(sim::render_report(sc->sc, r));
        if (trace_out) *trace_out = dup_string(r.trace.render(seed));
        if (verdict_match) *verdict_match = sim::expect_match(sc->sc, r.verdict) ? 1 : 0;
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_INTERNAL, e.what());
    }
}

int perim_monte_carlo(const perim_scenario* sc, uint64_t* trials, uint64_t* accepts,
                      uint64_t* reinits) {
    if (!sc) return fail(PERIM_ERR_ARG, "null scenario");
    try {
        auto mc = sim::monte_carlo(sc->sc);
        if (trials) *trials = mc.trials;
        if (accepts) *accepts = mc.accepts;
        if (reinits) *reinits = mc.reinits;
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_INTERNAL, e.what());
    }
}

int perim_advantage(uint64_t seed, int rounds, uint64_t trials, char** report_out,
                    double* advantage_out, double* z_out) {
    if (rounds < 0) return fail(PERIM_ERR_ARG, "rounds must be >= 0");
    try {
        auto res = sim::estimate_advantage(seed, rounds, trials);
        if (report_out) *report_out = dup_string(res.render());
        if (advantage_out) *advantage_out = res.advantage;
        if (z_out) *z_out = res.z;
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_INTERNAL, e.what());
    }
}

int perim_check_trace(const char* trace_text, const char* verifier, const char* prover,
                      char** report_out, int* all_hold) {
    if (!trace_text || !verifier || !prover) return fail(PERIM_ERR_ARG, "null argument");
    try {
        auto tr = trace::Trace::parse(trace_text);
        auto report = properties::check_all(tr, verifier, prover);
        if (report_out) *report_out = dup_string(report.render(verifier, prover));
        if (all_hold)
            *all_hold = report.aliveness.holds && report.weak_agreement.holds &&
                                report.noninjective_agreement.holds && report.agreement.holds
                            ? 1
                            : 0;
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_TRACE, e.what());
    }
}

int perim_sweep(const perim_scenario* sc, const char* const* axes, size_t axis_count,
                char** table_out) {
    if (!sc || (axis_count > 0 && !axes)) return fail(PERIM_ERR_ARG, "null argument");
    try {
        std::vector<sim::SweepAxis> grid;
        for (size_t i = 0; i < axis_count; ++i) {
            std::string spec = axes[i];
            auto eq = spec.find('=');
            if (eq == std::string::npos || eq == 0)
                return fail(PERIM_ERR_CONFIG, "sweep axis '" + spec + "': expected KEY=v1,v2,...");
            sim::SweepAxis axis{spec.substr(0, eq), {}};
            std::string rest = spec.substr(eq + 1);
            size_t pos = 0;
            while (pos <= rest.size()) {
                auto comma = rest.find(',', pos);
                if (comma == std::string::npos) comma = rest.size();
                axis.second.push_back(rest.substr(pos, comma - pos));
                pos = comma + 1;
            }
            if (axis.second.empty() || axis.second.front().empty())
                return fail(PERIM_ERR_CONFIG, "sweep axis '" + spec + "': empty value list");
            grid.push_back(std::move(axis));
        }
        if (table_out) *table_out = dup_string(sim::sweep(sc->sc, grid));
        return PERIM_OK;
    } catch (const std::exception& e) {
        return fail(PERIM_ERR_INTERNAL, e.what());
    }
}

const char* perim_last_error(void) { return g_last_error.c_str(); }

void perim_string_free(char* s) { std::free(s); }

}  // extern "C"
