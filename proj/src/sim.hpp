#pragma once
// Deterministic session simulator: runs one scenario end to end on a virtual
// clock, producing a verdict, metrics, a trace, and property-check results.

#include <cstdint>
#include <string>
#include <vector>

#include "properties.hpp"
#include "protocol.hpp"
#include "scenario.hpp"
#include "trace.hpp"

namespace perimeter::sim {

struct Verdict {
    bool accepted = false;
    protocol::Reason reason = protocol::Reason::bad_response;
    int reinits = 0;
    std::string to_string() const;
};

struct RunResult {
    Verdict verdict;
    protocol::SessionMetrics metrics;
    protocol::CostCounters cost_initiator;
    protocol::CostCounters cost_verifier;
    trace::Trace trace;
    uint64_t seed = 0;
    properties::PropertyReport props;
    std::string initiator_label;
    std::string verifier_label;
};

RunResult run_scenario(const Scenario& sc);
RunResult run_scenario(const Scenario& sc, uint64_t seed);

// True when the verdict matches the scenario's `expect` field.
bool expect_match(const Scenario& sc, const Verdict& v);

std::string render_report(const Scenario& sc, const RunResult& r);

struct MonteCarloResult {
    uint64_t trials = 0;
    uint64_t accepts = 0;
    uint64_t reinits = 0;  // runs that saw at least one reinit
};
MonteCarloResult monte_carlo(const Scenario& sc);
MonteCarloResult monte_carlo(const Scenario& sc, uint64_t trials);

// Guessing game from the analysis section: per round the verifier draws a
// uniform bit and the adversary must match it; a session is won when every
// round matches.  Reports the empirical advantage against 2^-rounds.
struct AdvantageResult {
    int rounds = 0;
    uint64_t trials = 0;
    uint64_t wins = 0;
    double advantage = 0.0;
    double analytic = 0.0;
    double sigma = 0.0;
    double z = 0.0;
    std::string render() const;
};
AdvantageResult estimate_advantage(uint64_t seed, int rounds, uint64_t trials);

// Cartesian sweep over config overrides; returns a TSV table, one row per
// parameter combination.
using SweepAxis = std::pair<std::string, std::vector<std::string>>;
std::string sweep(const Scenario& base, const std::vector<SweepAxis>& grid);

}  // namespace perimeter::sim
