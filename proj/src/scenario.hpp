#pragma once

#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "edr.hpp"
#include "group.hpp"
#include "protocol.hpp"

namespace perimeter::sim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AdversaryMode {
    none,
    brute_force_relay,
    pure_relay,
    distance_fraud_early,
    mafia_fraud,
    terrorist_fraud,
    edr_guess,
};

enum class Consistency { consistent, inconsistent };

struct AdversaryConfig {
    AdversaryMode mode = AdversaryMode::none;
    int64_t t_relay_us = 0;
    Consistency consistency = Consistency::consistent;
    std::vector<int64_t> schedule_us;  // per-hop added delay when inconsistent
    std::array<double, 2> pos{0.0, 0.0};
    std::array<double, 2> pos2{0.0, 0.0};  // second colluder (mafia bridge)
    std::string variant;  // distance fraud: "random" | "replay"; terrorist: "", "stale-digest", "no-pedometer"
};

struct Waypoint {
    int64_t t_us = 0;
    double x = 0, y = 0;
};

struct WorldState {
    std::array<double, 2> vehicle_pos{0.0, 0.0};
    std::vector<Waypoint> holder_path;      // piecewise linear, clamped at ends
    double signal_speed = 50000.0;          // m/s; 100 m -> 2 ms
    int64_t jitter_us = 0;                  // uniform per-hop noise bound
    int64_t kf_clock_offset_us = 0;         // actual keyfob clock drift

    std::array<double, 2> holder_pos(int64_t t_us) const;
};

struct DriveEvent {
    int64_t t_us = 0;
    edr::EventKind kind = edr::EventKind::velocity;
    int64_t value_milli = 0;
};

enum class Scheme { basic, keyfob };

struct Scenario {
    std::string id = "scenario";
    group::GroupParams group_params = group::desk_params();
    protocol::TimingPolicy timing;
    WorldState world;
    AdversaryConfig adversary;
    std::vector<DriveEvent> drive_script;
    Scheme scheme = Scheme::keyfob;
    protocol::Backend backend = protocol::Backend::none;
    int stale_events = 0;  // keyfob pattern replicated this many events early
    uint64_t trials = 1;
    uint64_t seed = 1;
    std::string expect;  // accept | reject | reinit | empty (no expectation)

    // EDR-guessing experiment parameters.
    uint64_t guess_kinds = 2, guess_levels = 4, guess_slots = 3;

    nlohmann::json raw;  // retained for sweep overrides
};

// Both throw ConfigError naming the offending key.
Scenario scenario_from_json(const nlohmann::json& j);
Scenario load_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

// Dotted-key override (e.g. "adversary.t_relay=0.002"); value parsed as
// JSON when possible, else taken as a string. Returns the updated scenario.
Scenario with_override(const Scenario& base, const std::string& dotted_key,
                       const std::string& value);

}  // namespace perimeter::sim
