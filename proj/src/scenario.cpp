#include "scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace perimeter::sim {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ConfigError("config key '" + key + "': " + what);
}

int64_t seconds_to_us(double s) { return std::llround(s * 1e6); }

BigInt parse_bigint(const json& v, const std::string& key) {
    if (v.is_number_unsigned() || v.is_number_integer())
        return BigInt(v.get<int64_t>());
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        try {
            return BigInt(s);  // boost accepts decimal and 0x-prefixed hex
        } catch (const std::exception&) {
            fail(key, "not a valid integer literal");
        }
    }
    fail(key, "expected integer or string");
}

edr::EventKind event_kind_from(const std::string& s, const std::string& key) {
    if (s == "acceleration") return edr::EventKind::acceleration;
    if (s == "deceleration") return edr::EventKind::deceleration;
    if (s == "steering-angle") return edr::EventKind::steering_angle;
    if (s == "velocity") return edr::EventKind::velocity;
    if (s == "seat-position") return edr::EventKind::seat_position;
    if (s == "temperature") return edr::EventKind::temperature;
    fail(key, "unknown event kind '" + s + "'");
}

AdversaryMode mode_from(const std::string& s) {
    if (s == "none") return AdversaryMode::none;
    if (s == "brute_force_relay") return AdversaryMode::brute_force_relay;
    if (s == "pure_relay") return AdversaryMode::pure_relay;
    if (s == "distance_fraud_early") return AdversaryMode::distance_fraud_early;
    if (s == "mafia_fraud") return AdversaryMode::mafia_fraud;
    if (s == "terrorist_fraud") return AdversaryMode::terrorist_fraud;
    if (s == "edr_guess") return AdversaryMode::edr_guess;
    fail("adversary.mode", "unknown mode '" + s + "'");
}

double number_at(const json& j, const std::string& key, double fallback, bool* present = nullptr) {
    std::string jp = key;
    for (auto& c : jp)
        if (c == '.') c = '/';
    json::json_pointer p("/" + jp);
    if (!j.contains(p)) {
        if (present) *present = false;
        return fallback;
    }
    if (present) *present = true;
    const json& v = j.at(p);
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
}

}  // namespace

std::array<double, 2> WorldState::holder_pos(int64_t t_us) const {
    if (holder_path.empty()) return vehicle_pos;
    if (t_us <= holder_path.front().t_us)
        return {holder_path.front().x, holder_path.front().y};
    for (size_t i = 1; i < holder_path.size(); ++i) {
        const auto& a = holder_path[i - 1];
        const auto& b = holder_path[i];
        if (t_us <= b.t_us) {
            const double f = b.t_us == a.t_us
                                 ? 1.0
                                 : static_cast<double>(t_us - a.t_us) /
                                       static_cast<double>(b.t_us - a.t_us);
            return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
        }
    }
    return {holder_path.back().x, holder_path.back().y};
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.raw = j;
    if (j.contains("id")) sc.id = j.at("id").get<std::string>();

    // group.*
    if (!j.contains("group")) fail("group", "missing");
    const json& g = j.at("group");
    for (const char* k : {"p", "q", "g"})
        if (!g.contains(k)) fail(std::string("group.") + k, "missing");
    sc.group_params.p = parse_bigint(g.at("p"), "group.p");
    sc.group_params.q = parse_bigint(g.at("q"), "group.q");
    sc.group_params.g = parse_bigint(g.at("g"), "group.g");
    sc.group_params.h = g.contains("h") ? parse_bigint(g.at("h"), "group.h") : BigInt(0);
    if (auto v = group::validate_params(sc.group_params)) fail("group", *v);

    // timing.*
    sc.timing.t_travel_max_us = seconds_to_us(number_at(j, "timing.t_travel_max", 0.005));
    sc.timing.t_travel_min_us = seconds_to_us(number_at(j, "timing.t_travel_min", 0.0));
    sc.timing.t_epsilon_us = seconds_to_us(number_at(j, "timing.t_epsilon", 0.001));
    sc.timing.vel_epsilon_milli =
        std::llround(number_at(j, "timing.vel_epsilon", 0.1) * 1000.0);
    sc.timing.clock_drift_bound_us = seconds_to_us(number_at(j, "timing.drift", 0.0));
    sc.timing.gait_window_us = seconds_to_us(number_at(j, "timing.gait_window", 2.0));
    sc.timing.vehicle_proc_us = seconds_to_us(number_at(j, "timing.vehicle_proc", 0.0));
    if (j.contains("timing")) {
        const json& t = j.at("timing");
        if (t.contains("timing_check")) sc.timing.timing_check = t.at("timing_check").get<bool>();
        if (t.contains("gait_check")) sc.timing.gait_check = t.at("gait_check").get<bool>();
    }
    if (sc.timing.t_epsilon_us < 0 || sc.timing.t_travel_max_us < 0 ||
        sc.timing.vel_epsilon_milli < 0 || sc.timing.clock_drift_bound_us < 0)
        fail("timing", "thresholds must be non-negative");

    // world.*
    if (j.contains("world")) {
        const json& w = j.at("world");
        if (w.contains("vehicle_pos")) {
            auto v = w.at("vehicle_pos");
            if (!v.is_array() || v.size() != 2) fail("world.vehicle_pos", "expected [x, y]");
            sc.world.vehicle_pos = {v[0].get<double>(), v[1].get<double>()};
        }
        if (w.contains("holder_path")) {
            for (const auto& p : w.at("holder_path")) {
                if (!p.is_array() || p.size() != 3)
                    fail("world.holder_path", "expected [t_seconds, x, y] triples");
                sc.world.holder_path.push_back(
                    Waypoint{seconds_to_us(p[0].get<double>()), p[1].get<double>(),
                             p[2].get<double>()});
            }
            for (size_t i = 1; i < sc.world.holder_path.size(); ++i)
                if (sc.world.holder_path[i].t_us < sc.world.holder_path[i - 1].t_us)
                    fail("world.holder_path", "waypoints must be time-ordered");
        }
        if (w.contains("signal_speed")) sc.world.signal_speed = w.at("signal_speed").get<double>();
        if (sc.world.signal_speed <= 0) fail("world.signal_speed", "must be positive");
        if (w.contains("jitter")) sc.world.jitter_us = seconds_to_us(w.at("jitter").get<double>());
        if (w.contains("kf_clock_offset"))
            sc.world.kf_clock_offset_us = seconds_to_us(w.at("kf_clock_offset").get<double>());
    }

    // adversary.*
    if (j.contains("adversary")) {
        const json& a = j.at("adversary");
        if (a.contains("mode")) sc.adversary.mode = mode_from(a.at("mode").get<std::string>());
        if (a.contains("t_relay"))
            sc.adversary.t_relay_us = seconds_to_us(a.at("t_relay").get<double>());
        if (sc.adversary.t_relay_us < 0) fail("adversary.t_relay", "must be non-negative");
        if (a.contains("consistency")) {
            const std::string c = a.at("consistency").get<std::string>();
            if (c == "consistent")
                sc.adversary.consistency = Consistency::consistent;
            else if (c == "inconsistent")
                sc.adversary.consistency = Consistency::inconsistent;
            else
                fail("adversary.consistency", "expected consistent|inconsistent");
        }
        if (a.contains("schedule"))
            for (const auto& d : a.at("schedule"))
                sc.adversary.schedule_us.push_back(seconds_to_us(d.get<double>()));
        if (a.contains("pos")) {
            auto v = a.at("pos");
            if (!v.is_array() || v.size() != 2) fail("adversary.pos", "expected [x, y]");
            sc.adversary.pos = {v[0].get<double>(), v[1].get<double>()};
        }
        if (a.contains("pos2")) {
            auto v = a.at("pos2");
            if (!v.is_array() || v.size() != 2) fail("adversary.pos2", "expected [x, y]");
            sc.adversary.pos2 = {v[0].get<double>(), v[1].get<double>()};
        }
        if (a.contains("variant")) sc.adversary.variant = a.at("variant").get<std::string>();
        if (a.contains("guess_kinds")) sc.guess_kinds = a.at("guess_kinds").get<uint64_t>();
        if (a.contains("guess_levels")) sc.guess_levels = a.at("guess_levels").get<uint64_t>();
        if (a.contains("guess_slots")) sc.guess_slots = a.at("guess_slots").get<uint64_t>();
        if (sc.adversary.consistency == Consistency::inconsistent &&
            sc.adversary.schedule_us.empty()) {
            // Default inconsistent schedule: silent hop 1, doubled hop 2.
            sc.adversary.schedule_us = {0, 2 * sc.adversary.t_relay_us, sc.adversary.t_relay_us};
        }
    }

    // drive_script: [t_seconds, kind, value] triples
    if (j.contains("drive_script")) {
        for (const auto& e : j.at("drive_script")) {
            if (!e.is_array() || e.size() != 3)
                fail("drive_script", "expected [t_seconds, kind, value] triples");
            DriveEvent ev;
            ev.t_us = seconds_to_us(e[0].get<double>());
            ev.kind = event_kind_from(e[1].get<std::string>(), "drive_script");
            ev.value_milli = std::llround(e[2].get<double>() * 1000.0);
            sc.drive_script.push_back(ev);
        }
        for (size_t i = 1; i < sc.drive_script.size(); ++i)
            if (sc.drive_script[i].t_us < sc.drive_script[i - 1].t_us)
                fail("drive_script", "events must be time-ordered");
    }

    if (j.contains("scheme")) {
        const std::string s = j.at("scheme").get<std::string>();
        if (s == "basic")
            sc.scheme = Scheme::basic;
        else if (s == "keyfob")
            sc.scheme = Scheme::keyfob;
        else
            fail("scheme", "expected basic|keyfob");
    }
    if (j.contains("commitment")) {
        const std::string s = j.at("commitment").get<std::string>();
        if (s == "none")
            sc.backend = protocol::Backend::none;
        else if (s == "schnorr")
            sc.backend = protocol::Backend::schnorr;
        else if (s == "pedersen")
            sc.backend = protocol::Backend::pedersen;
        else
            fail("commitment", "expected none|schnorr|pedersen");
        if (sc.backend == protocol::Backend::pedersen && !sc.group_params.has_h())
            fail("group.h", "required for the pedersen backend");
    }
    if (j.contains("stale_events")) sc.stale_events = j.at("stale_events").get<int>();
    if (j.contains("trials")) sc.trials = j.at("trials").get<uint64_t>();
    if (j.contains("seed")) sc.seed = j.at("seed").get<uint64_t>();
    if (j.contains("expect")) {
        sc.expect = j.at("expect").get<std::string>();
        if (sc.expect != "accept" && sc.expect != "reject" && sc.expect != "reinit")
            fail("expect", "expected accept|reject|reinit");
    }
    return sc;
}

Scenario load_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return scenario_from_json(j);
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_scenario(ss.str());
}

Scenario with_override(const Scenario& base, const std::string& dotted_key,
                       const std::string& value) {
    json j = base.raw;
    std::string path = "/" + dotted_key;
    for (auto& c : path)
        if (c == '.') c = '/';
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // plain string
    }
    j[json::json_pointer(path)] = parsed;
    return scenario_from_json(j);
}

}  // namespace perimeter::sim
