#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "util.hpp"

namespace perimeter::trace {

// One event per line: `t_us actor kind payload...`, space-separated decimal,
// payload tokens as key=value. The header line names the hash function and
// build id.
enum class Kind {
    send,
    receive,
    relay,
    claim_running,
    claim_commit,
    verdict,
    commitment_transcript,
};

const char* to_string(Kind k);
std::optional<Kind> kind_from_string(const std::string& s);

struct TraceEvent {
    int64_t t_us = 0;
    std::string actor;
    Kind kind = Kind::send;
    std::vector<std::pair<std::string, std::string>> payload;

    std::string payload_get(const std::string& key) const;
};

class Trace {
public:
    void add(int64_t t_us, const std::string& actor, Kind kind,
             std::vector<std::pair<std::string, std::string>> payload = {});

    const std::vector<TraceEvent>& events() const { return events_; }

    // Serializes with the standard header; byte-identical across runs.
    std::string render(uint64_t seed) const;

    // Throws std::runtime_error naming the offending line on malformed input.
    static Trace parse(const std::string& text);

private:
    std::vector<TraceEvent> events_;
};

inline constexpr const char* kBuildId = "perimeter-0.1.0";

}  // namespace perimeter::trace
