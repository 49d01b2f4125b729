#pragma once

#include <cstdint>
#include <deque>
#include <optional>

#include "hash.hpp"

namespace perimeter::edr {

enum class EventKind : uint8_t {
    acceleration = 0,   // m/s^2
    deceleration = 1,   // m/s^2
    steering_angle = 2, // degrees
    velocity = 3,       // m/s
    seat_position = 4,  // index
    temperature = 5,    // degrees C
};

inline constexpr int kEventKindCount = 6;

// Values are fixed-point with 3 fractional decimal digits (milli-units).
struct EventRecord {
    int64_t t_us = 0;
    EventKind kind = EventKind::acceleration;
    int64_t value_milli = 0;

    bool operator==(const EventRecord&) const = default;
};

// Rolling log of recent vehicle dynamics. Records stay ordered by time;
// entries older than the window (relative to the newest) are evicted, as is
// the oldest entry once capacity is hit.
class MobilityPattern {
public:
    MobilityPattern() = default;
    MobilityPattern(int64_t window_us, size_t capacity)
        : window_us_(window_us), capacity_(capacity) {}

    // Throws std::logic_error on a time-regressing event (simulator bug).
    void record_event(const EventRecord& event);

    hash::Digest digest() const;

    const std::deque<EventRecord>& records() const { return records_; }
    int64_t window_us() const { return window_us_; }

    bool operator==(const MobilityPattern&) const = default;

private:
    int64_t window_us_ = 30'000'000;  // 30 s of simulated drive
    size_t capacity_ = 4096;
    std::deque<EventRecord> records_;
};

// Value-equal copy onto the in-use paired device.
inline MobilityPattern replicate(const MobilityPattern& vehicle_pattern) {
    return vehicle_pattern;
}

// Brute-force search space (kinds * levels)^slots for an EDR-guessing
// adversary; nullopt when the product exceeds 2^64.
std::optional<uint64_t> guess_space_size(uint64_t kinds, uint64_t levels, uint64_t slots);

}  // namespace perimeter::edr
