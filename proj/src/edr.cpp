#include "edr.hpp"

#include <stdexcept>

namespace perimeter::edr {

void MobilityPattern::record_event(const EventRecord& event) {
    if (!records_.empty() && event.t_us < records_.back().t_us)
        throw std::logic_error("EDR event time regression");
    records_.push_back(event);
    const int64_t horizon = event.t_us - window_us_;
    while (!records_.empty() && records_.front().t_us < horizon) records_.pop_front();
    while (records_.size() > capacity_) records_.pop_front();
}

hash::Digest MobilityPattern::digest() const {
    // Canonical serialization: count-prefixed records, each as
    // (t: 8-byte BE microseconds, kind: 1 byte, value: 8-byte BE milli).
    Bytes buf;
    put_be64(buf, records_.size());
    for (const auto& r : records_) {
        put_be64_signed(buf, r.t_us);
        buf.push_back(static_cast<uint8_t>(r.kind));
        put_be64_signed(buf, r.value_milli);
    }
    return hash::sha256(buf);
}

std::optional<uint64_t> guess_space_size(uint64_t kinds, uint64_t levels, uint64_t slots) {
    if (kinds < 1 || levels < 1 || slots < 1)
        throw std::invalid_argument("guess_space_size: counts must be >= 1");
    if (kinds > UINT64_MAX / levels) return std::nullopt;
    const uint64_t base = kinds * levels;
    uint64_t result = 1;
    for (uint64_t i = 0; i < slots; ++i) {
        if (base != 0 && result > UINT64_MAX / base) return std::nullopt;
        result *= base;
    }
    return result;
}

}  // namespace perimeter::edr
