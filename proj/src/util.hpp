#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

namespace perimeter {

using Bytes = std::vector<uint8_t>;

inline void put_be64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint64_t get_be64(const uint8_t* p) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
    return v;
}

inline void put_be64_signed(Bytes& out, int64_t v) { put_be64(out, static_cast<uint64_t>(v)); }
inline int64_t get_be64_signed(const uint8_t* p) { return static_cast<int64_t>(get_be64(p)); }

std::string to_hex(std::span<const uint8_t> data);
Bytes from_hex(const std::string& hex);  // throws std::invalid_argument

}  // namespace perimeter
