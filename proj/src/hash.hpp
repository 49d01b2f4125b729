#pragma once

#include <array>
#include <initializer_list>
#include <span>

#include "util.hpp"

namespace perimeter::hash {

// Hash function fixed for the whole build; named in report headers.
inline constexpr const char* kHashName = "SHA-256";

using Digest = std::array<uint8_t, 32>;

Digest sha256(std::span<const uint8_t> data);
Digest sha256_cat(std::initializer_list<std::span<const uint8_t>> parts);

// Keyed mode: digest of (key || parts...).
Digest prf(std::span<const uint8_t> key, std::initializer_list<std::span<const uint8_t>> parts);

// Per-thread digest-invocation counter, sampled by the protocol cost meters.
uint64_t digest_count();

}  // namespace perimeter::hash
