#pragma once

#include <array>
#include <optional>

#include "rng.hpp"
#include "util.hpp"

namespace perimeter::aead {

using Key = std::array<uint8_t, 16>;  // symmetric key K, installed at setup

// AES-128-GCM envelope: iv(12) || ciphertext || tag(16). The IV is drawn
// from the sender's stream; every seal call gets a fresh one.
Bytes seal(const Key& key, RngStream& rng, std::span<const uint8_t> plaintext);

// nullopt on wrong key, truncation, or any bit flip.
std::optional<Bytes> open(const Key& key, std::span<const uint8_t> sealed);

}  // namespace perimeter::aead
