#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <random>
#include <string>

#include "util.hpp"

namespace perimeter {

using BigInt = boost::multiprecision::cpp_int;

// Deterministic per-actor random stream. All draws go through rejection
// sampling on raw engine words; std:: distributions are implementation
// defined and would break cross-platform trace identity.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    // Stream derived as low 64 bits of SHA-256(root-seed || actor-id).
    static RngStream derive(uint64_t root_seed, const std::string& actor);

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, bound); bound > 0.
    uint64_t below(uint64_t bound);
    BigInt below_big(const BigInt& bound);

    Bytes bytes(size_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace perimeter
