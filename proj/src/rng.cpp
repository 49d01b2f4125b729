#include "rng.hpp"

#include <stdexcept>

#include "hash.hpp"

namespace perimeter {

RngStream RngStream::derive(uint64_t root_seed, const std::string& actor) {
    Bytes input;
    put_be64(input, root_seed);
    input.insert(input.end(), actor.begin(), actor.end());
    auto d = hash::sha256(input);
    return RngStream(get_be64(d.data()));
}

uint64_t RngStream::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below: zero bound");
    // Reject draws above the largest multiple of bound.
    const uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    for (;;) {
        uint64_t v = engine_();
        if (v <= limit) return v % bound;
    }
}

BigInt RngStream::below_big(const BigInt& bound) {
    if (bound <= 0) throw std::invalid_argument("below_big: non-positive bound");
    if (bound <= UINT64_MAX) return BigInt(below(static_cast<uint64_t>(bound)));
    const size_t bits = boost::multiprecision::msb(bound) + 1;
    const size_t words = (bits + 63) / 64;
    for (;;) {
        BigInt v = 0;
        for (size_t i = 0; i < words; ++i) v = (v << 64) | engine_();
        v >>= (words * 64 - bits);
        if (v < bound) return v;
    }
}

Bytes RngStream::bytes(size_t n) {
    Bytes out;
    out.reserve(n + 8);
    while (out.size() < n) put_be64(out, engine_());
    out.resize(n);
    return out;
}

}  // namespace perimeter
