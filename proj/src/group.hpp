#pragma once

#include <optional>
#include <string>

#include "rng.hpp"

namespace perimeter::group {

// Prime-order subgroup of Z_p^*, shared by the Schnorr and Pedersen
// protocols. h is the second independent generator; zero when unused.
struct GroupParams {
    BigInt p;
    BigInt q;
    BigInt g;
    BigInt h;  // 0 = absent

    bool has_h() const { return h != 0; }
};

// Exponent in [0, q); reduced at construction.
struct Scalar {
    BigInt v;
    Scalar() = default;
    Scalar(BigInt value, const GroupParams& params);

    bool operator==(const Scalar&) const = default;
};

// Subgroup element in [1, p).
struct GroupElement {
    BigInt v;
    GroupElement() = default;
    GroupElement(BigInt value, const GroupParams& params);  // throws on non-membership

    bool operator==(const GroupElement&) const = default;
};

GroupElement modexp(const GroupElement& base, const Scalar& exp, const GroupParams& params);
GroupElement mul(const GroupElement& a, const GroupElement& b, const GroupParams& params);

Scalar add(const Scalar& a, const Scalar& b, const GroupParams& params);
Scalar mul(const Scalar& a, const Scalar& b, const GroupParams& params);
Scalar sub(const Scalar& a, const Scalar& b, const GroupParams& params);
Scalar inverse(const Scalar& a, const GroupParams& params);  // a != 0

Scalar random_scalar(RngStream& rng, const GroupParams& params);

// nullopt = ok, otherwise names the first violated invariant.
std::optional<std::string> validate_params(const GroupParams& params);

// Desk-scale defaults: p=23, q=11, g=2, h=3 (both of order 11 mod 23).
GroupParams desk_params();

// Per-thread modular-exponentiation counter, sampled by the cost meters.
uint64_t modexp_count();

}  // namespace perimeter::group
