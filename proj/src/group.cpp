#include "group.hpp"

#include <boost/multiprecision/miller_rabin.hpp>
#include <stdexcept>

namespace perimeter::group {

namespace {
thread_local uint64_t g_modexp_count = 0;

bool is_prime(const BigInt& n) {
    if (n < 2) return false;
    std::mt19937 gen(0xb5297a4d);  // fixed seed, deterministic verdicts
    return boost::multiprecision::miller_rabin_test(n, 32, gen);
}
}  // namespace

Scalar::Scalar(BigInt value, const GroupParams& params) {
    v = value % params.q;
    if (v < 0) v += params.q;
}

GroupElement::GroupElement(BigInt value, const GroupParams& params) : v(std::move(value)) {
    if (v < 1 || v >= params.p) throw std::invalid_argument("group element out of range");
    if (boost::multiprecision::powm(v, params.q, params.p) != 1)
        throw std::invalid_argument("value not in the order-q subgroup");
}

GroupElement modexp(const GroupElement& base, const Scalar& exp, const GroupParams& params) {
    ++g_modexp_count;
    GroupElement r;
    r.v = boost::multiprecision::powm(base.v, exp.v, params.p);
    return r;
}

GroupElement mul(const GroupElement& a, const GroupElement& b, const GroupParams& params) {
    GroupElement r;
    r.v = a.v * b.v % params.p;
    return r;
}

Scalar add(const Scalar& a, const Scalar& b, const GroupParams& params) {
    Scalar r;
    r.v = (a.v + b.v) % params.q;
    return r;
}

Scalar mul(const Scalar& a, const Scalar& b, const GroupParams& params) {
    Scalar r;
    r.v = a.v * b.v % params.q;
    return r;
}

Scalar sub(const Scalar& a, const Scalar& b, const GroupParams& params) {
    Scalar r;
    r.v = (a.v - b.v) % params.q;
    if (r.v < 0) r.v += params.q;
    return r;
}

Scalar inverse(const Scalar& a, const GroupParams& params) {
    if (a.v == 0) throw std::invalid_argument("inverse of zero scalar");
    Scalar r;
    r.v = boost::multiprecision::powm(a.v, params.q - 2, params.q);  // q prime
    return r;
}

Scalar random_scalar(RngStream& rng, const GroupParams& params) {
    Scalar r;
    r.v = rng.below_big(params.q);
    return r;
}

std::optional<std::string> validate_params(const GroupParams& params) {
    if (!is_prime(params.p)) return "p not prime";
    if (!is_prime(params.q)) return "q not prime";
    if ((params.p - 1) % params.q != 0) return "q does not divide p-1";
    if (params.g <= 1 || params.g >= params.p) return "g trivial";
    if (boost::multiprecision::powm(params.g, params.q, params.p) != 1)
        return "g order not q";
    if (params.has_h()) {
        if (params.h <= 1 || params.h >= params.p) return "h trivial";
        if (boost::multiprecision::powm(params.h, params.q, params.p) != 1)
            return "h order not q";
        if (params.h == params.g) return "h equals g";
    }
    return std::nullopt;
}

GroupParams desk_params() { return GroupParams{23, 11, 2, 3}; }

uint64_t modexp_count() { return g_modexp_count; }

}  // namespace perimeter::group
