#include "commitments.hpp"

#include <sstream>

namespace perimeter::commitments {

std::string Transcript::to_line() const {
    std::ostringstream os;
    os << (scheme == Scheme::schnorr ? "schnorr" : "pedersen");
    for (const auto& c : commitments) os << ' ' << c;
    os << ' ' << challenge;
    for (const auto& r : responses) os << ' ' << r;
    return os.str();
}

SchnorrKeypair schnorr_keygen(RngStream& rng, const GroupParams& params) {
    SchnorrKeypair kp;
    kp.a = group::random_scalar(rng, params);
    kp.A = group::modexp(GroupElement{params.g, params}, kp.a, params);
    return kp;
}

SchnorrCommitment schnorr_commit(RngStream& rng, const GroupParams& params) {
    SchnorrCommitment cm;
    cm.x = group::random_scalar(rng, params);
    cm.X = group::modexp(GroupElement{params.g, params}, cm.x, params);
    return cm;
}

Scalar schnorr_respond(const SchnorrKeypair& kp, const SchnorrCommitment& cm,
                       const Scalar& challenge, const GroupParams& params) {
    return group::add(cm.x, group::mul(kp.a, challenge, params), params);
}

bool schnorr_verify(const GroupElement& A, const GroupElement& X, const Scalar& challenge,
                    const Scalar& response, const GroupParams& params) {
    GroupElement g{params.g, params};
    auto lhs = group::modexp(g, response, params);
    auto rhs = group::mul(X, group::modexp(A, challenge, params), params);
    return lhs == rhs;
}

Scalar schnorr_extract(const Scalar& k1, const Scalar& rho1, const Scalar& k2,
                       const Scalar& rho2, const GroupParams& params) {
    auto dk = group::sub(k1, k2, params);
    auto drho = group::sub(rho1, rho2, params);
    return group::mul(drho, group::inverse(dk, params), params);
}

PedersenKeypair pedersen_keygen(RngStream& rng, const GroupParams& params) {
    PedersenKeypair kp;
    kp.x = group::random_scalar(rng, params);
    kp.y = group::random_scalar(rng, params);
    auto gx = group::modexp(GroupElement{params.g, params}, kp.x, params);
    auto hy = group::modexp(GroupElement{params.h, params}, kp.y, params);
    kp.X = group::mul(gx, hy, params);
    return kp;
}

PedersenCommitment pedersen_commit(RngStream& rng, const GroupParams& params) {
    PedersenCommitment cm;
    cm.s1 = group::random_scalar(rng, params);
    cm.s2 = group::random_scalar(rng, params);
    cm.A = group::modexp(GroupElement{params.g, params}, cm.s1, params);
    cm.B = group::modexp(GroupElement{params.h, params}, cm.s2, params);
    cm.C = group::mul(cm.A, cm.B, params);
    return cm;
}

std::pair<Scalar, Scalar> pedersen_respond(const PedersenKeypair& kp,
                                           const PedersenCommitment& cm, const Scalar& challenge,
                                           const GroupParams& params) {
    auto rho1 = group::add(cm.s1, group::mul(challenge, kp.x, params), params);
    auto rho2 = group::add(cm.s2, group::mul(challenge, kp.y, params), params);
    return {rho1, rho2};
}

bool pedersen_verify(const GroupElement& X, const GroupElement& C, const Scalar& challenge,
                     const Scalar& rho1, const Scalar& rho2, const GroupParams& params) {
    auto g_r1 = group::modexp(GroupElement{params.g, params}, rho1, params);
    auto h_r2 = group::modexp(GroupElement{params.h, params}, rho2, params);
    auto lhs = group::mul(g_r1, h_r2, params);
    auto rhs = group::mul(C, group::modexp(X, challenge, params), params);
    return lhs == rhs;
}

}  // namespace perimeter::commitments
