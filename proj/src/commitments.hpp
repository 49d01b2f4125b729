#pragma once

#include <string>
#include <vector>

#include "group.hpp"

namespace perimeter::commitments {

using group::GroupElement;
using group::GroupParams;
using group::Scalar;

enum class Scheme { schnorr, pedersen };

struct SchnorrKeypair {
    Scalar a;        // long-term secret
    GroupElement A;  // g^a
};

struct SchnorrCommitment {
    Scalar x;        // ephemeral, prover-side only
    GroupElement X;  // g^x
};

struct PedersenKeypair {
    Scalar x;
    Scalar y;
    GroupElement X;  // g^x * h^y
};

struct PedersenCommitment {
    Scalar s1;
    Scalar s2;
    GroupElement A;  // g^s1
    GroupElement B;  // h^s2
    GroupElement C;  // A * B
};

// Public transcript of one interactive run, fixed field order for traces:
// scheme tag, commitment element(s), challenge, response(s).
struct Transcript {
    Scheme scheme;
    std::vector<BigInt> commitments;
    BigInt challenge;
    std::vector<BigInt> responses;

    std::string to_line() const;  // space-separated decimal
};

SchnorrKeypair schnorr_keygen(RngStream& rng, const GroupParams& params);
SchnorrCommitment schnorr_commit(RngStream& rng, const GroupParams& params);
Scalar schnorr_respond(const SchnorrKeypair& kp, const SchnorrCommitment& cm,
                       const Scalar& challenge, const GroupParams& params);
bool schnorr_verify(const GroupElement& A, const GroupElement& X, const Scalar& challenge,
                    const Scalar& response, const GroupParams& params);

// Special soundness: two accepting transcripts with equal X and distinct
// challenges determine the long-term key a = (rho - rho') / (k - k').
Scalar schnorr_extract(const Scalar& k1, const Scalar& rho1, const Scalar& k2,
                       const Scalar& rho2, const GroupParams& params);

PedersenKeypair pedersen_keygen(RngStream& rng, const GroupParams& params);
PedersenCommitment pedersen_commit(RngStream& rng, const GroupParams& params);
std::pair<Scalar, Scalar> pedersen_respond(const PedersenKeypair& kp,
                                           const PedersenCommitment& cm, const Scalar& challenge,
                                           const GroupParams& params);
// Accept iff g^rho1 * h^rho2 = C * X^k. The printed check X*C^k does not
// hold for honest runs of the stated message flow; see the README note.
bool pedersen_verify(const GroupElement& X, const GroupElement& C, const Scalar& challenge,
                     const Scalar& rho1, const Scalar& rho2, const GroupParams& params);

}  // namespace perimeter::commitments
