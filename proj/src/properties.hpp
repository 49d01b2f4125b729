#pragma once

#include <string>
#include <vector>

#include "trace.hpp"

namespace perimeter::properties {

// Lowe-hierarchy trace checker. Claims are instrumented by honest protocol
// code only: a prover emits claim-running just before its final message, a
// verifier emits claim-commit at accept time. Session data is the triple
// (nonce, challenge, response digest); run identity is the nonce.

struct PropertyResult {
    bool holds = true;
    std::vector<size_t> witness;  // event indexes demonstrating the violation
};

struct PropertyReport {
    PropertyResult aliveness;
    PropertyResult weak_agreement;
    PropertyResult noninjective_agreement;
    PropertyResult agreement;

    std::string render(const std::string& verifier, const std::string& prover) const;
};

// All checks throw std::runtime_error on malformed traces (e.g. a commit
// claim with no session data).
PropertyResult check_aliveness(const trace::Trace& tr, const std::string& verifier,
                               const std::string& prover);
PropertyResult check_weak_agreement(const trace::Trace& tr, const std::string& verifier,
                                    const std::string& prover);
PropertyResult check_noninjective_agreement(const trace::Trace& tr, const std::string& verifier,
                                            const std::string& prover);
PropertyResult check_agreement(const trace::Trace& tr, const std::string& verifier,
                               const std::string& prover);

PropertyReport check_all(const trace::Trace& tr, const std::string& verifier,
                         const std::string& prover);

}  // namespace perimeter::properties
