#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "aead.hpp"
#include "commitments.hpp"
#include "edr.hpp"
#include "hash.hpp"

namespace perimeter::protocol {

using aead::Key;
using hash::Digest;

enum class Role : uint8_t { vehicle = 0, peripheral = 1, keyfob = 2, user = 3 };

struct Identity {
    Role role = Role::peripheral;
    std::array<uint8_t, 16> id{};
    std::string label;  // trace actor name

    static Identity make(Role role, const std::string& label);
    bool operator==(const Identity& o) const { return role == o.role && id == o.id; }
    bool operator<(const Identity& o) const { return id < o.id; }
};

using Nonce = std::array<uint8_t, 16>;
using ChallengeValue = std::array<uint8_t, 16>;

enum class Reason : uint8_t {
    digest_mismatch,
    unknown_identity,
    nonce_replay,
    nonce_mismatch,
    vehicle_id_mismatch,
    bad_response,
    propagation_excess,
    timestamp_implausible,
    gait_mismatch,
    integrity_failure,
    malformed_message,
};

const char* to_string(Reason r);

struct Reject {
    Reason reason;
};

template <typename T>
using Result = std::variant<T, Reject>;

// Fixed-point (3 fractional decimal digits) gait tuple, measured
// independently at keyfob (pedometer) and vehicle (window reconstruction).
struct GaitObservation {
    int64_t displacement_milli = 0;  // meters
    int64_t duration_milli = 0;      // seconds
    int64_t velocity_milli = 0;      // m/s

    static GaitObservation from_window(double displacement_m, int64_t window_us);
    bool operator==(const GaitObservation&) const = default;
};

// Reactive-commitment backend riding along inside the handshake messages.
enum class Backend : uint8_t { none = 0, schnorr = 1, pedersen = 2 };

// --- Message bodies (AEAD-protected). Wire layout: 1-byte kind, then the
// fields in declaration order, big-endian; bigint extension fields as
// 1-byte count + (2-byte length, magnitude bytes) each.

struct BasicRequest {
    Digest edr_digest{};
    Identity id_pd;
    Nonce nonce{};
};

struct BasicChallenge {
    ChallengeValue challenge{};
    Identity id_v;
    Nonce nonce{};
};

struct BasicResponse {
    Digest response{};
    Nonce nonce{};
};

struct KeyfobRequest {
    Digest edr_digest{};
    int64_t t_kf_send_us = 0;
    Nonce nonce{};
    std::vector<BigInt> commit_ext;  // backend commitment elements
};

struct KeyfobChallenge {
    Digest hashed_vehicle_id{};
    ChallengeValue challenge{};
    int64_t t_v_receive_us = 0;
    int64_t t_v_send_us = 0;
    Nonce nonce{};
    std::vector<BigInt> challenge_ext;  // backend challenge scalar
};

struct KeyfobResponse {
    Digest hashed_response{};
    GaitObservation gait;
    int64_t t_kf_cur_us = 0;
    Nonce nonce{};
    std::vector<BigInt> response_ext;  // backend response scalars
};

Bytes serialize(const BasicRequest&);
Bytes serialize(const BasicChallenge&);
Bytes serialize(const BasicResponse&);
Bytes serialize(const KeyfobRequest&);
Bytes serialize(const KeyfobChallenge&);
Bytes serialize(const KeyfobResponse&);

// Parses a decrypted body of the expected kind; nullopt on malformed input.
template <typename M>
std::optional<M> parse(std::span<const uint8_t> body);

template <> std::optional<BasicRequest> parse<BasicRequest>(std::span<const uint8_t>);
template <> std::optional<BasicChallenge> parse<BasicChallenge>(std::span<const uint8_t>);
template <> std::optional<BasicResponse> parse<BasicResponse>(std::span<const uint8_t>);
template <> std::optional<KeyfobRequest> parse<KeyfobRequest>(std::span<const uint8_t>);
template <> std::optional<KeyfobChallenge> parse<KeyfobChallenge>(std::span<const uint8_t>);
template <> std::optional<KeyfobResponse> parse<KeyfobResponse>(std::span<const uint8_t>);

struct TimingPolicy {
    int64_t t_travel_max_us = 5000;
    int64_t t_travel_min_us = 0;
    int64_t t_epsilon_us = 1000;
    int64_t vel_epsilon_milli = 100;  // 0.1 m/s
    int64_t clock_drift_bound_us = 0;
    int64_t gait_window_us = 2'000'000;   // keyfob-side observation dwell
    int64_t vehicle_proc_us = 0;          // challenge processing delay P
    bool timing_check = true;
    bool gait_check = true;
};

// nullopt when the measured one-hop propagation is within policy.
std::optional<Reason> check_hop(int64_t measured_us, const TimingPolicy& policy);

struct CostCounters {
    uint64_t exponentiations = 0;
    uint64_t hash_digests = 0;
};

// Accumulates modexp/digest deltas for one party while alive.
class CostMeter {
public:
    explicit CostMeter(CostCounters& sink);
    ~CostMeter();
    CostMeter(const CostMeter&) = delete;
    CostMeter& operator=(const CostMeter&) = delete;

private:
    CostCounters& sink_;
    uint64_t exp0_, hash0_;
};

// Running/commit claim payload for the Lowe-hierarchy checker.
struct ClaimData {
    std::string peer;
    Nonce nonce{};
    ChallengeValue challenge{};
    Digest response_digest{};
};

// Backend key material shared between the paired parties. Prover secrets
// live only on the keyfob side; the vehicle only holds the public key.
struct BackendKeys {
    Backend backend = Backend::none;
    group::GroupParams params;
    commitments::SchnorrKeypair schnorr;
    commitments::PedersenKeypair pedersen;
};

// --- Basic peripheral scheme --------------------------------------------

class PeripheralDevice {
public:
    PeripheralDevice(Identity id, Key key, edr::MobilityPattern pattern)
        : id_(std::move(id)), key_(key), pattern_(std::move(pattern)) {}

    Bytes initiate(RngStream& rng);
    Result<Bytes> respond(std::span<const uint8_t> sealed_challenge, RngStream& rng,
                          ClaimData& claim_out);

    const Nonce& session_nonce() const { return nonce_; }
    CostCounters cost;
    Identity expected_vehicle;  // set at registration

private:
    Identity id_;
    Key key_;
    edr::MobilityPattern pattern_;
    Nonce nonce_{};
    bool active_ = false;
};

class VehicleBasic {
public:
    VehicleBasic(Identity id, Key key, const edr::MobilityPattern* pattern)
        : id_(std::move(id)), key_(key), pattern_(pattern) {}

    void register_device(const Identity& device) { registered_.insert(device); }

    Result<Bytes> on_request(std::span<const uint8_t> sealed, RngStream& rng);
    Result<ClaimData> on_response(std::span<const uint8_t> sealed);

    CostCounters cost;

private:
    Identity id_;
    Key key_;
    const edr::MobilityPattern* pattern_;
    std::set<Identity> registered_;
    std::set<Nonce> seen_nonces_;
    std::optional<ChallengeValue> pending_challenge_;
    Nonce session_nonce_{};
};

// --- Customized vehicle <-> keyfob scheme --------------------------------

class Keyfob {
public:
    Keyfob(Identity id, Key key, edr::MobilityPattern pattern, Digest expected_vehicle_id_hash,
           std::string vehicle_label, TimingPolicy policy, BackendKeys backend = {})
        : id_(std::move(id)),
          key_(key),
          pattern_(std::move(pattern)),
          expected_vehicle_id_hash_(expected_vehicle_id_hash),
          vehicle_label_(std::move(vehicle_label)),
          policy_(policy),
          backend_(std::move(backend)) {}

    // Step 1; records t_kf_send for the gait window.
    Bytes initiate(RngStream& rng, int64_t now_us);

    // Steps 2-3 combined on the keyfob: validate the challenge at receive
    // time, then build the response at t_kf_cur with the pedometer-measured
    // displacement since t_kf_send. claim_out carries the running claim the
    // caller must trace before delivering the response.
    Result<KeyfobChallenge> accept_challenge(std::span<const uint8_t> sealed, int64_t now_us);
    Bytes respond(const KeyfobChallenge& challenge, int64_t t_kf_cur_us, double displacement_m,
                  RngStream& rng, ClaimData& claim_out);

    int64_t t_kf_send_us() const { return t_kf_send_us_; }
    const TimingPolicy& policy() const { return policy_; }
    GaitObservation last_gait() const { return last_gait_; }

    CostCounters cost;

private:
    Identity id_;
    Key key_;
    edr::MobilityPattern pattern_;
    Digest expected_vehicle_id_hash_;
    std::string vehicle_label_;
    TimingPolicy policy_;
    BackendKeys backend_;
    Nonce nonce_{};
    int64_t t_kf_send_us_ = 0;
    GaitObservation last_gait_;
    commitments::SchnorrCommitment schnorr_cm_;
    commitments::PedersenCommitment pedersen_cm_;
};

struct VerifyOutcome {
    enum class Kind { accept, reject, reinit } kind;
    Reason reason{};       // valid for reject
    Bytes new_challenge;   // valid for reinit
    ClaimData commit;      // valid for accept
};

struct SessionMetrics {
    int64_t p1_us = 0;  // request hop, measured at vehicle
    int64_t p2_us = 0;  // challenge hop, measured at keyfob (filled by the sim)
    int64_t p3_us = 0;  // response hop, measured at vehicle
    int64_t w_kf_us = 0;
    int64_t w_v_us = 0;
    int64_t vel_kf_milli = 0;
    int64_t vel_v_milli = 0;
    int reinits = 0;
};

class VehicleKf {
public:
    VehicleKf(Identity id, Key key, const edr::MobilityPattern* pattern, TimingPolicy policy,
              BackendKeys backend = {})
        : id_(std::move(id)),
          key_(key),
          pattern_(pattern),
          policy_(policy),
          backend_(std::move(backend)) {}

    Result<Bytes> on_request(std::span<const uint8_t> sealed, int64_t now_us, RngStream& rng);
    VerifyOutcome on_response(std::span<const uint8_t> sealed, int64_t now_us, RngStream& rng);

    const SessionMetrics& metrics() const { return metrics_; }
    const Identity& identity() const { return id_; }
    std::optional<commitments::Transcript> last_transcript() const { return transcript_; }

    CostCounters cost;

private:
    Bytes build_challenge(int64_t receive_us, int64_t send_us, RngStream& rng);

    Identity id_;
    Key key_;
    const edr::MobilityPattern* pattern_;
    TimingPolicy policy_;
    BackendKeys backend_;
    std::set<Nonce> seen_nonces_;

    Nonce session_nonce_{};
    ChallengeValue challenge_{};
    group::Scalar backend_challenge_;
    std::vector<BigInt> backend_commit_;
    int64_t t_kf_send_us_ = 0;
    int64_t processing_total_us_ = 0;  // sum of (t_v_send - t_v_receive)
    int reinits_ = 0;
    SessionMetrics metrics_;
    std::optional<commitments::Transcript> transcript_;
};

}  // namespace perimeter::protocol
