#include "protocol.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

namespace perimeter::protocol {

const char* to_string(Reason r) {
    switch (r) {
        case Reason::digest_mismatch: return "digest-mismatch";
        case Reason::unknown_identity: return "unknown-identity";
        case Reason::nonce_replay: return "nonce-replay";
        case Reason::nonce_mismatch: return "nonce-mismatch";
        case Reason::vehicle_id_mismatch: return "vehicle-id-mismatch";
        case Reason::bad_response: return "bad-response";
        case Reason::propagation_excess: return "propagation-excess";
        case Reason::timestamp_implausible: return "timestamp-implausible";
        case Reason::gait_mismatch: return "gait-mismatch";
        case Reason::integrity_failure: return "integrity-failure";
        case Reason::malformed_message: return "malformed-message";
    }
    return "unknown";
}

Identity Identity::make(Role role, const std::string& label) {
    Identity id;
    id.role = role;
    id.label = label;
    Bytes input{static_cast<uint8_t>(role)};
    input.insert(input.end(), label.begin(), label.end());
    auto d = hash::sha256(input);
    std::copy(d.begin(), d.begin() + 16, id.id.begin());
    return id;
}

GaitObservation GaitObservation::from_window(double displacement_m, int64_t window_us) {
    GaitObservation g;
    g.displacement_milli = std::llround(displacement_m * 1000.0);
    g.duration_milli = (window_us + 500) / 1000;  // us -> ms, rounded
    g.velocity_milli = g.duration_milli > 0
                           ? std::llround(static_cast<double>(g.displacement_milli) * 1000.0 /
                                          static_cast<double>(g.duration_milli))
                           : 0;
    return g;
}

std::optional<Reason> check_hop(int64_t measured_us, const TimingPolicy& policy) {
    if (!policy.timing_check) return std::nullopt;
    if (measured_us < policy.t_travel_min_us - policy.clock_drift_bound_us)
        return Reason::timestamp_implausible;
    if (measured_us > policy.t_travel_max_us + policy.t_epsilon_us + policy.clock_drift_bound_us)
        return Reason::propagation_excess;
    return std::nullopt;
}

CostMeter::CostMeter(CostCounters& sink)
    : sink_(sink), exp0_(group::modexp_count()), hash0_(hash::digest_count()) {}

CostMeter::~CostMeter() {
    sink_.exponentiations += group::modexp_count() - exp0_;
    sink_.hash_digests += hash::digest_count() - hash0_;
}

// --- wire format ----------------------------------------------------------

namespace {

enum MsgKind : uint8_t {
    kBasicRequest = 1,
    kBasicChallenge = 2,
    kBasicResponse = 3,
    kKeyfobRequest = 4,
    kKeyfobChallenge = 5,
    kKeyfobResponse = 6,
};

void put_bigints(Bytes& out, const std::vector<BigInt>& values) {
    out.push_back(static_cast<uint8_t>(values.size()));
    for (const auto& v : values) {
        Bytes mag;
        boost::multiprecision::export_bits(v == 0 ? BigInt(0) : v, std::back_inserter(mag), 8);
        if (v == 0) mag.assign(1, 0);
        out.push_back(static_cast<uint8_t>(mag.size() >> 8));
        out.push_back(static_cast<uint8_t>(mag.size() & 0xff));
        out.insert(out.end(), mag.begin(), mag.end());
    }
}

struct Reader {
    std::span<const uint8_t> s;
    size_t off = 0;
    bool ok = true;

    const uint8_t* take(size_t n) {
        if (!ok || off + n > s.size()) {
            ok = false;
            return nullptr;
        }
        const uint8_t* p = s.data() + off;
        off += n;
        return p;
    }

    template <size_t N>
    bool fixed(std::array<uint8_t, N>& out) {
        const uint8_t* p = take(N);
        if (p) std::copy(p, p + N, out.begin());
        return ok;
    }

    bool u8(uint8_t& v) {
        const uint8_t* p = take(1);
        if (p) v = *p;
        return ok;
    }

    bool i64(int64_t& v) {
        const uint8_t* p = take(8);
        if (p) v = get_be64_signed(p);
        return ok;
    }

    bool bigints(std::vector<BigInt>& out) {
        uint8_t count = 0;
        if (!u8(count)) return false;
        out.clear();
        for (uint8_t i = 0; i < count; ++i) {
            const uint8_t* lp = take(2);
            if (!lp) return false;
            size_t len = (static_cast<size_t>(lp[0]) << 8) | lp[1];
            const uint8_t* mp = take(len);
            if (!mp) return false;
            BigInt v = 0;
            boost::multiprecision::import_bits(v, mp, mp + len, 8);
            out.push_back(std::move(v));
        }
        return ok;
    }

    bool done() const { return ok && off == s.size(); }
};

void put_identity(Bytes& out, const Identity& id) {
    out.push_back(static_cast<uint8_t>(id.role));
    out.insert(out.end(), id.id.begin(), id.id.end());
}

bool read_identity(Reader& r, Identity& id) {
    uint8_t role = 0;
    if (!r.u8(role) || role > 3) return false;
    id.role = static_cast<Role>(role);
    return r.fixed(id.id);
}

}  // namespace

Bytes serialize(const BasicRequest& m) {
    Bytes out{kBasicRequest};
    out.insert(out.end(), m.edr_digest.begin(), m.edr_digest.end());
    put_identity(out, m.id_pd);
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    return out;
}

Bytes serialize(const BasicChallenge& m) {
    Bytes out{kBasicChallenge};
    out.insert(out.end(), m.challenge.begin(), m.challenge.end());
    put_identity(out, m.id_v);
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    return out;
}

Bytes serialize(const BasicResponse& m) {
    Bytes out{kBasicResponse};
    out.insert(out.end(), m.response.begin(), m.response.end());
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    return out;
}

Bytes serialize(const KeyfobRequest& m) {
    Bytes out{kKeyfobRequest};
    out.insert(out.end(), m.edr_digest.begin(), m.edr_digest.end());
    put_be64_signed(out, m.t_kf_send_us);
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    put_bigints(out, m.commit_ext);
    return out;
}

Bytes serialize(const KeyfobChallenge& m) {
    Bytes out{kKeyfobChallenge};
    out.insert(out.end(), m.hashed_vehicle_id.begin(), m.hashed_vehicle_id.end());
    out.insert(out.end(), m.challenge.begin(), m.challenge.end());
    put_be64_signed(out, m.t_v_receive_us);
    put_be64_signed(out, m.t_v_send_us);
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    put_bigints(out, m.challenge_ext);
    return out;
}

Bytes serialize(const KeyfobResponse& m) {
    Bytes out{kKeyfobResponse};
    out.insert(out.end(), m.hashed_response.begin(), m.hashed_response.end());
    put_be64_signed(out, m.gait.displacement_milli);
    put_be64_signed(out, m.gait.duration_milli);
    put_be64_signed(out, m.gait.velocity_milli);
    put_be64_signed(out, m.t_kf_cur_us);
    out.insert(out.end(), m.nonce.begin(), m.nonce.end());
    put_bigints(out, m.response_ext);
    return out;
}

template <>
std::optional<BasicRequest> parse<BasicRequest>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    BasicRequest m;
    if (!r.u8(kind) || kind != kBasicRequest) return std::nullopt;
    if (!r.fixed(m.edr_digest) || !read_identity(r, m.id_pd) || !r.fixed(m.nonce) || !r.done())
        return std::nullopt;
    return m;
}

template <>
std::optional<BasicChallenge> parse<BasicChallenge>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    BasicChallenge m;
    if (!r.u8(kind) || kind != kBasicChallenge) return std::nullopt;
    if (!r.fixed(m.challenge) || !read_identity(r, m.id_v) || !r.fixed(m.nonce) || !r.done())
        return std::nullopt;
    return m;
}

template <>
std::optional<BasicResponse> parse<BasicResponse>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    BasicResponse m;
    if (!r.u8(kind) || kind != kBasicResponse) return std::nullopt;
    if (!r.fixed(m.response) || !r.fixed(m.nonce) || !r.done()) return std::nullopt;
    return m;
}

template <>
std::optional<KeyfobRequest> parse<KeyfobRequest>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    KeyfobRequest m;
    if (!r.u8(kind) || kind != kKeyfobRequest) return std::nullopt;
    if (!r.fixed(m.edr_digest) || !r.i64(m.t_kf_send_us) || !r.fixed(m.nonce) ||
        !r.bigints(m.commit_ext) || !r.done())
        return std::nullopt;
    return m;
}

template <>
std::optional<KeyfobChallenge> parse<KeyfobChallenge>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    KeyfobChallenge m;
    if (!r.u8(kind) || kind != kKeyfobChallenge) return std::nullopt;
    if (!r.fixed(m.hashed_vehicle_id) || !r.fixed(m.challenge) || !r.i64(m.t_v_receive_us) ||
        !r.i64(m.t_v_send_us) || !r.fixed(m.nonce) || !r.bigints(m.challenge_ext) || !r.done())
        return std::nullopt;
    return m;
}

template <>
std::optional<KeyfobResponse> parse<KeyfobResponse>(std::span<const uint8_t> body) {
    Reader r{body};
    uint8_t kind = 0;
    KeyfobResponse m;
    if (!r.u8(kind) || kind != kKeyfobResponse) return std::nullopt;
    if (!r.fixed(m.hashed_response) || !r.i64(m.gait.displacement_milli) ||
        !r.i64(m.gait.duration_milli) || !r.i64(m.gait.velocity_milli) || !r.i64(m.t_kf_cur_us) ||
        !r.fixed(m.nonce) || !r.bigints(m.response_ext) || !r.done())
        return std::nullopt;
    return m;
}

// --- basic peripheral scheme ----------------------------------------------

namespace {
Nonce draw_nonce(RngStream& rng) {
    Nonce n;
    auto b = rng.bytes(n.size());
    std::copy(b.begin(), b.end(), n.begin());
    return n;
}

ChallengeValue draw_challenge(RngStream& rng) {
    ChallengeValue c;
    auto b = rng.bytes(c.size());
    std::copy(b.begin(), b.end(), c.begin());
    return c;
}
}  // namespace

Bytes PeripheralDevice::initiate(RngStream& rng) {
    CostMeter meter(cost);
    BasicRequest m;
    m.edr_digest = pattern_.digest();
    m.id_pd = id_;
    nonce_ = draw_nonce(rng);
    m.nonce = nonce_;
    active_ = true;
    return aead::seal(key_, rng, serialize(m));
}

Result<Bytes> PeripheralDevice::respond(std::span<const uint8_t> sealed_challenge, RngStream& rng,
                                        ClaimData& claim_out) {
    CostMeter meter(cost);
    auto body = aead::open(key_, sealed_challenge);
    if (!body) return Reject{Reason::integrity_failure};
    auto m = parse<BasicChallenge>(*body);
    if (!m) return Reject{Reason::malformed_message};
    if (!(m->id_v == expected_vehicle)) return Reject{Reason::vehicle_id_mismatch};
    if (!active_ || m->nonce != nonce_) return Reject{Reason::nonce_mismatch};
    BasicResponse resp;
    resp.response = hash::sha256(m->challenge);  // R_pd = H(C_v)
    resp.nonce = nonce_;
    claim_out = ClaimData{expected_vehicle.label, nonce_, m->challenge, resp.response};
    return aead::seal(key_, rng, serialize(resp));
}

Result<Bytes> VehicleBasic::on_request(std::span<const uint8_t> sealed, RngStream& rng) {
    CostMeter meter(cost);
    auto body = aead::open(key_, sealed);
    if (!body) return Reject{Reason::integrity_failure};
    auto m = parse<BasicRequest>(*body);
    if (!m) return Reject{Reason::malformed_message};
    if (m->edr_digest != pattern_->digest()) return Reject{Reason::digest_mismatch};
    if (!registered_.contains(m->id_pd)) return Reject{Reason::unknown_identity};
    if (seen_nonces_.contains(m->nonce)) return Reject{Reason::nonce_replay};
    seen_nonces_.insert(m->nonce);
    session_nonce_ = m->nonce;
    BasicChallenge ch;
    ch.challenge = draw_challenge(rng);
    ch.id_v = id_;
    ch.nonce = session_nonce_;
    pending_challenge_ = ch.challenge;
    return aead::seal(key_, rng, serialize(ch));
}

Result<ClaimData> VehicleBasic::on_response(std::span<const uint8_t> sealed) {
    CostMeter meter(cost);
    auto body = aead::open(key_, sealed);
    if (!body) return Reject{Reason::integrity_failure};
    auto m = parse<BasicResponse>(*body);
    if (!m) return Reject{Reason::malformed_message};
    if (!pending_challenge_ || m->nonce != session_nonce_) return Reject{Reason::nonce_mismatch};
    if (m->response != hash::sha256(*pending_challenge_)) return Reject{Reason::bad_response};
    ClaimData commit{"", session_nonce_, *pending_challenge_, m->response};
    pending_challenge_.reset();
    return commit;
}

// --- customized keyfob scheme ----------------------------------------------

Bytes Keyfob::initiate(RngStream& rng, int64_t now_us) {
    CostMeter meter(cost);
    KeyfobRequest m;
    m.edr_digest = pattern_.digest();
    m.t_kf_send_us = now_us;
    nonce_ = draw_nonce(rng);
    m.nonce = nonce_;
    t_kf_send_us_ = now_us;
    if (backend_.backend == Backend::schnorr) {
        schnorr_cm_ = commitments::schnorr_commit(rng, backend_.params);
        m.commit_ext = {schnorr_cm_.X.v};
    } else if (backend_.backend == Backend::pedersen) {
        pedersen_cm_ = commitments::pedersen_commit(rng, backend_.params);
        m.commit_ext = {pedersen_cm_.A.v, pedersen_cm_.B.v};
    }
    return aead::seal(key_, rng, serialize(m));
}

Result<KeyfobChallenge> Keyfob::accept_challenge(std::span<const uint8_t> sealed,
                                                 int64_t now_us) {
    CostMeter meter(cost);
    auto body = aead::open(key_, sealed);
    if (!body) return Reject{Reason::integrity_failure};
    auto m = parse<KeyfobChallenge>(*body);
    if (!m) return Reject{Reason::malformed_message};
    if (m->hashed_vehicle_id != expected_vehicle_id_hash_)
        return Reject{Reason::vehicle_id_mismatch};
    if (m->nonce != nonce_) return Reject{Reason::nonce_mismatch};
    if (auto bad = check_hop(now_us - m->t_v_send_us, policy_)) return Reject{*bad};
    return *m;
}

Bytes Keyfob::respond(const KeyfobChallenge& challenge, int64_t t_kf_cur_us,
                      double displacement_m, RngStream& rng, ClaimData& claim_out) {
    CostMeter meter(cost);
    KeyfobResponse resp;
    auto r_kf = hash::prf(key_, {challenge.challenge, nonce_});
    resp.hashed_response = hash::sha256(r_kf);
    resp.gait = GaitObservation::from_window(displacement_m, t_kf_cur_us - t_kf_send_us_);
    resp.t_kf_cur_us = t_kf_cur_us;
    resp.nonce = nonce_;
    last_gait_ = resp.gait;
    if (backend_.backend == Backend::schnorr && challenge.challenge_ext.size() == 1) {
        group::Scalar k{challenge.challenge_ext[0], backend_.params};
        resp.response_ext = {
            commitments::schnorr_respond(backend_.schnorr, schnorr_cm_, k, backend_.params).v};
    } else if (backend_.backend == Backend::pedersen && challenge.challenge_ext.size() == 1) {
        group::Scalar k{challenge.challenge_ext[0], backend_.params};
        auto [r1, r2] =
            commitments::pedersen_respond(backend_.pedersen, pedersen_cm_, k, backend_.params);
        resp.response_ext = {r1.v, r2.v};
    }
    claim_out = ClaimData{vehicle_label_, nonce_, challenge.challenge, resp.hashed_response};
    return aead::seal(key_, rng, serialize(resp));
}

Bytes VehicleKf::build_challenge(int64_t receive_us, int64_t send_us, RngStream& rng) {
    KeyfobChallenge ch;
    ch.hashed_vehicle_id = hash::sha256(id_.id);
    ch.challenge = draw_challenge(rng);
    ch.t_v_receive_us = receive_us;
    ch.t_v_send_us = send_us;
    ch.nonce = session_nonce_;
    if (backend_.backend != Backend::none) {
        backend_challenge_ = group::random_scalar(rng, backend_.params);
        ch.challenge_ext = {backend_challenge_.v};
    }
    challenge_ = ch.challenge;
    processing_total_us_ += send_us - receive_us;
    return aead::seal(key_, rng, serialize(ch));
}

Result<Bytes> VehicleKf::on_request(std::span<const uint8_t> sealed, int64_t now_us,
                                    RngStream& rng) {
    CostMeter meter(cost);
    auto body = aead::open(key_, sealed);
    if (!body) return Reject{Reason::integrity_failure};
    auto m = parse<KeyfobRequest>(*body);
    if (!m) return Reject{Reason::malformed_message};
    if (m->edr_digest != pattern_->digest()) return Reject{Reason::digest_mismatch};
    if (seen_nonces_.contains(m->nonce)) return Reject{Reason::nonce_replay};
    const int64_t p1 = now_us - m->t_kf_send_us;
    metrics_.p1_us = p1;
    if (auto bad = check_hop(p1, policy_)) return Reject{*bad};
    seen_nonces_.insert(m->nonce);
    session_nonce_ = m->nonce;
    t_kf_send_us_ = m->t_kf_send_us;
    processing_total_us_ = 0;
    reinits_ = 0;
    backend_commit_ = m->commit_ext;
    return build_challenge(now_us, now_us + policy_.vehicle_proc_us, rng);
}

VerifyOutcome VehicleKf::on_response(std::span<const uint8_t> sealed, int64_t now_us,
                                     RngStream& rng) {
    CostMeter meter(cost);
    auto reject = [](Reason r) { return VerifyOutcome{VerifyOutcome::Kind::reject, r, {}, {}}; };
    auto body = aead::open(key_, sealed);
    if (!body) return reject(Reason::integrity_failure);
    auto m = parse<KeyfobResponse>(*body);
    if (!m) return reject(Reason::malformed_message);
    if (m->nonce != session_nonce_) return reject(Reason::nonce_mismatch);

    auto r_kf = hash::prf(key_, {challenge_, session_nonce_});
    if (m->hashed_response != hash::sha256(r_kf)) return reject(Reason::bad_response);

    if (backend_.backend == Backend::schnorr) {
        if (backend_commit_.size() != 1 || m->response_ext.size() != 1)
            return reject(Reason::bad_response);
        group::GroupElement X{backend_commit_[0], backend_.params};
        group::Scalar rho{m->response_ext[0], backend_.params};
        if (!commitments::schnorr_verify(backend_.schnorr.A, X, backend_challenge_, rho,
                                         backend_.params))
            return reject(Reason::bad_response);
        transcript_ = commitments::Transcript{commitments::Scheme::schnorr,
                                              {X.v},
                                              backend_challenge_.v,
                                              {rho.v}};
    } else if (backend_.backend == Backend::pedersen) {
        if (backend_commit_.size() != 2 || m->response_ext.size() != 2)
            return reject(Reason::bad_response);
        group::GroupElement A{backend_commit_[0], backend_.params};
        group::GroupElement B{backend_commit_[1], backend_.params};
        auto C = group::mul(A, B, backend_.params);
        group::Scalar r1{m->response_ext[0], backend_.params};
        group::Scalar r2{m->response_ext[1], backend_.params};
        if (!commitments::pedersen_verify(backend_.pedersen.X, C, backend_challenge_, r1, r2,
                                          backend_.params))
            return reject(Reason::bad_response);
        transcript_ = commitments::Transcript{commitments::Scheme::pedersen,
                                              {A.v, B.v, C.v},
                                              backend_challenge_.v,
                                              {r1.v, r2.v}};
    }

    const int64_t p3 = now_us - m->t_kf_cur_us;
    metrics_.p3_us = p3;
    if (auto bad = check_hop(p3, policy_)) return reject(*bad);

    const int64_t w_v = (now_us - t_kf_send_us_) - processing_total_us_;
    metrics_.w_v_us = w_v;
    metrics_.w_kf_us = m->gait.duration_milli * 1000;
    metrics_.vel_kf_milli = m->gait.velocity_milli;
    metrics_.reinits = reinits_;
    if (w_v <= 0) return reject(Reason::timestamp_implausible);
    const int64_t vel_v =
        std::llround(static_cast<double>(m->gait.displacement_milli) * 1e6 / w_v);
    metrics_.vel_v_milli = vel_v;

    if (policy_.gait_check &&
        std::llabs(vel_v - m->gait.velocity_milli) > policy_.vel_epsilon_milli) {
        if (reinits_ >= 1) return reject(Reason::gait_mismatch);
        metrics_.reinits = ++reinits_;
        // Re-initialize with a fresh challenge; a second mismatch rejects.
        Bytes ch = build_challenge(now_us, now_us + policy_.vehicle_proc_us, rng);
        return VerifyOutcome{VerifyOutcome::Kind::reinit, Reason::gait_mismatch, std::move(ch), {}};
    }

    ClaimData commit{"", session_nonce_, challenge_, m->hashed_response};
    return VerifyOutcome{VerifyOutcome::Kind::accept, {}, {}, std::move(commit)};
}

}  // namespace perimeter::protocol
