#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "protocol.hpp"

using namespace perimeter;
using namespace perimeter::protocol;

namespace {

aead::Key test_key() {
    aead::Key k{};
    for (size_t i = 0; i < k.size(); ++i) k[i] = static_cast<uint8_t>(i * 7 + 1);
    return k;
}

edr::MobilityPattern test_pattern() {
    edr::MobilityPattern p;
    p.record_event({0, edr::EventKind::velocity, 13900});
    p.record_event({1'500'000, edr::EventKind::deceleration, 2400});
    return p;
}

bool rejected_with(const auto& result, Reason why) {
    const Reject* r = std::get_if<Reject>(&result);
    return r && r->reason == why;
}

}  // namespace

TEST_CASE("aead round trip and tamper detection") {
    auto key = test_key();
    RngStream rng(3);
    Bytes msg{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto sealed = aead::seal(key, rng, msg);
    auto opened = aead::open(key, sealed);
    REQUIRE(opened);
    CHECK(*opened == msg);

    auto other = test_key();
    other[0] ^= 1;
    CHECK(!aead::open(other, sealed));
    CHECK(!aead::open(key, std::span(sealed).subspan(0, sealed.size() - 1)));

    // Exhaustive single-bit-flip sweep.
    for (size_t byte = 0; byte < sealed.size(); ++byte)
        for (int bit = 0; bit < 8; ++bit) {
            Bytes t = sealed;
            t[byte] ^= static_cast<uint8_t>(1 << bit);
            CHECK(!aead::open(key, t));
        }
}

TEST_CASE("message serialization round trips") {
    RngStream rng(4);
    KeyfobRequest req;
    req.edr_digest = test_pattern().digest();
    req.t_kf_send_us = -1234567;
    auto nb = rng.bytes(16);
    std::copy(nb.begin(), nb.end(), req.nonce.begin());
    req.commit_ext = {BigInt(9), BigInt(16)};
    auto rt = parse<KeyfobRequest>(serialize(req));
    REQUIRE(rt);
    CHECK(rt->edr_digest == req.edr_digest);
    CHECK(rt->t_kf_send_us == req.t_kf_send_us);
    CHECK(rt->nonce == req.nonce);
    CHECK(rt->commit_ext == req.commit_ext);

    KeyfobChallenge ch;
    ch.hashed_vehicle_id = hash::sha256(nb);
    ch.t_v_receive_us = 2000;
    ch.t_v_send_us = 2500;
    ch.challenge_ext = {BigInt(0)};
    auto ct = parse<KeyfobChallenge>(serialize(ch));
    REQUIRE(ct);
    CHECK(ct->challenge_ext == ch.challenge_ext);
    CHECK(ct->t_v_send_us == 2500);

    KeyfobResponse resp;
    resp.gait = GaitObservation{3000, 2000, 1500};
    resp.t_kf_cur_us = 2'004'000;
    auto pt = parse<KeyfobResponse>(serialize(resp));
    REQUIRE(pt);
    CHECK(pt->gait == resp.gait);

    BasicRequest breq;
    breq.id_pd = Identity::make(Role::peripheral, "pd");
    auto bt = parse<BasicRequest>(serialize(breq));
    REQUIRE(bt);
    CHECK(bt->id_pd == breq.id_pd);

    // Truncation and kind confusion are malformed.
    auto bytes = serialize(req);
    bytes.pop_back();
    CHECK(!parse<KeyfobRequest>(bytes));
    CHECK(!parse<KeyfobChallenge>(serialize(req)));
}

TEST_CASE("hop check thresholds") {
    TimingPolicy tp;  // max 5ms, epsilon 1ms, drift 0
    CHECK(!check_hop(2000, tp));
    CHECK(check_hop(12000, tp) == Reason::propagation_excess);
    CHECK(check_hop(-3000, tp) == Reason::timestamp_implausible);
    CHECK(!check_hop(6000, tp));  // exactly max + epsilon
    CHECK(check_hop(6001, tp) == Reason::propagation_excess);
    tp.clock_drift_bound_us = 500;
    CHECK(!check_hop(6500, tp));
    CHECK(!check_hop(-500, tp));
    tp.timing_check = false;
    CHECK(!check_hop(1'000'000'000, tp));
}

TEST_CASE("gait observation from window") {
    auto g = GaitObservation::from_window(3.0, 2'000'000);
    CHECK(g.displacement_milli == 3000);
    CHECK(g.duration_milli == 2000);
    CHECK(g.velocity_milli == 1500);
    auto still = GaitObservation::from_window(0.0, 2'000'000);
    CHECK(still.velocity_milli == 0);
    CHECK(still.displacement_milli == 0);
}

TEST_CASE("basic scheme honest flow and failure modes") {
    auto key = test_key();
    auto pattern = test_pattern();
    auto id_v = Identity::make(Role::vehicle, "vehicle");
    auto id_pd = Identity::make(Role::peripheral, "pd");

    VehicleBasic vehicle(id_v, key, &pattern);
    vehicle.register_device(id_pd);
    PeripheralDevice pd(id_pd, key, pattern);
    pd.expected_vehicle = id_v;

    RngStream rng_pd(1), rng_v(2);
    auto req = pd.initiate(rng_pd);
    auto ch = vehicle.on_request(req, rng_v);
    REQUIRE(std::holds_alternative<Bytes>(ch));
    ClaimData claim;
    auto resp = pd.respond(std::get<Bytes>(ch), rng_pd, claim);
    REQUIRE(std::holds_alternative<Bytes>(resp));
    auto commit = vehicle.on_response(std::get<Bytes>(resp));
    REQUIRE(std::holds_alternative<ClaimData>(commit));
    CHECK(std::get<ClaimData>(commit).nonce == claim.nonce);
    CHECK(std::get<ClaimData>(commit).response_digest == claim.response_digest);

    // Replayed request nonce.
    CHECK(rejected_with(vehicle.on_request(req, rng_v), Reason::nonce_replay));

    // Stale device digest.
    auto stale_vehicle_pattern = pattern;
    stale_vehicle_pattern.record_event({2'000'000, edr::EventKind::velocity, 0});
    VehicleBasic v2(id_v, key, &stale_vehicle_pattern);
    v2.register_device(id_pd);
    auto req2 = pd.initiate(rng_pd);
    CHECK(rejected_with(v2.on_request(req2, rng_v), Reason::digest_mismatch));

    // Unknown device.
    VehicleBasic v3(id_v, key, &pattern);
    auto req3 = pd.initiate(rng_pd);
    CHECK(rejected_with(v3.on_request(req3, rng_v), Reason::unknown_identity));

    // Stale challenge nonce at the device.
    auto req4 = pd.initiate(rng_pd);
    VehicleBasic v4(id_v, key, &pattern);
    v4.register_device(id_pd);
    auto ch4 = v4.on_request(req4, rng_v);
    pd.initiate(rng_pd);  // rotates the device nonce
    CHECK(rejected_with(pd.respond(std::get<Bytes>(ch4), rng_pd, claim),
                        Reason::nonce_mismatch));
}

TEST_CASE("basic scheme: random 256-bit responses never accepted") {
    auto key = test_key();
    auto pattern = test_pattern();
    auto id_v = Identity::make(Role::vehicle, "vehicle");
    auto id_pd = Identity::make(Role::peripheral, "pd");
    VehicleBasic vehicle(id_v, key, &pattern);
    vehicle.register_device(id_pd);
    PeripheralDevice pd(id_pd, key, pattern);
    pd.expected_vehicle = id_v;

    RngStream rng_pd(1), rng_v(2), rng_adv(3);
    auto req = pd.initiate(rng_pd);
    REQUIRE(std::holds_alternative<Bytes>(vehicle.on_request(req, rng_v)));
    int accepts = 0;
    for (int i = 0; i < 10000; ++i) {
        BasicResponse forged;
        auto rb = rng_adv.bytes(forged.response.size());
        std::copy(rb.begin(), rb.end(), forged.response.begin());
        auto nb = rng_adv.bytes(forged.nonce.size());
        std::copy(nb.begin(), nb.end(), forged.nonce.begin());
        auto sealed = aead::seal(key, rng_adv, serialize(forged));
        if (std::holds_alternative<ClaimData>(vehicle.on_response(sealed))) ++accepts;
    }
    CHECK(accepts == 0);
}

namespace {

struct KfFixture {
    aead::Key key = test_key();
    edr::MobilityPattern pattern = test_pattern();
    Identity id_v = Identity::make(Role::vehicle, "vehicle");
    Identity id_kf = Identity::make(Role::keyfob, "keyfob");
    TimingPolicy tp;
    VehicleKf vehicle{id_v, key, &pattern, tp};
    Keyfob keyfob{id_kf, key, pattern, hash::sha256(id_v.id), "vehicle", tp};
    RngStream rng_kf{1}, rng_v{2};
};

}  // namespace

TEST_CASE("keyfob scheme honest handshake accepts") {
    KfFixture f;
    auto req = f.keyfob.initiate(f.rng_kf, 0);
    auto ch = f.vehicle.on_request(req, 2000, f.rng_v);
    REQUIRE(std::holds_alternative<Bytes>(ch));
    auto acc = f.keyfob.accept_challenge(std::get<Bytes>(ch), 4000);
    REQUIRE(std::holds_alternative<KeyfobChallenge>(acc));
    ClaimData claim;
    // Holder walked 2.4 m during the 2.004 s window.
    auto resp = f.keyfob.respond(std::get<KeyfobChallenge>(acc), 2'004'000, 2.4, f.rng_kf, claim);
    auto out = f.vehicle.on_response(resp, 2'006'000, f.rng_v);
    CHECK(out.kind == VerifyOutcome::Kind::accept);
    CHECK(out.commit.nonce == claim.nonce);
    CHECK(f.vehicle.metrics().p1_us == 2000);
    CHECK(std::llabs(f.vehicle.metrics().vel_v_milli - f.keyfob.last_gait().velocity_milli) <=
          f.tp.vel_epsilon_milli);
}

TEST_CASE("keyfob scheme rejects forged and late responses") {
    KfFixture f;
    auto req = f.keyfob.initiate(f.rng_kf, 0);

    // Relayed request: 12 ms exceeds the 5 ms + 1 ms budget.
    KfFixture late;
    auto late_req = late.keyfob.initiate(late.rng_kf, 0);
    auto r = late.vehicle.on_request(late_req, 12000, late.rng_v);
    CHECK(rejected_with(r, Reason::propagation_excess));

    auto ch = f.vehicle.on_request(req, 2000, f.rng_v);
    REQUIRE(std::holds_alternative<Bytes>(ch));

    // Forged hashed response: random digest in an otherwise valid envelope.
    auto acc = f.keyfob.accept_challenge(std::get<Bytes>(ch), 4000);
    REQUIRE(std::holds_alternative<KeyfobChallenge>(acc));
    ClaimData claim;
    auto resp = f.keyfob.respond(std::get<KeyfobChallenge>(acc), 2'004'000, 2.4, f.rng_kf, claim);
    auto body = aead::open(f.key, resp);
    auto msg = parse<KeyfobResponse>(*body);
    msg->hashed_response[0] ^= 1;
    auto forged = aead::seal(f.key, f.rng_kf, serialize(*msg));
    auto out = f.vehicle.on_response(forged, 2'006'000, f.rng_v);
    CHECK(out.kind == VerifyOutcome::Kind::reject);
    CHECK(out.reason == Reason::bad_response);
}

TEST_CASE("gait mismatch reinitializes once then rejects") {
    KfFixture f;
    auto req = f.keyfob.initiate(f.rng_kf, 0);
    auto ch = f.vehicle.on_request(req, 2000, f.rng_v);
    REQUIRE(std::holds_alternative<Bytes>(ch));

    auto answer = [&](const Bytes& sealed_ch, int64_t t2, int64_t t_cur) {
        auto acc = f.keyfob.accept_challenge(sealed_ch, t2);
        REQUIRE(std::holds_alternative<KeyfobChallenge>(acc));
        ClaimData claim;
        auto resp = f.keyfob.respond(std::get<KeyfobChallenge>(acc), t_cur, 2.4, f.rng_kf, claim);
        // Inflate the reported speed well past vel_epsilon.
        auto body = aead::open(f.key, resp);
        auto msg = parse<KeyfobResponse>(*body);
        msg->gait.velocity_milli += 900;
        return aead::seal(f.key, f.rng_kf, serialize(*msg));
    };

    auto out = f.vehicle.on_response(answer(std::get<Bytes>(ch), 4000, 2'004'000), 2'006'000,
                                     f.rng_v);
    REQUIRE(out.kind == VerifyOutcome::Kind::reinit);
    auto out2 = f.vehicle.on_response(answer(out.new_challenge, 2'008'000, 4'008'000), 4'010'000,
                                      f.rng_v);
    CHECK(out2.kind == VerifyOutcome::Kind::reject);
    CHECK(out2.reason == Reason::gait_mismatch);
    CHECK(f.vehicle.metrics().reinits == 1);
}

TEST_CASE("keyfob backends verify inside the handshake") {
    for (auto backend : {Backend::schnorr, Backend::pedersen}) {
        BackendKeys keys;
        keys.backend = backend;
        keys.params = group::desk_params();
        RngStream setup(9);
        if (backend == Backend::schnorr)
            keys.schnorr = commitments::schnorr_keygen(setup, keys.params);
        else
            keys.pedersen = commitments::pedersen_keygen(setup, keys.params);

        auto key = test_key();
        auto pattern = test_pattern();
        auto id_v = Identity::make(Role::vehicle, "vehicle");
        auto id_kf = Identity::make(Role::keyfob, "keyfob");
        TimingPolicy tp;
        VehicleKf vehicle(id_v, key, &pattern, tp, keys);
        Keyfob keyfob(id_kf, key, pattern, hash::sha256(id_v.id), "vehicle", tp, keys);
        RngStream rng_kf(1), rng_v(2);

        auto req = keyfob.initiate(rng_kf, 0);
        auto ch = vehicle.on_request(req, 2000, rng_v);
        REQUIRE(std::holds_alternative<Bytes>(ch));
        auto acc = keyfob.accept_challenge(std::get<Bytes>(ch), 4000);
        REQUIRE(std::holds_alternative<KeyfobChallenge>(acc));
        ClaimData claim;
        auto resp = keyfob.respond(std::get<KeyfobChallenge>(acc), 2'004'000, 2.4, rng_kf, claim);
        auto out = vehicle.on_response(resp, 2'006'000, rng_v);
        CHECK(out.kind == VerifyOutcome::Kind::accept);
        REQUIRE(vehicle.last_transcript());
        CHECK(vehicle.last_transcript()->scheme ==
              (backend == Backend::schnorr ? commitments::Scheme::schnorr
                                           : commitments::Scheme::pedersen));

        // Tampered backend response scalar fails verification.
        VehicleKf vehicle2(id_v, key, &pattern, tp, keys);
        auto req2 = keyfob.initiate(rng_kf, 0);
        auto ch2 = vehicle2.on_request(req2, 2000, rng_v);
        auto acc2 = keyfob.accept_challenge(std::get<Bytes>(ch2), 4000);
        auto resp2 =
            keyfob.respond(std::get<KeyfobChallenge>(acc2), 2'004'000, 2.4, rng_kf, claim);
        auto body = aead::open(key, resp2);
        auto msg = parse<KeyfobResponse>(*body);
        msg->response_ext[0] = (msg->response_ext[0] + 1) % keys.params.q;
        auto out2 = vehicle2.on_response(aead::seal(key, rng_kf, serialize(*msg)), 2'006'000,
                                         rng_v);
        CHECK(out2.kind == VerifyOutcome::Kind::reject);
        CHECK(out2.reason == Reason::bad_response);
    }
}
