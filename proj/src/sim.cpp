#include "sim.hpp"

#include <cmath>
#include <sstream>

namespace perimeter::sim {

namespace {

using protocol::ClaimData;
using protocol::Reason;
using protocol::Reject;

double dist(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::string hex(std::span<const uint8_t> s) { return to_hex(s); }

std::vector<std::pair<std::string, std::string>> claim_payload(const ClaimData& c) {
    return {{"peer", c.peer},
            {"nonce", hex(c.nonce)},
            {"chal", hex(c.challenge)},
            {"resp", hex(c.response_digest)}};
}

std::vector<std::pair<std::string, std::string>> msg_payload(const char* name,
                                                             const Bytes& sealed) {
    return {{"msg", name}, {"bytes", std::to_string(sealed.size())}};
}

// Medium + adversary-in-the-middle. Every hop of a session goes through
// transmit(); relay adversaries insert themselves on each hop.
struct Channel {
    const Scenario& sc;
    RngStream rng;       // jitter draws
    trace::Trace& tr;
    int hop = 0;

    int64_t travel_us(double meters) const {
        return static_cast<int64_t>(std::llround(meters / sc.world.signal_speed * 1e6));
    }

    int64_t jitter() {
        return sc.world.jitter_us > 0
                   ? static_cast<int64_t>(rng.below(static_cast<uint64_t>(sc.world.jitter_us) + 1))
                   : 0;
    }

    int64_t relay_delay(int h) const {
        const auto& a = sc.adversary;
        if (a.consistency == Consistency::consistent || a.schedule_us.empty()) return a.t_relay_us;
        size_t i = std::min<size_t>(static_cast<size_t>(h), a.schedule_us.size() - 1);
        return a.schedule_us[i];
    }

    // Returns the arrival time; logs relay events for relay-style adversaries.
    int64_t transmit(int64_t t_send, const std::array<double, 2>& from,
                     const std::array<double, 2>& to) {
        const auto mode = sc.adversary.mode;
        const int h = hop++;
        if (mode == AdversaryMode::pure_relay || mode == AdversaryMode::brute_force_relay) {
            const int64_t base = travel_us(dist(from, to));
            const int64_t d = relay_delay(h);
            tr.add(t_send + base, "adversary", trace::Kind::relay,
                   {{"hop", std::to_string(h)}, {"delay_us", std::to_string(d)}});
            return t_send + base + d + jitter();
        }
        if (mode == AdversaryMode::mafia_fraud) {
            // Leech sits by the keyfob, ghost by the vehicle; the signal is
            // bridged across both, each forward costing t_relay.
            const bool outbound = dist(from, sc.adversary.pos) <= dist(from, sc.adversary.pos2);
            const auto& first = outbound ? sc.adversary.pos : sc.adversary.pos2;
            const auto& second = outbound ? sc.adversary.pos2 : sc.adversary.pos;
            int64_t t = t_send + travel_us(dist(from, first));
            tr.add(t, outbound ? "leech" : "ghost", trace::Kind::relay,
                   {{"hop", std::to_string(h)},
                    {"delay_us", std::to_string(sc.adversary.t_relay_us)}});
            t += sc.adversary.t_relay_us + travel_us(dist(first, second));
            tr.add(t, outbound ? "ghost" : "leech", trace::Kind::relay,
                   {{"hop", std::to_string(h)},
                    {"delay_us", std::to_string(sc.adversary.t_relay_us)}});
            t += sc.adversary.t_relay_us + travel_us(dist(second, to));
            return t + jitter();
        }
        return t_send + travel_us(dist(from, to)) + jitter();
    }
};

struct Setup {
    aead::Key key{};
    edr::MobilityPattern vehicle_pattern;
    edr::MobilityPattern prover_pattern;
    protocol::BackendKeys backend;
};

Setup make_setup(const Scenario& sc, uint64_t seed) {
    Setup s;
    auto rng = RngStream::derive(seed, "setup");
    auto kb = rng.bytes(s.key.size());
    std::copy(kb.begin(), kb.end(), s.key.begin());

    // The prover's replica may have been taken `stale_events` drive events
    // ago (device left in a drawer); terrorist stale-digest uses it too.
    size_t fresh_until = sc.drive_script.size();
    int stale = sc.stale_events;
    if (sc.adversary.mode == AdversaryMode::terrorist_fraud &&
        sc.adversary.variant == "stale-digest" && stale == 0)
        stale = 1;
    if (stale > 0 && static_cast<size_t>(stale) <= fresh_until)
        fresh_until -= static_cast<size_t>(stale);

    for (size_t i = 0; i < sc.drive_script.size(); ++i) {
        edr::EventRecord rec{sc.drive_script[i].t_us, sc.drive_script[i].kind,
                             sc.drive_script[i].value_milli};
        s.vehicle_pattern.record_event(rec);
        if (i < fresh_until) s.prover_pattern.record_event(rec);
    }

    s.backend.backend = sc.backend;
    s.backend.params = sc.group_params;
    if (sc.backend == protocol::Backend::schnorr)
        s.backend.schnorr = commitments::schnorr_keygen(rng, sc.group_params);
    else if (sc.backend == protocol::Backend::pedersen)
        s.backend.pedersen = commitments::pedersen_keygen(rng, sc.group_params);
    return s;
}

void finish(RunResult& r, const Verdict& v, trace::Trace& tr, int64_t t,
            const std::string& actor) {
    r.verdict = v;
    std::vector<std::pair<std::string, std::string>> payload{
        {"outcome", v.accepted ? "accept" : "reject"}};
    if (!v.accepted) payload.emplace_back("reason", protocol::to_string(v.reason));
    if (v.reinits > 0) payload.emplace_back("reinits", std::to_string(v.reinits));
    tr.add(t, actor, trace::Kind::verdict, payload);
}

RunResult run_keyfob(const Scenario& sc, uint64_t seed) {
    RunResult r;
    r.seed = seed;
    r.verifier_label = "vehicle";
    const bool terrorist = sc.adversary.mode == AdversaryMode::terrorist_fraud;
    r.initiator_label = terrorist ? "colluder" : "keyfob";
    const std::string believed_prover = "keyfob";

    Setup setup = make_setup(sc, seed);
    auto rng_v = RngStream::derive(seed, "vehicle");
    auto rng_kf = RngStream::derive(seed, r.initiator_label);
    auto rng_adv = RngStream::derive(seed, "adversary");
    Channel chan{sc, RngStream::derive(seed, "channel"), r.trace};

    auto id_v = protocol::Identity::make(protocol::Role::vehicle, "vehicle");
    auto id_kf = protocol::Identity::make(protocol::Role::keyfob, r.initiator_label);

    protocol::VehicleKf vehicle(id_v, setup.key, &setup.vehicle_pattern, sc.timing,
                                setup.backend);
    protocol::Keyfob keyfob(id_kf, setup.key, setup.prover_pattern, hash::sha256(id_v.id),
                            "vehicle", sc.timing, setup.backend);

    // The keyfob clock may drift; the colluder's own clock is exact.
    const int64_t offset = terrorist ? 0 : sc.world.kf_clock_offset_us;
    auto clock = [&](int64_t t) { return t + offset; };
    auto prover_pos = [&](int64_t t) -> std::array<double, 2> {
        return terrorist ? sc.adversary.pos : sc.world.holder_pos(t);
    };

    const auto& vpos = sc.world.vehicle_pos;
    const bool no_pedometer = terrorist && sc.adversary.variant == "no-pedometer";
    const bool distance_fraud = sc.adversary.mode == AdversaryMode::distance_fraud_early;

    // Replay flavour of distance fraud: the adversary has captured the
    // response of one earlier honest session between the same pair.
    Bytes captured_response;
    if (distance_fraud && sc.adversary.variant == "replay") {
        Bytes req = keyfob.initiate(rng_kf, clock(0));
        int64_t t1 = chan.travel_us(dist(prover_pos(0), vpos));
        auto ch = vehicle.on_request(req, t1, rng_v);
        if (auto* sealed = std::get_if<Bytes>(&ch)) {
            int64_t ts = t1 + sc.timing.vehicle_proc_us;
            int64_t t2 = ts + chan.travel_us(dist(vpos, prover_pos(ts)));
            auto accepted = keyfob.accept_challenge(*sealed, clock(t2));
            if (auto* c = std::get_if<protocol::KeyfobChallenge>(&accepted)) {
                int64_t tc = t2 + sc.timing.gait_window_us;
                ClaimData unused;
                double d = dist(prover_pos(tc), prover_pos(0));
                captured_response = keyfob.respond(*c, clock(tc), d, rng_kf, unused);
                int64_t t3 = tc + chan.travel_us(dist(prover_pos(tc), vpos));
                vehicle.on_response(captured_response, t3, rng_v);  // session completes
            }
        }
    }

    int64_t t0 = 0;
    Bytes sealed1 = keyfob.initiate(rng_kf, clock(t0));
    r.trace.add(t0, r.initiator_label, trace::Kind::send, msg_payload("keyfob-request", sealed1));
    int64_t t1 = chan.transmit(t0, prover_pos(t0), vpos);
    r.trace.add(t1, "vehicle", trace::Kind::receive, msg_payload("keyfob-request", sealed1));

    auto step1 = vehicle.on_request(sealed1, t1, rng_v);
    if (auto* rej = std::get_if<Reject>(&step1)) {
        r.metrics = vehicle.metrics();
        r.cost_initiator = keyfob.cost;
        r.cost_verifier = vehicle.cost;
        finish(r, Verdict{false, rej->reason, 0}, r.trace, t1, "vehicle");
        r.props = properties::check_all(r.trace, "vehicle", believed_prover);
        return r;
    }

    Bytes sealed_ch = std::get<Bytes>(std::move(step1));
    int64_t t_send = t1 + sc.timing.vehicle_proc_us;

    for (int round = 0;; ++round) {
        r.trace.add(t_send, "vehicle", trace::Kind::send,
                    msg_payload("keyfob-challenge", sealed_ch));

        if (distance_fraud) {
            // The adversary near the vehicle answers well before the real
            // keyfob (which is still inside its observation window) can.
            Bytes forged = sc.adversary.variant == "replay" && !captured_response.empty()
                               ? captured_response
                               : rng_adv.bytes(sealed_ch.size());
            int64_t t_adv = t_send + chan.travel_us(dist(vpos, sc.adversary.pos));
            r.trace.add(t_adv, "adversary", trace::Kind::send,
                        msg_payload("keyfob-response", forged));
            int64_t t_f = t_adv + chan.travel_us(dist(sc.adversary.pos, vpos));
            r.trace.add(t_f, "vehicle", trace::Kind::receive,
                        msg_payload("keyfob-response", forged));
            auto out = vehicle.on_response(forged, t_f, rng_v);
            Reason why = out.kind == protocol::VerifyOutcome::Kind::reject
                             ? out.reason
                             : Reason::bad_response;
            bool ok = out.kind == protocol::VerifyOutcome::Kind::accept;
            finish(r, Verdict{ok, why, round}, r.trace, t_f, "vehicle");
            break;
        }

        int64_t t2 = chan.transmit(t_send, vpos, prover_pos(t_send));
        r.trace.add(t2, r.initiator_label, trace::Kind::receive,
                    msg_payload("keyfob-challenge", sealed_ch));

        Bytes sealed_resp;
        int64_t t_cur = t2 + sc.timing.gait_window_us;
        ClaimData running;
        bool have_running = false;

        if (no_pedometer) {
            // Colluder holds K but no pedometer: decrypts the challenge and
            // fabricates a plausible walking speed with no displacement.
            auto req_body = aead::open(setup.key, sealed1);
            auto ch_body = aead::open(setup.key, sealed_ch);
            auto req = req_body ? protocol::parse<protocol::KeyfobRequest>(*req_body)
                                : std::nullopt;
            auto ch = ch_body ? protocol::parse<protocol::KeyfobChallenge>(*ch_body)
                              : std::nullopt;
            if (!req || !ch) {
                finish(r, Verdict{false, Reason::integrity_failure, round}, r.trace, t2,
                       r.initiator_label);
                break;
            }
            protocol::KeyfobResponse forged;
            auto r_kf = hash::prf(setup.key, {ch->challenge, req->nonce});
            forged.hashed_response = hash::sha256(r_kf);
            forged.gait = {0, (clock(t_cur) - req->t_kf_send_us) / 1000, 1400};
            forged.t_kf_cur_us = clock(t_cur);
            forged.nonce = req->nonce;
            sealed_resp = aead::seal(setup.key, rng_adv, protocol::serialize(forged));
        } else {
            auto accepted = keyfob.accept_challenge(sealed_ch, clock(t2));
            if (auto* rej = std::get_if<Reject>(&accepted)) {
                r.metrics = vehicle.metrics();
                finish(r, Verdict{false, rej->reason, round}, r.trace, t2, r.initiator_label);
                break;
            }
            auto& ch = std::get<protocol::KeyfobChallenge>(accepted);
            r.metrics.p2_us = clock(t2) - ch.t_v_send_us;
            double displacement = dist(prover_pos(t_cur), prover_pos(t0));
            sealed_resp = keyfob.respond(ch, clock(t_cur), displacement, rng_kf, running);
            have_running = !terrorist;  // adversaries never emit claims
        }

        if (have_running)
            r.trace.add(t_cur, r.initiator_label, trace::Kind::claim_running,
                        claim_payload(running));
        r.trace.add(t_cur, r.initiator_label, trace::Kind::send,
                    msg_payload("keyfob-response", sealed_resp));

        int64_t t3 = chan.transmit(t_cur, prover_pos(t_cur), vpos);
        if (sc.adversary.mode == AdversaryMode::brute_force_relay) {
            // Wide-band relay that cannot decrypt: substitutes guessed bytes.
            sealed_resp = rng_adv.bytes(sealed_resp.size());
        }
        r.trace.add(t3, "vehicle", trace::Kind::receive,
                    msg_payload("keyfob-response", sealed_resp));

        auto out = vehicle.on_response(sealed_resp, t3, rng_v);
        if (out.kind == protocol::VerifyOutcome::Kind::accept) {
            out.commit.peer = believed_prover;
            r.trace.add(t3, "vehicle", trace::Kind::claim_commit, claim_payload(out.commit));
            if (auto transcript = vehicle.last_transcript())
                r.trace.add(t3, "vehicle", trace::Kind::commitment_transcript,
                            {{"line", transcript->to_line()}});
            auto m = vehicle.metrics();
            finish(r, Verdict{true, {}, m.reinits}, r.trace, t3, "vehicle");
            break;
        }
        if (out.kind == protocol::VerifyOutcome::Kind::reject) {
            finish(r, Verdict{false, out.reason, vehicle.metrics().reinits}, r.trace, t3,
                   "vehicle");
            break;
        }
        sealed_ch = std::move(out.new_challenge);
        t_send = t3 + sc.timing.vehicle_proc_us;
    }

    auto p2 = r.metrics.p2_us;
    r.metrics = vehicle.metrics();
    r.metrics.p2_us = p2;
    r.cost_initiator = keyfob.cost;
    r.cost_verifier = vehicle.cost;
    r.props = properties::check_all(r.trace, "vehicle", believed_prover);
    return r;
}

RunResult run_basic(const Scenario& sc, uint64_t seed) {
    RunResult r;
    r.seed = seed;
    r.verifier_label = "vehicle";
    r.initiator_label = "pd";

    Setup setup = make_setup(sc, seed);
    auto rng_v = RngStream::derive(seed, "vehicle");
    auto rng_pd = RngStream::derive(seed, "pd");
    auto rng_adv = RngStream::derive(seed, "adversary");
    Channel chan{sc, RngStream::derive(seed, "channel"), r.trace};

    auto id_v = protocol::Identity::make(protocol::Role::vehicle, "vehicle");
    auto id_pd = protocol::Identity::make(protocol::Role::peripheral, "pd");

    protocol::VehicleBasic vehicle(id_v, setup.key, &setup.vehicle_pattern);
    vehicle.register_device(id_pd);
    protocol::PeripheralDevice pd(id_pd, setup.key, setup.prover_pattern);
    pd.expected_vehicle = id_v;

    const auto& vpos = sc.world.vehicle_pos;
    auto ppos = [&](int64_t t) { return sc.world.holder_pos(t); };

    Bytes sealed1 = pd.initiate(rng_pd);
    r.trace.add(0, "pd", trace::Kind::send, msg_payload("basic-request", sealed1));
    int64_t t1 = chan.transmit(0, ppos(0), vpos);
    r.trace.add(t1, "vehicle", trace::Kind::receive, msg_payload("basic-request", sealed1));

    auto step1 = vehicle.on_request(sealed1, rng_v);
    if (auto* rej = std::get_if<Reject>(&step1)) {
        r.cost_initiator = pd.cost;
        r.cost_verifier = vehicle.cost;
        finish(r, Verdict{false, rej->reason, 0}, r.trace, t1, "vehicle");
        r.props = properties::check_all(r.trace, "vehicle", "pd");
        return r;
    }
    Bytes sealed_ch = std::get<Bytes>(std::move(step1));
    int64_t t_send = t1 + sc.timing.vehicle_proc_us;
    r.trace.add(t_send, "vehicle", trace::Kind::send, msg_payload("basic-challenge", sealed_ch));
    int64_t t2 = chan.transmit(t_send, vpos, ppos(t_send));
    r.trace.add(t2, "pd", trace::Kind::receive, msg_payload("basic-challenge", sealed_ch));

    ClaimData running;
    auto step2 = pd.respond(sealed_ch, rng_pd, running);
    if (auto* rej = std::get_if<Reject>(&step2)) {
        r.cost_initiator = pd.cost;
        r.cost_verifier = vehicle.cost;
        finish(r, Verdict{false, rej->reason, 0}, r.trace, t2, "pd");
        r.props = properties::check_all(r.trace, "vehicle", "pd");
        return r;
    }
    Bytes sealed_resp = std::get<Bytes>(std::move(step2));
    r.trace.add(t2, "pd", trace::Kind::claim_running, claim_payload(running));
    r.trace.add(t2, "pd", trace::Kind::send, msg_payload("basic-response", sealed_resp));
    int64_t t3 = chan.transmit(t2, ppos(t2), vpos);
    if (sc.adversary.mode == AdversaryMode::brute_force_relay)
        sealed_resp = rng_adv.bytes(sealed_resp.size());
    r.trace.add(t3, "vehicle", trace::Kind::receive, msg_payload("basic-response", sealed_resp));

    auto step3 = vehicle.on_response(sealed_resp);
    if (auto* rej = std::get_if<Reject>(&step3)) {
        finish(r, Verdict{false, rej->reason, 0}, r.trace, t3, "vehicle");
    } else {
        auto commit = std::get<ClaimData>(step3);
        commit.peer = "pd";
        r.trace.add(t3, "vehicle", trace::Kind::claim_commit, claim_payload(commit));
        finish(r, Verdict{true, {}, 0}, r.trace, t3, "vehicle");
    }
    r.cost_initiator = pd.cost;
    r.cost_verifier = vehicle.cost;
    r.props = properties::check_all(r.trace, "vehicle", "pd");
    return r;
}

RunResult run_edr_guess(const Scenario& sc, uint64_t seed) {
    RunResult r;
    r.seed = seed;
    r.verifier_label = "vehicle";
    r.initiator_label = "adversary";

    auto true_rng = RngStream::derive(seed, "edr-true");
    auto adv_rng = RngStream::derive(seed, "edr-adversary");
    edr::MobilityPattern truth, guess;
    for (uint64_t i = 0; i < sc.guess_slots; ++i) {
        int64_t t = static_cast<int64_t>(i) * 1'000'000;
        truth.record_event({t, static_cast<edr::EventKind>(true_rng.below(sc.guess_kinds)),
                            static_cast<int64_t>(true_rng.below(sc.guess_levels)) * 1000});
        guess.record_event({t, static_cast<edr::EventKind>(adv_rng.below(sc.guess_kinds)),
                            static_cast<int64_t>(adv_rng.below(sc.guess_levels)) * 1000});
    }
    bool hit = truth.digest() == guess.digest();
    finish(r, Verdict{hit, Reason::digest_mismatch, 0}, r.trace, 0, "vehicle");
    r.props = properties::check_all(r.trace, "vehicle", "adversary");
    return r;
}

}  // namespace

std::string Verdict::to_string() const {
    std::string s = reinits > 0 ? "reinit-then-" : "";
    if (accepted) return s + "accept";
    return s + "reject(" + protocol::to_string(reason) + ")";
}

RunResult run_scenario(const Scenario& sc) { return run_scenario(sc, sc.seed); }

RunResult run_scenario(const Scenario& sc, uint64_t seed) {
    if (sc.adversary.mode == AdversaryMode::edr_guess) return run_edr_guess(sc, seed);
    if (sc.scheme == Scheme::basic) return run_basic(sc, seed);
    return run_keyfob(sc, seed);
}

bool expect_match(const Scenario& sc, const Verdict& v) {
    if (sc.expect.empty()) return true;
    if (sc.expect == "accept") return v.accepted;
    if (sc.expect == "reject") return !v.accepted;
    if (sc.expect == "reinit") return v.reinits > 0;
    return false;
}

std::string render_report(const Scenario& sc, const RunResult& r) {
    std::ostringstream out;
    out << "# perimeter-report v1 hash=" << hash::kHashName << " build=" << trace::kBuildId
        << "\n";
    out << "scenario: " << sc.id << "\n";
    out << "seed: " << r.seed << "\n";
    out << "scheme: " << (sc.scheme == Scheme::basic ? "basic" : "keyfob");
    const char* backend = sc.backend == protocol::Backend::schnorr    ? "schnorr"
                          : sc.backend == protocol::Backend::pedersen ? "pedersen"
                                                                      : "none";
    out << " backend: " << backend << "\n";
    out << "verdict: " << r.verdict.to_string() << "\n";
    if (!sc.expect.empty())
        out << "expect: " << sc.expect << " match: " << (expect_match(sc, r.verdict) ? "yes" : "no")
            << "\n";
    const auto& m = r.metrics;
    out << "hops_us: p1=" << m.p1_us << " p2=" << m.p2_us << " p3=" << m.p3_us << "\n";
    out << "gait: w_kf_us=" << m.w_kf_us << " w_v_us=" << m.w_v_us
        << " vel_kf_milli=" << m.vel_kf_milli << " vel_v_milli=" << m.vel_v_milli
        << " reinits=" << m.reinits << "\n";
    out << "cost " << r.initiator_label << ": exp=" << r.cost_initiator.exponentiations
        << " hash=" << r.cost_initiator.hash_digests << "\n";
    out << "cost " << r.verifier_label << ": exp=" << r.cost_verifier.exponentiations
        << " hash=" << r.cost_verifier.hash_digests << "\n";
    std::string prover = sc.scheme == Scheme::basic ? "pd" : "keyfob";
    out << r.props.render(r.verifier_label, prover);
    return out.str();
}

MonteCarloResult monte_carlo(const Scenario& sc) { return monte_carlo(sc, sc.trials); }

MonteCarloResult monte_carlo(const Scenario& sc, uint64_t trials) {
    MonteCarloResult mc;
    mc.trials = trials;
    for (uint64_t i = 0; i < trials; ++i) {
        uint64_t trial_seed = RngStream::derive(sc.seed, "trial-" + std::to_string(i)).next_u64();
        auto r = run_scenario(sc, trial_seed);
        if (r.verdict.accepted) ++mc.accepts;
        if (r.verdict.reinits > 0) ++mc.reinits;
    }
    return mc;
}

AdvantageResult estimate_advantage(uint64_t seed, int rounds, uint64_t trials) {
    AdvantageResult res;
    res.rounds = rounds;
    res.trials = trials;
    auto verifier = RngStream::derive(seed, "advantage-verifier");
    auto adversary = RngStream::derive(seed, "advantage-adversary");
    for (uint64_t i = 0; i < trials; ++i) {
        bool won = true;
        for (int j = 0; j < rounds; ++j)
            if (verifier.below(2) != adversary.below(2)) won = false;  // keep streams aligned
        if (won) ++res.wins;
    }
    res.advantage = trials ? static_cast<double>(res.wins) / static_cast<double>(trials) : 0.0;
    res.analytic = std::pow(2.0, -rounds);
    res.sigma = trials ? std::sqrt(res.analytic * (1.0 - res.analytic) /
                                   static_cast<double>(trials))
                       : 0.0;
    res.z = res.sigma > 0 ? (res.advantage - res.analytic) / res.sigma : 0.0;
    return res;
}

std::string AdvantageResult::render() const {
    std::ostringstream out;
    out << "rounds=" << rounds << " trials=" << trials << " wins=" << wins
        << " advantage=" << advantage << " analytic=" << analytic << " sigma=" << sigma
        << " z=" << z << "\n";
    return out.str();
}

std::string sweep(const Scenario& base, const std::vector<SweepAxis>& grid) {
    std::ostringstream out;
    for (const auto& axis : grid) out << axis.first << "\t";
    out << "verdict\treinits\tp1_us\tdelta_vel_milli\tmatch\n";
    if (grid.empty()) return out.str();

    std::vector<size_t> idx(grid.size(), 0);
    for (;;) {
        Scenario sc = base;
        for (size_t a = 0; a < grid.size(); ++a)
            sc = with_override(sc, grid[a].first, grid[a].second[idx[a]]);
        auto r = run_scenario(sc);
        for (size_t a = 0; a < grid.size(); ++a) out << grid[a].second[idx[a]] << "\t";
        out << r.verdict.to_string() << "\t" << r.verdict.reinits << "\t" << r.metrics.p1_us
            << "\t" << std::llabs(r.metrics.vel_v_milli - r.metrics.vel_kf_milli) << "\t"
            << (expect_match(sc, r.verdict) ? "yes" : "no") << "\n";

        size_t a = grid.size();
        while (a > 0) {
            --a;
            if (++idx[a] < grid[a].second.size()) break;
            idx[a] = 0;
            if (a == 0) return out.str();
        }
    }
}

}  // namespace perimeter::sim
