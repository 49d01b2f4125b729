// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "commitments.hpp"
#include "edr.hpp"
#include "properties.hpp"
#include "sim.hpp"

using namespace perimeter;
using group::GroupElement;
using group::Scalar;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %2d %s  %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    if (!ok) ++g_failures;
}

sim::Scenario load(const std::string& name) {
    return sim::load_scenario_file("scenarios/" + name);
}

sim::Scenario override_all(sim::Scenario sc,
                           const std::vector<std::pair<std::string, std::string>>& kvs) {
    for (const auto& [k, v] : kvs) sc = sim::with_override(sc, k, v);
    return sc;
}

const group::GroupParams P = group::desk_params();

// 1. Exhaustive Schnorr completeness over all 11^3 triples; 10^4 random
// honest Pedersen runs.
void criterion1() {
    uint64_t schnorr_fail = 0;
    for (BigInt a = 0; a < P.q; ++a) {
        commitments::SchnorrKeypair kp{Scalar{a, P},
                                       group::modexp(GroupElement{P.g, P}, Scalar{a, P}, P)};
        for (BigInt x = 0; x < P.q; ++x) {
            commitments::SchnorrCommitment cm{
                Scalar{x, P}, group::modexp(GroupElement{P.g, P}, Scalar{x, P}, P)};
            for (BigInt k = 0; k < P.q; ++k) {
                auto rho = commitments::schnorr_respond(kp, cm, Scalar{k, P}, P);
                if (!commitments::schnorr_verify(kp.A, cm.X, Scalar{k, P}, rho, P))
                    ++schnorr_fail;
            }
        }
    }
    uint64_t pedersen_fail = 0;
    RngStream rng(101);
    for (int i = 0; i < 10000; ++i) {
        auto kp = commitments::pedersen_keygen(rng, P);
        auto cm = commitments::pedersen_commit(rng, P);
        auto k = group::random_scalar(rng, P);
        auto [r1, r2] = commitments::pedersen_respond(kp, cm, k, P);
        if (!commitments::pedersen_verify(kp.X, cm.C, k, r1, r2, P)) ++pedersen_fail;
    }
    report(1, schnorr_fail == 0 && pedersen_fail == 0,
           "completeness: schnorr 11^3 exhaustive failures=" + std::to_string(schnorr_fail) +
               ", pedersen 10^4 random failures=" + std::to_string(pedersen_fail));
}

// 2. Forged responses accepted at exactly the enumerated 1/q rate, within
// 3 sigma over 10^5 trials, for both schemes.
void criterion2() {
    const int n = 100000;
    const double p_hit = 1.0 / 11;
    const double sigma = std::sqrt(n * p_hit * (1 - p_hit));
    RngStream rng(202);
    int schnorr_hits = 0, pedersen_hits = 0;
    for (int i = 0; i < n; ++i) {
        auto kp = commitments::schnorr_keygen(rng, P);
        auto cm = commitments::schnorr_commit(rng, P);
        auto k = group::random_scalar(rng, P);
        if (commitments::schnorr_verify(kp.A, cm.X, k, group::random_scalar(rng, P), P))
            ++schnorr_hits;

        auto pkp = commitments::pedersen_keygen(rng, P);
        auto pcm = commitments::pedersen_commit(rng, P);
        auto pk = group::random_scalar(rng, P);
        if (commitments::pedersen_verify(pkp.X, pcm.C, pk, group::random_scalar(rng, P),
                                         group::random_scalar(rng, P), P))
            ++pedersen_hits;
    }
    const double expected = n * p_hit;
    bool ok = std::abs(schnorr_hits - expected) <= 3 * sigma &&
              std::abs(pedersen_hits - expected) <= 3 * sigma;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "forgery rate: schnorr %d, pedersen %d, expected %.1f +- %.1f (3 sigma)",
                  schnorr_hits, pedersen_hits, expected, 3 * sigma);
    report(2, ok, buf);
}

// 3. Extractor recovers the long-term key from every forked transcript pair.
void criterion3() {
    RngStream rng(303);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        auto kp = commitments::schnorr_keygen(rng, P);
        auto cm = commitments::schnorr_commit(rng, P);
        auto k1 = group::random_scalar(rng, P);
        auto k2 = k1;
        while (k2.v == k1.v) k2 = group::random_scalar(rng, P);
        auto rho1 = commitments::schnorr_respond(kp, cm, k1, P);
        auto rho2 = commitments::schnorr_respond(kp, cm, k2, P);
        if (commitments::schnorr_extract(k1, rho1, k2, rho2, P).v != kp.a.v) ++bad;
    }
    report(3, bad == 0, "extractor mismatches over 10^3 forked pairs: " + std::to_string(bad));
}

// 4. 10^3 honest scenarios across holder speeds 0-3 m/s and travel <= 5 ms
// all accept with |delta vel| <= 0.1 m/s.
void criterion4() {
    auto base = load("honest.json");
    int rejects = 0, gait_off = 0;
    int64_t worst = 0;
    for (int i = 0; i < 1000; ++i) {
        const double speed = 3.0 * i / 999.0;
        const double d0 = 25.0 + (i % 10) * 22.5;  // travel 0.5-5.0 ms at 50 km/s
        char path[96];
        std::snprintf(path, sizeof path, "[[0,%.3f,0],[3,%.3f,0]]", d0, d0 - 3 * speed);
        auto sc = override_all(base, {{"world.holder_path", path}});
        auto r = sim::run_scenario(sc, 1000 + i);
        if (!r.verdict.accepted) ++rejects;
        const int64_t dv = std::llabs(r.metrics.vel_v_milli - r.metrics.vel_kf_milli);
        worst = std::max(worst, dv);
        if (dv > 100) ++gait_off;
    }
    report(4, rejects == 0 && gait_off == 0,
           "honest sweep: rejects=" + std::to_string(rejects) +
               ", gait deviations > 0.1 m/s: " + std::to_string(gait_off) +
               ", worst delta-vel (milli m/s): " + std::to_string(worst));
}

// 5. Relay grid: accept iff every per-hop added delay <= t_epsilon; every
// super-threshold relay detected.
void criterion5() {
    auto base = load("relay.json");  // honest travel 2 ms, t_travel_max 2 ms, eps 1 ms
    const int64_t eps_us = base.timing.t_epsilon_us;
    bool ok = true;
    std::string detail = "grid:";
    for (const char* consistency : {"consistent", "inconsistent"}) {
        for (double factor : {0.0, 0.5, 1.0, 2.0, 10.0}) {
            const double t_relay = factor * eps_us / 1e6;
            auto sc = override_all(base, {{"adversary.t_relay", std::to_string(t_relay)},
                                          {"adversary.consistency", consistency},
                                          {"expect", "accept"}});
            // Effective per-hop added delay: t_relay per hop when consistent,
            // up to 2*t_relay on hop 2 under the default skewed schedule.
            int64_t per_hop_max = sc.adversary.t_relay_us;
            if (sc.adversary.consistency == sim::Consistency::inconsistent)
                for (int64_t d : sc.adversary.schedule_us) per_hop_max = std::max(per_hop_max, d);
            const bool should_accept = per_hop_max <= eps_us;
            auto r = sim::run_scenario(sc);
            if (r.verdict.accepted != should_accept) ok = false;

            // Gait flag must fire whenever window inflation exceeds
            // vel_epsilon * W_kf / disp_kf.
            if (r.verdict.accepted) {
                const int64_t inflation = r.metrics.w_v_us - r.metrics.w_kf_us;
                const double threshold =
                    0.1 * r.metrics.w_kf_us / (r.metrics.vel_kf_milli / 1000.0 *
                                               r.metrics.w_kf_us / 1e6);
                const int64_t dv = std::llabs(r.metrics.vel_v_milli - r.metrics.vel_kf_milli);
                if (inflation > threshold && dv <= 100) ok = false;
            }
            detail += std::string(" ") + consistency[0] + std::to_string(factor).substr(0, 3) +
                      (r.verdict.accepted ? "=A" : "=R");
        }
    }
    report(5, ok, detail);
}

// 6. Distance fraud: 0 acceptances over 10^4 random-response trials;
// replayed responses always rejected by the nonce check.
void criterion6() {
    auto mc = sim::monte_carlo(load("distance_fraud.json"), 10000);
    bool replay_ok = true;
    auto replay_sc = load("distance_fraud_replay.json");
    for (int i = 0; i < 1000; ++i) {
        auto r = sim::run_scenario(replay_sc, 5000 + i);
        if (r.verdict.accepted || r.verdict.reason != protocol::Reason::nonce_mismatch)
            replay_ok = false;
    }
    report(6, mc.accepts == 0 && replay_ok,
           "distance fraud: random-response accepts " + std::to_string(mc.accepts) +
               "/10^4, replay always nonce-mismatch: " + (replay_ok ? "yes" : "no"));
}

// 7. Guessing-game advantage within 3 sigma of 2^-n for n in {1,2,4,8}.
void criterion7() {
    bool ok = true;
    std::string detail = "advantage:";
    for (int n : {1, 2, 4, 8}) {
        auto res = sim::estimate_advantage(7000 + n, n, 1000000);
        if (std::abs(res.z) > 3.0) ok = false;
        char buf[64];
        std::snprintf(buf, sizeof buf, " n=%d adv=%.6f z=%+.2f", n, res.advantage, res.z);
        detail += buf;
    }
    report(7, ok, detail);
}

// 8. Stale-digest keyfob rejected in 100% of 10^3 runs; synced keyfob never
// rejected for digest reasons.
void criterion8() {
    auto stale = load("stale_keyfob.json");
    int stale_rejects = 0;
    for (int i = 0; i < 1000; ++i) {
        auto r = sim::run_scenario(stale, 8000 + i);
        if (!r.verdict.accepted && r.verdict.reason == protocol::Reason::digest_mismatch)
            ++stale_rejects;
    }
    auto synced = load("honest.json");
    int synced_digest_rejects = 0;
    for (int i = 0; i < 1000; ++i) {
        auto r = sim::run_scenario(synced, 9000 + i);
        if (!r.verdict.accepted && r.verdict.reason == protocol::Reason::digest_mismatch)
            ++synced_digest_rejects;
    }
    report(8, stale_rejects == 1000 && synced_digest_rejects == 0,
           "stale digest rejects " + std::to_string(stale_rejects) +
               "/1000, synced digest rejects " + std::to_string(synced_digest_rejects) +
               "/1000");
}

// 9. Lowe hierarchy across the corpus; a successful relay replay (constructed
// trace, since timed relays never reach a commit in the simulator) violates
// injective agreement while the weaker properties hold.
void criterion9() {
    bool ok = true;
    // Honest corpus traces satisfy everything; the checker never reports a
    // stronger property holding while a weaker one fails.
    for (const char* name : {"honest.json", "basic.json", "schnorr.json", "pedersen.json",
                             "relay.json", "mafia.json", "stale_keyfob.json",
                             "terrorist.json", "distance_fraud.json"}) {
        auto r = sim::run_scenario(load(name));
        const auto& p = r.props;
        if (p.agreement.holds && !p.noninjective_agreement.holds) ok = false;
        if (p.noninjective_agreement.holds && !p.weak_agreement.holds) ok = false;
        if (p.weak_agreement.holds && !p.aliveness.holds) ok = false;
        if (std::string(name) == "honest.json" &&
            !(p.aliveness.holds && p.weak_agreement.holds && p.noninjective_agreement.holds &&
              p.agreement.holds))
            ok = false;
    }
    // Mafia-fraud replay success: one keyfob run answered two vehicle commits.
    trace::Trace mafia;
    using trace::Kind;
    std::vector<std::pair<std::string, std::string>> data{
        {"peer", "vehicle"}, {"nonce", "n1"}, {"chal", "c1"}, {"resp", "r1"}};
    std::vector<std::pair<std::string, std::string>> commit_data{
        {"peer", "keyfob"}, {"nonce", "n1"}, {"chal", "c1"}, {"resp", "r1"}};
    mafia.add(0, "keyfob", Kind::claim_running, data);
    mafia.add(100, "leech", Kind::relay, {{"hop", "2"}});
    mafia.add(200, "ghost", Kind::relay, {{"hop", "2"}});
    mafia.add(1000, "vehicle", Kind::claim_commit, commit_data);
    mafia.add(2000, "vehicle", Kind::claim_commit, commit_data);
    auto p = properties::check_all(mafia, "vehicle", "keyfob");
    bool mafia_ok = p.aliveness.holds && p.weak_agreement.holds &&
                    p.noninjective_agreement.holds && !p.agreement.holds;
    if (!mafia_ok) ok = false;
    report(9, ok,
           std::string("hierarchy consistent on corpus; relay-replay trace: aliveness/weak/"
                       "noninj hold, injective agreement violated: ") +
               (mafia_ok ? "yes" : "no"));
}

// 10. Terrorist fraud non-resistance: colluder holding K is accepted.
void criterion10() {
    auto r = sim::run_scenario(load("terrorist.json"));
    report(10, r.verdict.accepted,
           std::string("colluder with K at honest distance: ") + r.verdict.to_string() +
               " (documented non-resistance)");
}

// 11. Cost claim: instrumented counters per party. The backends add exactly
// (schnorr: +1, pedersen: +2) exponentiations on the prover side, matching
// the footnote. The base claim of 3 exponentiations and 1 digest per party
// does not match the measured handshake, so both are reported.
void criterion11() {
    auto run = [&](const std::string& name) { return sim::run_scenario(load(name)); };
    auto basic = run("basic.json");
    auto plain = run("honest.json");
    auto schnorr = run("schnorr.json");
    auto pedersen = run("pedersen.json");

    const uint64_t s_kf = schnorr.cost_initiator.exponentiations -
                          plain.cost_initiator.exponentiations;
    const uint64_t p_kf = pedersen.cost_initiator.exponentiations -
                          plain.cost_initiator.exponentiations;
    const uint64_t s_v = schnorr.cost_verifier.exponentiations -
                         plain.cost_verifier.exponentiations;
    const uint64_t p_v = pedersen.cost_verifier.exponentiations -
                         plain.cost_verifier.exponentiations;
    bool ok = s_kf == 1 && p_kf == 2;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "prover deltas: schnorr +%llu, pedersen +%llu (footnote: +1/+2); verifier "
                  "deltas +%llu/+%llu; base scheme measured exp=%llu hash=%llu per initiator "
                  "vs claimed (3,1) -- discrepancy reported",
                  (unsigned long long)s_kf, (unsigned long long)p_kf, (unsigned long long)s_v,
                  (unsigned long long)p_v, (unsigned long long)basic.cost_initiator.exponentiations,
                  (unsigned long long)basic.cost_initiator.hash_digests);
    report(11, ok, buf);
}

// 12. EDR guessing: 512-space success within 3 sigma of 1/512 at 10^4
// trials; zero successes for spaces beyond 2^64 at 10^6 trials.
void criterion12() {
    if (edr::guess_space_size(2, 4, 3) != 512 || edr::guess_space_size(6, 16, 10)) {
        report(12, false, "guess space arithmetic wrong");
        return;
    }
    auto small = sim::monte_carlo(load("edr_guess.json"), 10000);
    const double p_hit = 1.0 / 512;
    const double sigma = std::sqrt(10000 * p_hit * (1 - p_hit));
    const bool small_ok = std::abs(static_cast<double>(small.accepts) - 10000 * p_hit) <=
                          3 * sigma;
    auto large = sim::monte_carlo(load("edr_guess_large.json"), 1000000);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "512-space hits %llu/10^4 (expected %.1f +- %.1f), >2^64-space hits %llu/10^6",
                  (unsigned long long)small.accepts, 10000 * p_hit, 3 * sigma,
                  (unsigned long long)large.accepts);
    report(12, small_ok && large.accepts == 0, buf);
}

// 13. Determinism: byte-identical trace and report on re-run, across
// representative scenarios.
void criterion13() {
    bool ok = true;
    for (const char* name : {"honest.json", "relay.json", "pedersen.json", "mafia.json",
                             "distance_fraud_replay.json", "terrorist_nopedometer.json"}) {
        auto sc = load(name);
        auto a = sim::run_scenario(sc);
        auto b = sim::run_scenario(sc);
        if (a.trace.render(a.seed) != b.trace.render(b.seed)) ok = false;
        if (sim::render_report(sc, a) != sim::render_report(sc, b)) ok = false;
    }
    report(13, ok, "re-runs byte-identical across 6 scenario kinds");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    criterion13();
    if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
    else std::printf("all 13 criteria PASS\n");
    return g_failures ? 1 : 0;
}
