#include "properties.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace perimeter::properties {

namespace {

struct ClaimEvent {
    size_t index;
    std::string peer;
    std::string nonce;
    std::string chal;
    std::string resp;
};

bool same_data(const ClaimEvent& a, const ClaimEvent& b) {
    return a.nonce == b.nonce && a.chal == b.chal && a.resp == b.resp;
}

std::vector<ClaimEvent> claims_of(const trace::Trace& tr, const std::string& actor,
                                  trace::Kind kind) {
    std::vector<ClaimEvent> out;
    const auto& events = tr.events();
    for (size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.actor != actor || e.kind != kind) continue;
        ClaimEvent c{i, e.payload_get("peer"), e.payload_get("nonce"), e.payload_get("chal"),
                     e.payload_get("resp")};
        if (c.nonce.empty())
            throw std::runtime_error("malformed trace: claim without session data at event " +
                                     std::to_string(i));
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

PropertyResult check_aliveness(const trace::Trace& tr, const std::string& verifier,
                               const std::string& prover) {
    auto commits = claims_of(tr, verifier, trace::Kind::claim_commit);
    auto runnings = claims_of(tr, prover, trace::Kind::claim_running);
    PropertyResult r;
    for (const auto& c : commits) {
        if (c.peer != prover) continue;
        bool alive = false;
        for (const auto& run : runnings)
            if (run.index < c.index) { alive = true; break; }
        if (!alive) {
            r.holds = false;
            r.witness.push_back(c.index);
        }
    }
    return r;
}

PropertyResult check_weak_agreement(const trace::Trace& tr, const std::string& verifier,
                                    const std::string& prover) {
    auto commits = claims_of(tr, verifier, trace::Kind::claim_commit);
    auto runnings = claims_of(tr, prover, trace::Kind::claim_running);
    PropertyResult r;
    for (const auto& c : commits) {
        if (c.peer != prover) continue;
        bool ok = false;
        for (const auto& run : runnings)
            if (run.index < c.index && run.peer == verifier) { ok = true; break; }
        if (!ok) {
            r.holds = false;
            r.witness.push_back(c.index);
        }
    }
    return r;
}

PropertyResult check_noninjective_agreement(const trace::Trace& tr, const std::string& verifier,
                                            const std::string& prover) {
    auto commits = claims_of(tr, verifier, trace::Kind::claim_commit);
    auto runnings = claims_of(tr, prover, trace::Kind::claim_running);
    PropertyResult r;
    for (const auto& c : commits) {
        if (c.peer != prover) continue;
        bool ok = false;
        for (const auto& run : runnings)
            if (run.index < c.index && run.peer == verifier && same_data(run, c)) {
                ok = true;
                break;
            }
        if (!ok) {
            r.holds = false;
            r.witness.push_back(c.index);
        }
    }
    return r;
}

PropertyResult check_agreement(const trace::Trace& tr, const std::string& verifier,
                               const std::string& prover) {
    auto commits = claims_of(tr, verifier, trace::Kind::claim_commit);
    auto runnings = claims_of(tr, prover, trace::Kind::claim_running);
    PropertyResult r;
    std::set<size_t> used;
    for (const auto& c : commits) {
        if (c.peer != prover) continue;
        bool matched = false;
        size_t conflict = SIZE_MAX;
        for (const auto& run : runnings) {
            if (run.index >= c.index || run.peer != verifier || !same_data(run, c)) continue;
            if (used.contains(run.index)) {
                conflict = run.index;
                continue;
            }
            used.insert(run.index);
            matched = true;
            break;
        }
        if (!matched) {
            r.holds = false;
            r.witness.push_back(c.index);
            if (conflict != SIZE_MAX) r.witness.push_back(conflict);
        }
    }
    return r;
}

PropertyReport check_all(const trace::Trace& tr, const std::string& verifier,
                         const std::string& prover) {
    PropertyReport rep;
    rep.aliveness = check_aliveness(tr, verifier, prover);
    rep.weak_agreement = check_weak_agreement(tr, verifier, prover);
    rep.noninjective_agreement = check_noninjective_agreement(tr, verifier, prover);
    rep.agreement = check_agreement(tr, verifier, prover);
    return rep;
}

std::string PropertyReport::render(const std::string& verifier, const std::string& prover) const {
    auto line = [](const char* name, const PropertyResult& r) {
        std::ostringstream os;
        os << name << ' ' << (r.holds ? "holds" : "violated");
        if (!r.holds) {
            os << " witness=";
            for (size_t i = 0; i < r.witness.size(); ++i)
                os << (i ? "," : "") << r.witness[i];
        }
        os << '\n';
        return os.str();
    };
    std::string out = "# properties verifier=" + verifier + " prover=" + prover + "\n";
    out += line("aliveness", aliveness);
    out += line("weak-agreement", weak_agreement);
    out += line("noninjective-agreement", noninjective_agreement);
    out += line("agreement", agreement);
    return out;
}

}  // namespace perimeter::properties
