#include "trace.hpp"

#include <sstream>
#include <stdexcept>

#include "hash.hpp"

namespace perimeter::trace {

const char* to_string(Kind k) {
    switch (k) {
        case Kind::send: return "send";
        case Kind::receive: return "receive";
        case Kind::relay: return "relay";
        case Kind::claim_running: return "claim-running";
        case Kind::claim_commit: return "claim-commit";
        case Kind::verdict: return "verdict";
        case Kind::commitment_transcript: return "commitment-transcript";
    }
    return "unknown";
}

std::optional<Kind> kind_from_string(const std::string& s) {
    static const std::map<std::string, Kind> table = {
        {"send", Kind::send},
        {"receive", Kind::receive},
        {"relay", Kind::relay},
        {"claim-running", Kind::claim_running},
        {"claim-commit", Kind::claim_commit},
        {"verdict", Kind::verdict},
        {"commitment-transcript", Kind::commitment_transcript},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::string TraceEvent::payload_get(const std::string& key) const {
    for (const auto& [k, v] : payload)
        if (k == key) return v;
    return {};
}

void Trace::add(int64_t t_us, const std::string& actor, Kind kind,
                std::vector<std::pair<std::string, std::string>> payload) {
    if (!events_.empty() && t_us < events_.back().t_us)
        throw std::logic_error("trace time regression");
    events_.push_back(TraceEvent{t_us, actor, kind, std::move(payload)});
}

std::string Trace::render(uint64_t seed) const {
    std::ostringstream os;
    os << "# perimeter-trace v1 hash=" << hash::kHashName << " build=" << kBuildId
       << " seed=" << seed << "\n";
    for (const auto& e : events_) {
        os << e.t_us << ' ' << e.actor << ' ' << to_string(e.kind);
        for (const auto& [k, v] : e.payload) os << ' ' << k << '=' << v;
        os << '\n';
    }
    return os.str();
}

Trace Trace::parse(const std::string& text) {
    Trace tr;
    std::istringstream is(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        TraceEvent e;
        std::string kind_s;
        if (!(ls >> e.t_us >> e.actor >> kind_s))
            throw std::runtime_error("malformed trace line " + std::to_string(lineno));
        auto kind = kind_from_string(kind_s);
        if (!kind) throw std::runtime_error("unknown event kind on line " + std::to_string(lineno));
        e.kind = *kind;
        std::string tok;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("malformed payload token on line " +
                                         std::to_string(lineno));
            e.payload.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        }
        if (!tr.events_.empty() && e.t_us < tr.events_.back().t_us)
            throw std::runtime_error("time regression on line " + std::to_string(lineno));
        tr.events_.push_back(std::move(e));
    }
    return tr;
}

}  // namespace perimeter::trace
