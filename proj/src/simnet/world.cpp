#include "dnsgap/simnet/world.hpp"

#include <algorithm>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/records.hpp"
#include "dnsgap/core/util.hpp"
#include "dnsgap/domainvet/vet.hpp"
#include "dnsgap/probe/dns_message.hpp"
#include "dnsgap/simnet/censor.hpp"

namespace dnsgap::sim {

json to_json(const TruthCell& t) {
    return {{"task", to_json(t.task)},
            {"outcome", std::string(to_string(t.outcome))},
            {"policy", t.policy},
            {"injected", t.injected},
            {"leaked_upstream", t.leaked_upstream}};
}

TruthCell truth_cell_from_json(const json& j) {
    TruthCell t;
    t.task = probe_task_from_json(j.at("task"));
    t.outcome = parse_outcome(j.at("outcome").get<std::string>());
    t.policy = j.value("policy", "");
    t.injected = j.value("injected", false);
    t.leaked_upstream = j.value("leaked_upstream", false);
    return t;
}

World::World(SimWorldConfig config) : config_(std::move(config)) {
    validate(config_);
    trusted_ = config_.trusted.empty() ? default_trusted_resolvers() : config_.trusted;
    for (std::size_t i = 0; i < config_.resolvers.size(); ++i) {
        const auto& r = config_.resolvers[i];
        endpoints_.emplace(IpAddress(r.v4), Endpoint{i, Interface::V4});
        endpoints_.emplace(IpAddress(r.v6), Endpoint{i, Interface::V6});
        pair_index_.emplace(r.v4.to_string() + "|" + r.v6.to_string(), i);
    }
    for (const auto& t : trusted_) {
        if (endpoints_.count(t)) throw ConfigInvalid("trusted resolver " + t.to_string() + " is also a simulated resolver");
    }
    for (std::size_t i = 0; i < config_.domains.size(); ++i) {
        domain_index_.emplace(normalize_name(config_.domains[i].name), i);
    }
}

std::vector<ResolverPair> World::pairs() const {
    std::vector<ResolverPair> out;
    out.reserve(config_.resolvers.size());
    for (const auto& r : config_.resolvers) {
        out.push_back({r.v4, r.v6, r.v6_kind(), r.country, r.asn, r.as_name, r.conn_type});
    }
    return out;
}

const SimResolver* World::resolver_by_pair_id(const std::string& pair_id) const {
    auto it = pair_index_.find(pair_id);
    return it == pair_index_.end() ? nullptr : &config_.resolvers[it->second];
}

const SimDomain* World::domain(std::string_view name) const {
    auto it = domain_index_.find(normalize_name(name));
    return it == domain_index_.end() ? nullptr : &config_.domains[it->second];
}

std::uint64_t World::query_key(std::string_view scope, const IpAddress& server, std::string_view qname, RrType qtype,
                               bool rd) const {
    std::uint64_t h = hash_combine(config_.seed, scope);
    h = hash_combine(h, server.to_string());
    h = hash_combine(h, normalize_name(qname));
    h = hash_combine(h, static_cast<std::uint64_t>(qtype));
    return hash_combine(h, rd ? 1u : 0u);
}

double World::jitter(std::uint64_t key) const { return unit_from_hash(mix64(key)) * config_.latency.jitter_ms; }

std::vector<IpAddress> World::authentic(const SimDomain& d, RrType qtype) const {
    std::vector<IpAddress> out;
    if (qtype == RrType::A) {
        for (const auto& a : d.a) out.emplace_back(a);
    } else {
        for (const auto& a : d.aaaa) out.emplace_back(a);
    }
    return out;
}

Delivery World::deliver(const IpAddress& server, std::string_view qname, RrType qtype, bool rd) const {
    Delivery out;
    const auto& lat = config_.latency;
    const SimDomain* dom = domain(qname);
    const auto key = query_key("path", server, qname, qtype, rd);

    if (std::find(trusted_.begin(), trusted_.end(), server) != trusted_.end()) {
        Piece p;
        p.delay_ms = 2 * lat.hop_ms + jitter(key);
        if (dom) p.answers = authentic(*dom, qtype);
        else p.rcode = dns::NxDomain;
        out.pieces.push_back(std::move(p));
        return out;
    }
    auto ep = endpoints_.find(server);
    if (ep == endpoints_.end()) return out;
    const SimResolver& r = config_.resolvers[ep->second.resolver];

    CensorContext ctx;
    ctx.family = ep->second.iface == Interface::V4 ? AddressFamily::V4 : AddressFamily::V6;
    ctx.encapsulated_6to4 = ep->second.iface == Interface::V6 && is_six_to_four(r.v6_kind());
    ctx.rrtype = qtype;
    ctx.rd_flag = rd;
    ctx.domain = std::string(qname);

    bool original_arrives = true;
    std::optional<Piece> forged;
    for (const auto& policy : config_.policies) {
        if (!policy_applies(policy, r)) continue;
        ctx.draw = unit_from_hash(query_key("client/" + policy.name, server, qname, qtype, rd));
        const auto action = censor_decide(policy, ctx);
        if (action.kind == ActionKind::Pass) continue;
        out.policy = policy.name;
        out.client_action = action;
        if (action.kind == ActionKind::Drop) {
            original_arrives = false;
        } else {
            forged = Piece{lat.hop_ms / 2 + jitter(key ^ 1), dns::NoError, {*action.address}, true, true};
            if (policy.drops_original) original_arrives = false;
        }
        break;
    }

    if (original_arrives) {
        Piece auth;
        auth.delay_ms = 2 * lat.hop_ms + jitter(key ^ 2);
        if (!dom) {
            auth.rcode = dns::NxDomain;
        } else if (rd && r.cache == CacheBehavior::AlwaysRecurse) {
            // The resolver forwards upstream over IPv4 with RD set, so its own
            // lookup crosses any censor in scope.
            out.recursed = true;
            auth.delay_ms += lat.upstream_ms;
            auth.answers = authentic(*dom, qtype);
            CensorContext up;
            up.family = AddressFamily::V4;
            up.rrtype = qtype;
            up.rd_flag = true;
            up.domain = ctx.domain;
            for (const auto& policy : config_.policies) {
                if (!policy_applies(policy, r)) continue;
                up.draw = unit_from_hash(query_key("upstream/" + policy.name, IpAddress(r.v4), qname, qtype, true));
                const auto action = censor_decide(policy, up);
                if (action.kind == ActionKind::Pass) continue;
                out.upstream_action = action;
                if (out.policy.empty()) out.policy = policy.name;
                if (action.kind == ActionKind::Drop) {
                    auth.rcode = dns::ServFail;
                    auth.answers.clear();
                } else if (policy.drops_original || lat.injected_first) {
                    // The resolver keeps whichever answer reaches it first.
                    auth.answers = {*action.address};
                    auth.forged = true;
                }
                break;
            }
        } else {
            auth.answers = authentic(*dom, qtype);
        }
        if (forged && !lat.injected_first) forged->delay_ms = auth.delay_ms + 1 + jitter(key ^ 3);
        out.pieces.push_back(std::move(auth));
    }
    if (forged) out.pieces.push_back(std::move(*forged));
    std::stable_sort(out.pieces.begin(), out.pieces.end(),
                     [](const Piece& a, const Piece& b) { return a.delay_ms < b.delay_ms; });
    return out;
}

std::vector<Reply> World::respond(const IpAddress& server, std::span<const std::uint8_t> query) const {
    dns::Message q;
    try {
        q = dns::parse(query);
    } catch (const dns::DnsParseError&) {
        return {};
    }
    if (q.qr || q.questions.size() != 1) return {};
    const auto& question = q.questions.front();

    dns::Message base;
    base.id = q.id;
    base.qr = true;
    base.rd = q.rd;
    base.ra = true;
    base.questions = {question};

    std::vector<Reply> out;
    if (question.qtype != static_cast<std::uint16_t>(RrType::A) &&
        question.qtype != static_cast<std::uint16_t>(RrType::AAAA)) {
        if (!endpoints_.count(server)) return {};
        base.rcode = dns::NotImp;
        out.push_back({2 * config_.latency.hop_ms, dns::encode(base)});
        return out;
    }
    const auto delivery = deliver(server, question.name, static_cast<RrType>(question.qtype), q.rd);
    for (const auto& piece : delivery.pieces) {
        dns::Message m = base;
        m.rcode = piece.rcode;
        for (const auto& ip : piece.answers) m.answers.push_back(dns::make_address_record(question.name, ip));
        out.push_back({piece.delay_ms, dns::encode(m)});
    }
    return out;
}

TruthCell World::truth(const ProbeTask& task) const {
    TruthCell t;
    t.task = task;
    const auto d = deliver(task.server, task.domain, task.rrtype, task.rd_flag);
    bool any_ip = false;
    bool authentic_ip = false;
    for (const auto& p : d.pieces) {
        t.injected = t.injected || p.injected;
        t.leaked_upstream = t.leaked_upstream || (p.forged && !p.injected);
        for (const auto& ip : p.answers) {
            any_ip = true;
            authentic_ip = authentic_ip || tls_valid(ip, task.domain);
        }
    }
    if (authentic_ip) t.outcome = Outcome::Accessible;
    else if (any_ip) t.outcome = Outcome::Censored;
    else t.outcome = Outcome::Inconclusive;
    if (t.outcome == Outcome::Censored) t.policy = d.policy;
    return t;
}

bool World::tls_valid(const IpAddress& ip, std::string_view sni) const {
    const SimDomain* d = domain(sni);
    if (!d || !d->tls_valid) return false;
    if (ip.is_v4()) return std::find(d->a.begin(), d->a.end(), ip.v4()) != d->a.end();
    return std::find(d->aaaa.begin(), d->aaaa.end(), ip.v6()) != d->aaaa.end();
}

std::vector<NsLogEntry> World::ns_log(std::string_view zone) const {
    std::vector<NsLogEntry> out;
    for (std::size_t i = 0; i < config_.resolvers.size(); ++i) {
        const auto& r = config_.resolvers[i];
        out.push_back({encode_probe_label(r.v4, zone), r.ns_egress.value_or(r.v6),
                       1.6e9 + static_cast<double>(i)});
    }
    return out;
}

TlsCheck OracleTlsProber::verify(const IpAddress& ip, const std::string& sni) {
    if (world_.tls_valid(ip, sni)) return {TlsOutcome::Verified, ""};
    return {TlsOutcome::Failed, "certificate not valid for " + sni + " at " + ip.to_string()};
}

}  // namespace dnsgap::sim
