#include "dnsgap/simnet/config.hpp"

#include <fstream>
#include <map>

#include "dnsgap/core/label_codec.hpp"

namespace dnsgap::sim {

std::string_view to_string(CacheBehavior c) {
    return c == CacheBehavior::AlwaysRecurse ? "always-recurse" : "always-cached";
}

CacheBehavior parse_cache_behavior(std::string_view s) {
    if (s == "always-recurse") return CacheBehavior::AlwaysRecurse;
    if (s == "always-cached") return CacheBehavior::AlwaysCached;
    throw ConfigInvalid("unknown cache_behavior '" + std::string(s) + "'");
}

std::string_view to_string(ActionKind k) {
    switch (k) {
        case ActionKind::Pass: return "pass";
        case ActionKind::Drop: return "drop";
        case ActionKind::InjectA: return "inject-a";
        case ActionKind::InjectAAAA: return "inject-aaaa";
    }
    return "pass";
}

CensorAction CensorAction::inject(const IpAddress& addr) {
    return {addr.is_v4() ? ActionKind::InjectA : ActionKind::InjectAAAA, addr};
}

std::string_view to_string(RrClass c) {
    switch (c) {
        case RrClass::A: return "A";
        case RrClass::AAAA: return "AAAA";
        case RrClass::Any: return "any";
    }
    return "any";
}

bool rr_class_matches(RrClass c, RrType t) {
    return c == RrClass::Any || (c == RrClass::A) == (t == RrType::A);
}

namespace {

RrClass parse_rr_class(std::string_view s) {
    if (s == "A") return RrClass::A;
    if (s == "AAAA") return RrClass::AAAA;
    if (s == "any") return RrClass::Any;
    throw ConfigInvalid("unknown rrtype class '" + std::string(s) + "' (A|AAAA|any)");
}

json action_json(const CensorAction& a) {
    json j = {{"kind", std::string(to_string(a.kind))}};
    if (a.address) j["address"] = a.address->to_string();
    return j;
}

CensorAction action_from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "pass") return CensorAction::pass();
    if (kind == "drop") return CensorAction::drop();
    if (kind == "inject-a" || kind == "inject-aaaa") {
        const auto addr = IpAddress::parse(j.at("address").get<std::string>());
        auto a = CensorAction::inject(addr);
        if (to_string(a.kind) != kind) throw ConfigInvalid("address " + addr.to_string() + " does not fit " + kind);
        return a;
    }
    throw ConfigInvalid("unknown action kind '" + kind + "'");
}

/// Checks that a forged record is allowed for every question type the rule covers.
void check_action(const CensorPolicy& p, const BlockRule& r, const CensorAction& a) {
    const bool inject = a.kind == ActionKind::InjectA || a.kind == ActionKind::InjectAAAA;
    if (inject && !a.address) throw ConfigInvalid(p.name + ": inject action for " + r.domain + " lacks an address");
    if (!inject || p.answer_type_independent) return;
    const bool covers_a = r.rrclass != RrClass::AAAA;
    const bool covers_aaaa = r.rrclass != RrClass::A;
    if ((a.kind == ActionKind::InjectA && covers_aaaa) || (a.kind == ActionKind::InjectAAAA && covers_a)) {
        throw ConfigInvalid(p.name + ": " + std::string(to_string(a.kind)) + " on " + r.domain + "/" +
                            std::string(to_string(r.rrclass)) +
                            " needs answer_type_independent (forged type must match the question)");
    }
}

template <typename T>
T opt(const json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

void validate(const SimWorldConfig& config) {
    std::set<IpAddress> seen;
    for (const auto& r : config.resolvers) {
        if (!seen.insert(r.v4).second) throw ConfigInvalid("duplicate resolver address " + r.v4.to_string());
        if (!seen.insert(r.v6).second) throw ConfigInvalid("duplicate resolver address " + r.v6.to_string());
        if (r.country.size() != 2) throw ConfigInvalid("resolver " + r.v4.to_string() + " has no country code");
    }
    for (const auto& t : config.trusted) {
        if (!seen.insert(t).second) throw ConfigInvalid("trusted resolver " + t.to_string() + " reuses an address");
    }
    std::set<std::string> names;
    for (const auto& d : config.domains) {
        if (!is_valid_domain_name(d.name)) throw ConfigInvalid("invalid domain name '" + d.name + "'");
        if (!names.insert(normalize_name(d.name)).second) throw ConfigInvalid("duplicate domain " + d.name);
    }
    for (const auto& p : config.policies) {
        if (p.name.empty()) throw ConfigInvalid("policy without a name");
        if (!p.scope.country && p.scope.asns.empty()) throw ConfigInvalid(p.name + ": empty scope");
        if (!(p.injection_probability >= 0.0 && p.injection_probability <= 1.0)) {
            throw ConfigInvalid(p.name + ": injection_probability outside [0,1]");
        }
        for (const auto& r : p.blocked) {
            if (!names.count(normalize_name(r.domain))) {
                throw ConfigInvalid(p.name + ": blocked domain " + r.domain + " is not in the world");
            }
            check_action(p, r, r.action);
            if (r.v6_action) check_action(p, r, *r.v6_action);
        }
    }
    if (config.latency.hop_ms < 0 || config.latency.jitter_ms < 0 || config.latency.upstream_ms < 0) {
        throw ConfigInvalid("negative latency");
    }
}

json to_json(const SimWorldConfig& c) {
    json resolvers = json::array();
    for (const auto& r : c.resolvers) {
        json j = {{"v4", r.v4.to_string()},
                  {"v6", r.v6.to_string()},
                  {"v6_kind", std::string(v6_kind_name(r.v6_kind()))},
                  {"country", r.country},
                  {"asn", r.asn},
                  {"as_name", r.as_name},
                  {"conn_type", r.conn_type.label()},
                  {"cache_behavior", std::string(to_string(r.cache))}};
        if (r.ns_egress) j["ns_egress"] = r.ns_egress->to_string();
        resolvers.push_back(std::move(j));
    }
    json policies = json::array();
    for (const auto& p : c.policies) {
        json scope = json::object();
        if (p.scope.country) scope["country"] = *p.scope.country;
        if (!p.scope.asns.empty()) scope["asns"] = p.scope.asns;
        json blocked = json::array();
        for (const auto& r : p.blocked) {
            json b = {{"domain", r.domain}, {"rrtype", std::string(to_string(r.rrclass))}, {"action", action_json(r.action)}};
            if (r.v6_action) b["v6_action"] = action_json(*r.v6_action);
            blocked.push_back(std::move(b));
        }
        policies.push_back({{"name", p.name},
                            {"scope", scope},
                            {"blocked", blocked},
                            {"v6_capable", p.v6_capable},
                            {"parses_6to4", p.parses_6to4},
                            {"requires_rd", p.requires_rd},
                            {"injection_probability", p.injection_probability},
                            {"drops_original", p.drops_original},
                            {"answer_type_independent", p.answer_type_independent}});
    }
    json domains = json::array();
    for (const auto& d : c.domains) {
        json j = {{"name", d.name}, {"a", json::array()}, {"aaaa", json::array()}, {"tls_valid", d.tls_valid}};
        for (const auto& a : d.a) j["a"].push_back(a.to_string());
        for (const auto& a : d.aaaa) j["aaaa"].push_back(a.to_string());
        if (d.category) j["category"] = *d.category;
        domains.push_back(std::move(j));
    }
    json trusted = json::array();
    for (const auto& t : c.trusted) trusted.push_back(t.to_string());
    json fingerprints = json::array();
    for (const auto& f : c.fingerprints) {
        json j = {{"label", f.label}, {"prefix", f.prefix.to_string()}};
        if (f.rrtype) j["rrtype"] = std::string(to_string(*f.rrtype));
        fingerprints.push_back(std::move(j));
    }
    return {{"seed", c.seed},
            {"latency",
             {{"hop_ms", c.latency.hop_ms},
              {"jitter_ms", c.latency.jitter_ms},
              {"upstream_ms", c.latency.upstream_ms},
              {"injected_first", c.latency.injected_first}}},
            {"resolvers", resolvers},
            {"policies", policies},
            {"domains", domains},
            {"trusted", trusted},
            {"fingerprints", fingerprints}};
}

SimWorldConfig config_from_json(const json& j) {
    SimWorldConfig c;
    try {
        c.seed = opt<std::uint64_t>(j, "seed", 0);
        if (j.contains("latency")) {
            const auto& l = j.at("latency");
            c.latency.hop_ms = opt(l, "hop_ms", c.latency.hop_ms);
            c.latency.jitter_ms = opt(l, "jitter_ms", c.latency.jitter_ms);
            c.latency.upstream_ms = opt(l, "upstream_ms", c.latency.upstream_ms);
            c.latency.injected_first = opt(l, "injected_first", c.latency.injected_first);
        }
        for (const auto& r : j.value("resolvers", json::array())) {
            SimResolver s;
            s.v4 = Ipv4Address::parse(r.at("v4").get<std::string>());
            s.v6 = Ipv6Address::parse(r.at("v6").get<std::string>());
            if (r.contains("v6_kind") && r.at("v6_kind").get<std::string>() != v6_kind_name(s.v6_kind())) {
                throw ConfigInvalid("v6_kind of " + s.v6.to_string() + " disagrees with its address");
            }
            s.country = r.at("country").get<std::string>();
            s.asn = opt<std::uint32_t>(r, "asn", 0);
            s.as_name = opt<std::string>(r, "as_name", "");
            s.conn_type = ConnType::from_label(opt<std::string>(r, "conn_type", "Unknown"));
            s.cache = parse_cache_behavior(opt<std::string>(r, "cache_behavior", "always-cached"));
            if (r.contains("ns_egress")) s.ns_egress = Ipv6Address::parse(r.at("ns_egress").get<std::string>());
            c.resolvers.push_back(std::move(s));
        }
        for (const auto& p : j.value("policies", json::array())) {
            CensorPolicy pol;
            pol.name = p.at("name").get<std::string>();
            const auto& scope = p.at("scope");
            if (scope.contains("country")) pol.scope.country = scope.at("country").get<std::string>();
            if (scope.contains("asns")) pol.scope.asns = scope.at("asns").get<std::set<std::uint32_t>>();
            for (const auto& b : p.value("blocked", json::array())) {
                BlockRule r;
                r.domain = b.at("domain").get<std::string>();
                r.rrclass = parse_rr_class(opt<std::string>(b, "rrtype", "any"));
                r.action = action_from_json(b.at("action"));
                if (b.contains("v6_action")) r.v6_action = action_from_json(b.at("v6_action"));
                pol.blocked.push_back(std::move(r));
            }
            pol.v6_capable = opt(p, "v6_capable", pol.v6_capable);
            pol.parses_6to4 = opt(p, "parses_6to4", pol.parses_6to4);
            pol.requires_rd = opt(p, "requires_rd", pol.requires_rd);
            pol.injection_probability = opt(p, "injection_probability", pol.injection_probability);
            pol.drops_original = opt(p, "drops_original", pol.drops_original);
            pol.answer_type_independent = opt(p, "answer_type_independent", pol.answer_type_independent);
            c.policies.push_back(std::move(pol));
        }
        for (const auto& d : j.value("domains", json::array())) {
            SimDomain s;
            s.name = d.at("name").get<std::string>();
            for (const auto& a : d.value("a", json::array())) s.a.push_back(Ipv4Address::parse(a.get<std::string>()));
            for (const auto& a : d.value("aaaa", json::array())) {
                s.aaaa.push_back(Ipv6Address::parse(a.get<std::string>()));
            }
            s.tls_valid = opt(d, "tls_valid", true);
            if (d.contains("category")) s.category = d.at("category").get<std::string>();
            c.domains.push_back(std::move(s));
        }
        if (j.contains("trusted")) {
            for (const auto& t : j.at("trusted")) c.trusted.push_back(IpAddress::parse(t.get<std::string>()));
        }
        for (const auto& f : j.value("fingerprints", json::array())) {
            FingerprintRule r{f.at("label").get<std::string>(), IpPrefix::parse(f.at("prefix").get<std::string>()),
                              std::nullopt};
            if (f.contains("rrtype")) r.rrtype = parse_rrtype(f.at("rrtype").get<std::string>());
            c.fingerprints.push_back(std::move(r));
        }
    } catch (const ConfigInvalid&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigInvalid(std::string("world config: ") + e.what());
    }
    validate(c);
    return c;
}

SimWorldConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigInvalid(path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path& path, const SimWorldConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << to_json(config).dump(2) << '\n';
}

}  // namespace dnsgap::sim
