#include "dnsgap/domainvet/vet.hpp"

#include <atomic>
#include <set>
#include <thread>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/util.hpp"
#include "dnsgap/probe/engine.hpp"
#include "dnsgap/verdict/answers.hpp"

namespace dnsgap {

std::string_view to_string(RejectReason r) {
    switch (r) {
        case RejectReason::InvalidName: return "InvalidName";
        case RejectReason::NoA: return "NoA";
        case RejectReason::NoAAAA: return "NoAAAA";
        case RejectReason::TlsInvalid: return "TlsInvalid";
    }
    return "InvalidName";
}

std::vector<IpAddress> default_trusted_resolvers() {
    return {Ipv4Address(8, 8, 8, 8), Ipv4Address(8, 8, 4, 4), Ipv4Address(1, 1, 1, 1), Ipv4Address(1, 0, 0, 1)};
}

std::size_t VetReport::count(RejectReason r) const {
    std::size_t n = 0;
    for (const auto& [name, rej] : rejected) n += rej.reason == r;
    return n;
}

namespace {

struct Resolved {
    std::set<Ipv4Address> a;
    std::set<Ipv6Address> aaaa;
    std::size_t answered = 0;
};

/// First address of the family that verifies, or the failure details.
bool any_verifies(const std::vector<IpAddress>& ips, const std::string& name, TlsProber& tls, std::string& detail) {
    for (const auto& ip : ips) {
        TlsCheck c;
        try {
            c = tls.verify(ip, name);
        } catch (const std::exception& e) {
            c = {TlsOutcome::Error, e.what()};
        }
        if (c.outcome == TlsOutcome::Verified) return true;
        if (!detail.empty()) detail += "; ";
        detail += ip.to_string() + ": " + (c.outcome == TlsOutcome::Error ? "unverifiable: " : "") + c.detail;
    }
    return false;
}

VetOutcome finish(const std::string& name, const Resolved& r, TlsProber& tls, const VetOptions& options) {
    if (r.a.empty()) return Rejection{RejectReason::NoA, "no routable A address"};
    if (r.aaaa.empty()) return Rejection{RejectReason::NoAAAA, "no routable AAAA address"};
    std::vector<IpAddress> v4(r.a.begin(), r.a.end()), v6(r.aaaa.begin(), r.aaaa.end());
    std::string detail;
    if (!any_verifies(v4, name, tls, detail)) return Rejection{RejectReason::TlsInvalid, "IPv4: " + detail};
    detail.clear();
    if (!any_verifies(v6, name, tls, detail)) return Rejection{RejectReason::TlsInvalid, "IPv6: " + detail};
    VettedDomain d;
    d.name = name;
    d.a_ips.assign(r.a.begin(), r.a.end());
    d.aaaa_ips.assign(r.aaaa.begin(), r.aaaa.end());
    d.vetted_at = iso8601_utc(options.clock());
    return d;
}

std::vector<Resolved> resolve_all(const std::vector<std::string>& names, const std::vector<IpAddress>& resolvers,
                                  UdpTransport& transport, const VetOptions& options) {
    std::vector<ProbeTask> tasks;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < names.size(); ++i) {
        for (const auto& server : resolvers) {
            for (auto rr : {RrType::A, RrType::AAAA}) {
                ProbeTask t;
                t.seq = tasks.size();
                t.pair_id = server.to_string();
                t.iface = server.is_v4() ? Interface::V4 : Interface::V6;
                t.rrtype = rr;
                t.domain = names[i];
                t.server = server;
                t.txid = derive_txid(hash_combine(options.seed, std::string_view("vet")), t.seq);
                tasks.push_back(std::move(t));
                owner.push_back(i);
            }
        }
    }
    EngineOptions eo;
    eo.window = options.window;
    eo.rate = options.rate;
    std::vector<Resolved> out(names.size());
    for (const auto& r : ProbeEngine(transport, eo).run(std::move(tasks))) {
        auto& res = out[owner[r.task.seq]];
        if (!r.responses.empty()) ++res.answered;
        for (const auto& ip : extract_answer_ips(r)) {
            if (r.task.rrtype == RrType::A && ip.is_v4() && ip.v4().is_global()) res.a.insert(ip.v4());
            if (r.task.rrtype == RrType::AAAA && ip.is_v6() && ip.v6().is_global_unicast()) res.aaaa.insert(ip.v6());
        }
    }
    return out;
}

}  // namespace

VetOutcome vet_domain(const std::string& name, const std::vector<IpAddress>& trusted_resolvers,
                      UdpTransport& transport, TlsProber& tls, const VetOptions& options) {
    if (!is_valid_domain_name(name)) return Rejection{RejectReason::InvalidName, "not a valid domain name"};
    if (trusted_resolvers.empty()) throw std::invalid_argument("no trusted resolvers given");
    const auto r = resolve_all({normalize_name(name)}, trusted_resolvers, transport, options).front();
    if (r.answered == 0) throw ResolverUnreachable("no trusted resolver answered for " + name);
    return finish(normalize_name(name), r, tls, options);
}

VetReport vet_domains(const std::vector<std::string>& names, const std::vector<IpAddress>& trusted_resolvers,
                      UdpTransport& transport, TlsProber& tls, const VetOptions& options) {
    if (trusted_resolvers.empty()) throw std::invalid_argument("no trusted resolvers given");
    std::vector<std::string> valid;
    std::vector<std::size_t> valid_index;
    std::vector<std::optional<VetOutcome>> outcomes(names.size());
    std::vector<bool> unreachable(names.size(), false);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (!is_valid_domain_name(names[i])) {
            outcomes[i] = Rejection{RejectReason::InvalidName, "not a valid domain name"};
            continue;
        }
        valid.push_back(normalize_name(names[i]));
        valid_index.push_back(i);
    }
    const auto resolved = resolve_all(valid, trusted_resolvers, transport, options);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const auto k = next.fetch_add(1);
            if (k >= valid.size()) return;
            const auto i = valid_index[k];
            if (resolved[k].answered == 0) {
                unreachable[i] = true;
                continue;
            }
            outcomes[i] = finish(valid[k], resolved[k], tls, options);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::max(1u, options.tls_threads); ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    VetReport report;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (unreachable[i]) {
            report.unreachable.push_back(names[i]);
        } else if (auto* d = std::get_if<VettedDomain>(&*outcomes[i])) {
            report.vetted.push_back(std::move(*d));
        } else {
            report.rejected.emplace_back(names[i], std::get<Rejection>(*outcomes[i]));
        }
    }
    return report;
}

}  // namespace dnsgap
