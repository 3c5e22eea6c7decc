#include "dnsgap/discovery/health.hpp"

#include <stdexcept>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/util.hpp"
#include "dnsgap/probe/dns_message.hpp"
#include "dnsgap/verdict/answers.hpp"

namespace dnsgap {

namespace {

bool answer_matches(const ProbeResult& r, const ControlExpectation& exp) {
    bool any = false;
    for (const auto& resp : r.responses) {
        if (resp.rcode != dns::NoError) return false;
    }
    for (const auto& ip : extract_answer_ips(r)) {
        if (r.task.rrtype == RrType::A) {
            if (!ip.is_v4()) continue;
            if (!exp.a.count(ip.v4())) return false;
        } else {
            if (!ip.is_v6()) continue;
            if (!exp.aaaa.count(ip.v6())) return false;
        }
        any = true;
    }
    return any;
}

EngineOptions control_engine(const HealthOptions& o) {
    EngineOptions e;
    e.window = o.window;
    e.rate = o.rate;
    e.timeout_retries = 1;
    return e;
}

}  // namespace

std::vector<HealthResult> verify_pairs_health(const std::vector<ResolverPair>& pairs,
                                              const std::vector<std::string>& controls,
                                              const ControlAnswers& expected, UdpTransport& transport,
                                              const HealthOptions& options) {
    if (controls.empty()) throw std::invalid_argument("health check needs at least one control domain");
    for (const auto& c : controls) {
        if (!expected.count(c)) throw std::invalid_argument("no expected answer for control " + c);
    }
    // Task seq encodes (pair, control, iface, rrtype) in check order.
    const std::uint64_t per_pair = controls.size() * 4;
    std::vector<ProbeTask> tasks;
    tasks.reserve(pairs.size() * per_pair);
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::size_t c = 0; c < controls.size(); ++c) {
            for (auto iface : {Interface::V4, Interface::V6}) {
                for (auto rr : {RrType::A, RrType::AAAA}) {
                    ProbeTask t;
                    t.seq = tasks.size();
                    t.pair_id = pairs[p].id();
                    t.iface = iface;
                    t.rrtype = rr;
                    t.domain = controls[c];
                    t.server = iface == Interface::V4 ? IpAddress(pairs[p].v4) : IpAddress(pairs[p].v6);
                    t.txid = derive_txid(hash_combine(options.seed, std::string_view("health")), t.seq);
                    tasks.push_back(std::move(t));
                }
            }
        }
    }
    ProbeEngine engine(transport, control_engine(options));
    auto results = engine.run(std::move(tasks));
    std::vector<const ProbeResult*> by_seq(results.size());
    for (const auto& r : results) by_seq[r.task.seq] = &r;

    std::vector<HealthResult> out(pairs.size(), HealthResult{true, ""});
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (std::uint64_t k = 0; k < per_pair; ++k) {
            const ProbeResult& r = *by_seq[p * per_pair + k];
            const auto& name = r.task.domain;
            const std::string where =
                name + "/" + std::string(to_string(r.task.rrtype)) + "/" + std::string(to_string(r.task.iface));
            std::string reason;
            if (r.status == ProbeStatus::Timeout) reason = where + " timeout";
            else if (r.status == ProbeStatus::NetworkError) reason = where + " network error";
            else if (!answer_matches(r, expected.at(name))) reason = name + " wrong answer";
            if (!reason.empty()) {
                out[p] = {false, reason};
                break;
            }
        }
    }
    return out;
}

HealthResult verify_pair_health(const ResolverPair& pair, const std::vector<std::string>& controls,
                                const ControlAnswers& expected, UdpTransport& transport,
                                const HealthOptions& options) {
    return verify_pairs_health({pair}, controls, expected, transport, options).front();
}

std::vector<ProbeResult> send_probe_labels(const std::vector<Ipv4Address>& candidates, const std::string& zone,
                                           UdpTransport& transport, const HealthOptions& options) {
    std::vector<ProbeTask> tasks;
    for (const auto& v4 : candidates) {
        ProbeTask t;
        t.seq = tasks.size();
        t.pair_id = v4.to_string();
        t.iface = Interface::V4;
        t.rrtype = RrType::A;
        t.domain = encode_probe_label(v4, zone);
        t.server = v4;
        t.txid = derive_txid(hash_combine(options.seed, std::string_view("labels")), t.seq);
        tasks.push_back(std::move(t));
    }
    EngineOptions e;
    e.window = options.window;
    e.rate = options.rate;
    return ProbeEngine(transport, e).run(std::move(tasks));
}

std::vector<Ipv4Address> validate_ipv4_candidates(const std::vector<Ipv4Address>& candidates,
                                                  const std::string& control, const ControlExpectation& expected,
                                                  UdpTransport& transport, const HealthOptions& options) {
    std::vector<ProbeTask> tasks;
    for (const auto& v4 : candidates) {
        ProbeTask t;
        t.seq = tasks.size();
        t.pair_id = v4.to_string();
        t.domain = control;
        t.server = v4;
        t.txid = derive_txid(hash_combine(options.seed, std::string_view("v4-control")), t.seq);
        tasks.push_back(std::move(t));
    }
    ProbeEngine engine(transport, control_engine(options));
    std::vector<bool> ok(candidates.size(), false);
    for (const auto& r : engine.run(std::move(tasks))) {
        ok[r.task.seq] = r.status == ProbeStatus::Answered && answer_matches(r, expected);
    }
    std::vector<Ipv4Address> out;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (ok[i]) out.push_back(candidates[i]);
    }
    return out;
}

}  // namespace dnsgap
