#pragma once

// Generators for verdict fuzzing: random probe results mixing timeouts,
// REFUSED/SERVFAIL replies, malformed RDATA, wrong-type records and real
// answers, plus a prober with seeded random outcomes that logs every call.

#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "dnsgap/core/util.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace fuzz {

using namespace dnsgap;

inline IpAddress random_ip(std::mt19937_64& rng, bool v6) {
    if (!v6) return Ipv4Address(static_cast<std::uint32_t>(0x0B000000 + rng() % 64));
    Ipv6Address::Bytes b{};
    b[0] = 0x2a;
    b[15] = static_cast<std::uint8_t>(rng() % 64);
    return Ipv6Address(b);
}

inline AnswerRecord record_for(const IpAddress& ip, const std::string& name) {
    AnswerRecord r;
    r.name = name;
    if (ip.is_v4()) {
        r.type = 1;
        const auto b = ip.v4().bytes();
        r.rdata.assign(b.begin(), b.end());
    } else {
        r.type = 28;
        r.rdata.assign(ip.v6().bytes().begin(), ip.v6().bytes().end());
    }
    return r;
}

inline ProbeResult random_result(std::mt19937_64& rng, std::uint64_t seq) {
    ProbeResult r;
    r.task.pair_id = "p" + std::to_string(rng() % 5);
    r.task.iface = rng() % 2 ? Interface::V4 : Interface::V6;
    r.task.rrtype = rng() % 2 ? RrType::A : RrType::AAAA;
    r.task.domain = "d" + std::to_string(rng() % 6) + ".example";
    r.task.seq = seq;
    switch (rng() % 6) {
        case 0:
            r.status = ProbeStatus::Timeout;
            return r;
        case 1:
            r.status = ProbeStatus::NetworkError;
            r.error = "no route";
            return r;
        default:
            r.status = ProbeStatus::Answered;
    }
    const int responses = 1 + rng() % 3;
    for (int i = 0; i < responses; ++i) {
        ProbeResponse resp;
        const auto kind = rng() % 5;
        if (kind == 0) {
            resp.rcode = 5;  // REFUSED
        } else if (kind == 1) {
            resp.rcode = static_cast<std::uint8_t>(rng() % 2 ? 2 : 3);
        } else {
            const int n = rng() % 4;
            for (int k = 0; k < n; ++k) {
                auto rec = record_for(random_ip(rng, rng() % 2), r.task.domain);
                switch (rng() % 5) {
                    case 0: rec.rdata.resize(rng() % 20); break;          // malformed length
                    case 1: rec.type = 5; break;                          // CNAME-typed junk
                    default: break;
                }
                resp.answers.push_back(std::move(rec));
            }
        }
        r.responses.push_back(std::move(resp));
    }
    if (rng() % 7 == 0) r.anomalies.push_back({IpAddress(Ipv4Address(11, 0, 0, 1)), 3.0, "question mismatch", {}});
    return r;
}

/// Outcomes drawn from (seed, ip, sni, round-ish call count); thread-safe.
class RandomProber : public TlsProber {
public:
    explicit RandomProber(std::uint64_t seed, double p_verified = 0.2, double p_error = 0.05)
        : seed_(seed), p_verified_(p_verified), p_error_(p_error) {}
    TlsCheck verify(const IpAddress& ip, const std::string& sni) override {
        std::lock_guard lock(mu_);
        const int n = calls_[{ip, sni}]++;
        const double u = unit_from_hash(hash_combine(hash_combine(hash_combine(seed_, ip.to_string()), sni), n));
        log_.push_back({ip, sni});
        if (u < p_verified_) return {TlsOutcome::Verified, ""};
        if (u < p_verified_ + p_error_) return {TlsOutcome::Error, "no route"};
        return {TlsOutcome::Failed, "handshake failed"};
    }
    int calls(const IpAddress& ip, const std::string& sni) {
        std::lock_guard lock(mu_);
        return calls_[{ip, sni}];
    }

private:
    std::mutex mu_;
    std::uint64_t seed_;
    double p_verified_, p_error_;
    std::map<std::pair<IpAddress, std::string>, int> calls_;
    std::vector<std::pair<IpAddress, std::string>> log_;
};

/// Empty when the verdict respects the conservatism rule: Censored requires
/// at least one answered address and a Failed outcome for every address in
/// every one of `rounds` rounds.
inline std::optional<std::string> conservatism_violation(const CensorVerdict& v, int rounds) {
    if (v.outcome != Outcome::Censored) return std::nullopt;
    if (v.answer_ips.empty()) return "censored without any answered address";
    std::map<std::pair<int, IpAddress>, TlsOutcome> seen;
    for (const auto& a : v.tls_attempts) seen[{a.round, a.ip}] = a.outcome;
    for (int r = 1; r <= rounds; ++r) {
        for (const auto& ip : v.answer_ips) {
            auto it = seen.find({r, ip});
            if (it == seen.end()) return "censored but " + ip.to_string() + " not tried in round " + std::to_string(r);
            if (it->second != TlsOutcome::Failed) {
                return "censored but " + ip.to_string() + " did not fail in round " + std::to_string(r);
            }
        }
    }
    return std::nullopt;
}

}  // namespace fuzz
