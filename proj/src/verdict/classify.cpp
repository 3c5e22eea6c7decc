#include "dnsgap/verdict/classify.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "dnsgap/verdict/answers.hpp"

namespace dnsgap {

std::string_view to_string(TlsOutcome o) {
    switch (o) {
        case TlsOutcome::Verified: return "verified";
        case TlsOutcome::Failed: return "failed";
        case TlsOutcome::Error: return "error";
    }
    return "error";
}

TlsOutcome parse_tls_outcome(std::string_view s) {
    if (s == "verified") return TlsOutcome::Verified;
    if (s == "failed") return TlsOutcome::Failed;
    if (s == "error") return TlsOutcome::Error;
    throw std::invalid_argument("unknown TLS outcome '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Censored: return "censored";
        case Outcome::Accessible: return "accessible";
        case Outcome::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Outcome parse_outcome(std::string_view s) {
    if (s == "censored") return Outcome::Censored;
    if (s == "accessible") return Outcome::Accessible;
    if (s == "inconclusive") return Outcome::Inconclusive;
    throw std::invalid_argument("unknown outcome '" + std::string(s) + "'");
}

namespace {

TlsCheck safe_verify(TlsProber& tls, const IpAddress& ip, const std::string& sni) {
    try {
        return tls.verify(ip, sni);
    } catch (const std::exception& e) {
        return {TlsOutcome::Error, e.what()};
    }
}

/// Folds a finished attempt list into the verdict outcome.
void settle(CensorVerdict& v) {
    if (v.answer_ips.empty()) {
        v.outcome = Outcome::Inconclusive;
        v.reason = "no-answer";
        return;
    }
    bool error = false;
    for (const auto& a : v.tls_attempts) {
        if (a.outcome == TlsOutcome::Verified) {
            v.outcome = Outcome::Accessible;
            v.reason.clear();
            return;
        }
        error = error || a.outcome == TlsOutcome::Error;
    }
    if (error) {
        v.outcome = Outcome::Inconclusive;
        v.reason = "unverifiable";
    } else {
        v.outcome = Outcome::Censored;
        v.reason.clear();
    }
}

}  // namespace

CensorVerdict classify_censorship(const ProbeTask& task, const std::set<IpAddress>& ips, TlsProber& tls,
                                  int rounds) {
    if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
    CensorVerdict v;
    v.task = task;
    v.answer_ips = ips;
    v.probe_status = ProbeStatus::Answered;
    for (int r = 1; r <= rounds && !ips.empty(); ++r) {
        for (const auto& ip : ips) {
            auto check = safe_verify(tls, ip, task.domain);
            v.tls_attempts.push_back({r, ip, check.outcome, std::move(check.detail)});
            if (v.tls_attempts.back().outcome == TlsOutcome::Verified) {
                settle(v);
                return v;
            }
        }
    }
    settle(v);
    return v;
}

CensorVerdict classify_result(const ProbeResult& result, TlsProber& tls, int rounds,
                              const std::vector<FingerprintRule>& custom) {
    const auto ex = extract_answers(result);
    CensorVerdict v = classify_censorship(result.task, ex.ips, tls, rounds);
    v.probe_status = result.status;
    v.malformed_rdata = ex.malformed;
    v.rcodes = ex.rcodes;
    v.fingerprint = fingerprint_injector(ex.ips, result.task.rrtype, custom);
    return v;
}

BatchClassifier::BatchClassifier(TlsProber& tls, ClassifyOptions options) : tls_(tls), options_(std::move(options)) {
    if (options_.rounds < 1) throw std::invalid_argument("rounds must be at least 1");
    if (options_.threads == 0) options_.threads = 1;
}

std::vector<CensorVerdict> BatchClassifier::classify(const std::vector<ProbeResult>& results) {
    struct Pair {
        IpAddress ip;
        std::size_t domain;
    };
    std::vector<std::string> domains;
    std::unordered_map<std::string, std::size_t> domain_index;
    std::vector<Pair> pairs;
    std::map<std::pair<IpAddress, std::size_t>, std::size_t> pair_index;

    std::vector<CensorVerdict> verdicts(results.size());
    std::vector<std::vector<std::size_t>> verdict_pairs(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto ex = extract_answers(results[i]);
        auto& v = verdicts[i];
        v.task = results[i].task;
        v.answer_ips = ex.ips;
        v.probe_status = results[i].status;
        v.malformed_rdata = ex.malformed;
        v.rcodes = ex.rcodes;
        v.fingerprint = fingerprint_injector(ex.ips, v.task.rrtype, options_.custom_rules);
        if (ex.ips.empty()) continue;
        auto [dit, fresh] = domain_index.try_emplace(v.task.domain, domains.size());
        if (fresh) domains.push_back(v.task.domain);
        for (const auto& ip : ex.ips) {
            auto [pit, added] = pair_index.try_emplace({ip, dit->second}, pairs.size());
            if (added) pairs.push_back({ip, dit->second});
            verdict_pairs[i].push_back(pit->second);
        }
    }

    // checks[r][p]: outcome of pair p in round r, when it was needed.
    std::vector<std::vector<std::optional<TlsCheck>>> checks(options_.rounds,
                                                             std::vector<std::optional<TlsCheck>>(pairs.size()));
    std::vector<bool> resolved(results.size(), false);
    for (std::size_t i = 0; i < results.size(); ++i) resolved[i] = verdict_pairs[i].empty();

    for (int r = 0; r < options_.rounds; ++r) {
        std::vector<bool> needed(pairs.size(), false);
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (resolved[i]) continue;
            for (auto p : verdict_pairs[i]) needed[p] = true;
        }
        // Interleave by domain so consecutive handshakes name different sites.
        std::vector<std::vector<std::size_t>> by_domain(domains.size());
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            if (needed[p]) by_domain[pairs[p].domain].push_back(p);
        }
        std::vector<std::size_t> order;
        for (std::size_t k = 0;; ++k) {
            bool any = false;
            for (const auto& list : by_domain) {
                if (k < list.size()) {
                    order.push_back(list[k]);
                    any = true;
                }
            }
            if (!any) break;
        }

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const auto j = next.fetch_add(1);
                if (j >= order.size()) return;
                const auto p = order[j];
                checks[r][p] = safe_verify(tls_, pairs[p].ip, domains[pairs[p].domain]);
            }
        };
        const unsigned n = std::min<std::size_t>(options_.threads, std::max<std::size_t>(order.size(), 1));
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();
        handshakes_ += order.size();

        for (std::size_t i = 0; i < results.size(); ++i) {
            if (resolved[i]) continue;
            for (auto p : verdict_pairs[i]) {
                if (checks[r][p]->outcome == TlsOutcome::Verified) resolved[i] = true;
            }
        }
    }

    for (std::size_t i = 0; i < results.size(); ++i) {
        auto& v = verdicts[i];
        bool done = false;
        for (int r = 0; r < options_.rounds && !done; ++r) {
            for (auto p : verdict_pairs[i]) {
                const auto& c = *checks[r][p];
                v.tls_attempts.push_back({r + 1, pairs[p].ip, c.outcome, c.detail});
                if (c.outcome == TlsOutcome::Verified) {
                    done = true;
                    break;
                }
            }
        }
        settle(v);
    }
    return verdicts;
}

}  // namespace dnsgap
