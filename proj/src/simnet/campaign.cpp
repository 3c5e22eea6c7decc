#include "dnsgap/simnet/campaign.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <tuple>

#include "dnsgap/probe/plan.hpp"
#include "dnsgap/simnet/loopback.hpp"
#include "dnsgap/simnet/sim_transport.hpp"

namespace dnsgap::sim {

namespace {

using CellKey = std::tuple<std::string, Interface, RrType, std::string, bool>;

CellKey key_of(const ProbeTask& t) { return {t.pair_id, t.iface, t.rrtype, t.domain, t.rd_flag}; }

std::string describe(const ProbeTask& t) {
    return t.pair_id + " " + std::string(to_string(t.iface)) + "/" + std::string(to_string(t.rrtype)) + " " +
           t.domain + (t.rd_flag ? "" : " rd=0");
}

}  // namespace

CampaignResult run_campaign(const World& world, const std::vector<ResolverPair>& pairs,
                            const std::vector<std::string>& domains, const CampaignOptions& options) {
    for (const auto& p : pairs) {
        if (!world.resolver_by_pair_id(p.id())) throw std::invalid_argument("pair " + p.id() + " is not in the world");
    }
    for (const auto& d : domains) {
        if (!world.domain(d)) throw std::invalid_argument("domain " + d + " is not in the world");
    }
    CampaignResult out;
    out.pairs = pairs;
    if (pairs.empty() || domains.empty()) return out;

    std::unique_ptr<UdpTransport> transport;
    std::unique_ptr<LoopbackHost> host;
    if (options.loopback) {
        auto sockets = std::make_unique<SocketTransport>();
        host = std::make_unique<LoopbackHost>(world, options.time_scale);
        host->install_routes(*sockets);
        transport = std::move(sockets);
    } else {
        transport = std::make_unique<SimTransport>(world);
    }
    OracleTlsProber tls(world);

    std::vector<std::string> names;
    if (options.vet) {
        VetOptions vo;
        vo.window = options.engine.window;
        vo.rate = options.engine.rate;
        vo.tls_threads = options.tls_threads;
        vo.seed = options.seed;
        vo.clock = [] { return std::chrono::system_clock::time_point(std::chrono::seconds(1640995200)); };
        auto report = vet_domains(domains, world.trusted(), *transport, tls, vo);
        out.domains = std::move(report.vetted);
        out.rejected = std::move(report.rejected);
        for (const auto& d : out.domains) names.push_back(d.name);
    } else {
        names = domains;
        for (const auto& d : domains) {
            const SimDomain* s = world.domain(d);
            out.domains.push_back({s->name, s->a, s->aaaa, "", s->category});
        }
    }
    if (names.empty()) return out;

    const MatrixPlan plan(pairs, names, options.seed, options.rd_flag);
    MatrixTaskSource source(plan);
    ProbeEngine engine(*transport, options.engine);
    out.stats = engine.run(source, [&](ProbeResult&& r) { out.results.push_back(std::move(r)); });
    std::sort(out.results.begin(), out.results.end(),
              [](const ProbeResult& a, const ProbeResult& b) { return a.task.seq < b.task.seq; });

    ClassifyOptions co;
    co.rounds = options.rounds;
    co.threads = options.tls_threads;
    co.custom_rules = world.config().fingerprints;
    BatchClassifier classifier(tls, co);
    out.verdicts = classifier.classify(out.results);

    out.truth.reserve(out.results.size());
    for (const auto& r : out.results) out.truth.push_back(world.truth(r.task));
    return out;
}

CampaignResult run_campaign(const World& world, const CampaignOptions& options) {
    std::vector<std::string> names;
    for (const auto& d : world.config().domains) names.push_back(d.name);
    return run_campaign(world, world.pairs(), names, options);
}

TruthComparison compare_with_truth(const std::vector<CensorVerdict>& verdicts, const std::vector<TruthCell>& truth) {
    std::map<CellKey, Outcome> expected;
    for (const auto& t : truth) expected[key_of(t.task)] = t.outcome;
    TruthComparison cmp;
    for (const auto& v : verdicts) {
        auto it = expected.find(key_of(v.task));
        if (it == expected.end()) {
            ++cmp.missing;
            if (cmp.examples.size() < 5) cmp.examples.push_back(describe(v.task) + ": no ground truth");
            continue;
        }
        if (it->second == v.outcome) {
            ++cmp.matched;
        } else {
            ++cmp.mismatched;
            if (cmp.examples.size() < 5) {
                cmp.examples.push_back(describe(v.task) + ": measured " + std::string(to_string(v.outcome)) +
                                       ", truth " + std::string(to_string(it->second)));
            }
        }
        expected.erase(it);
    }
    cmp.missing += expected.size();
    return cmp;
}

}  // namespace dnsgap::sim
