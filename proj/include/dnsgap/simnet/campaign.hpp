#pragma once

#include <string>
#include <vector>

#include "dnsgap/domainvet/vet.hpp"
#include "dnsgap/probe/engine.hpp"
#include "dnsgap/simnet/world.hpp"

namespace dnsgap::sim {

struct CampaignOptions {
    std::uint64_t seed = 0;
    bool rd_flag = true;
    EngineOptions engine;
    int rounds = 3;
    unsigned tls_threads = 1;
    /// Vet domains against the world's trusted resolvers before probing.
    bool vet = true;
    /// Run over loopback UDP sockets and real time instead of the virtual
    /// clock. Delays are multiplied by `time_scale`.
    bool loopback = false;
    double time_scale = 1.0;
};

struct CampaignResult {
    std::vector<ResolverPair> pairs;
    std::vector<VettedDomain> domains;
    std::vector<std::pair<std::string, Rejection>> rejected;
    std::vector<ProbeResult> results;
    /// Ordered by task sequence number.
    std::vector<CensorVerdict> verdicts;
    std::vector<TruthCell> truth;
    EngineStats stats;
};

/// Probe -> classify against the world, plus the world's ground truth for
/// every probe sent. Pairs and domains must exist in the world
/// (std::invalid_argument otherwise). An empty pair or domain list yields
/// an empty campaign.
CampaignResult run_campaign(const World& world, const std::vector<ResolverPair>& pairs,
                            const std::vector<std::string>& domains, const CampaignOptions& options = {});

/// Every resolver and every domain of the world.
CampaignResult run_campaign(const World& world, const CampaignOptions& options = {});

struct TruthComparison {
    std::size_t matched = 0;
    std::size_t mismatched = 0;
    std::size_t missing = 0;
    /// A few human-readable mismatch descriptions.
    std::vector<std::string> examples;
    bool exact() const { return mismatched == 0 && missing == 0; }
};

/// Compares verdict outcomes with ground truth, keyed on (pair, interface,
/// record type, domain, RD).
TruthComparison compare_with_truth(const std::vector<CensorVerdict>& verdicts, const std::vector<TruthCell>& truth);

}  // namespace dnsgap::sim
