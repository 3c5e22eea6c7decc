#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnsgap/core/records.hpp"
#include "dnsgap/core/types.hpp"
#include "dnsgap/enrich/providers.hpp"

namespace dnsgap {

/// One query seen at the IPv6-only authoritative server. `ts` is seconds
/// since the Unix epoch.
struct NsLogEntry {
    std::string fqdn;
    Ipv6Address src;
    double ts = 0;
};

struct PairCandidate {
    Ipv4Address v4;
    Ipv6Address v6;
    double first_seen = 0;
    bool operator==(const PairCandidate&) const = default;
};

/// Accepts a number (epoch seconds) or "YYYY-MM-DDTHH:MM:SS[.frac]Z".
double parse_timestamp(const json& j);

json to_json(const NsLogEntry& e);
NsLogEntry ns_log_entry_from_json(const json& j);
std::vector<NsLogEntry> read_ns_log(const std::filesystem::path& path);

struct CorrelationStats {
    std::size_t entries = 0;
    std::size_t malformed = 0;
    std::size_t outside_zone = 0;
    /// Decoded addresses that were never sent a probe label.
    std::size_t unsolicited = 0;
    std::size_t candidates = 0;
};

/// Streaming correlation. Undecodable entries are counted and skipped.
class Correlator {
public:
    /// With `solicited` set, decoded addresses outside it are dropped.
    explicit Correlator(std::string zone, std::optional<std::set<Ipv4Address>> solicited = std::nullopt);
    void add(const NsLogEntry& entry);
    /// One candidate per distinct (v4, v6), earliest timestamp kept, sorted
    /// by address.
    std::vector<PairCandidate> candidates() const;
    const CorrelationStats& stats() const { return stats_; }

private:
    std::string zone_;
    std::optional<std::set<Ipv4Address>> solicited_;
    std::map<std::pair<Ipv4Address, Ipv6Address>, double> seen_;
    CorrelationStats stats_;
};

std::vector<PairCandidate> correlate_pairs(const std::vector<NsLogEntry>& log, const std::string& zone,
                                           CorrelationStats* stats = nullptr);

/// Drops every candidate whose v6 address is shared by more than
/// `max_sharing` candidates (1 removes all sharers).
std::vector<PairCandidate> prune_infrastructure(const std::vector<PairCandidate>& cands, std::size_t max_sharing = 1);

struct GeoFilterStats {
    std::size_t non_routable = 0;
    std::size_t unknown_geo = 0;
    std::size_t mismatched = 0;
    std::size_t kept = 0;
};

struct Enrichment {
    const GeoProvider* geo = nullptr;
    const AsnProvider* asn = nullptr;
    const ConnTypeProvider* conn = nullptr;
};

/// Keeps candidates with a globally routable v4 whose v4 and v6 countries
/// agree, and attaches country, ASN (from the v4 side) and connection type.
std::vector<ResolverPair> prune_geo_mismatch(const std::vector<PairCandidate>& cands, const Enrichment& enrich,
                                             GeoFilterStats* stats = nullptr);

}  // namespace dnsgap
