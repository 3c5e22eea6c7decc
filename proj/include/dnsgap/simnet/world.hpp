#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/discovery/correlate.hpp"
#include "dnsgap/simnet/config.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap::sim {

/// One DNS response reaching the client.
struct Piece {
    double delay_ms = 0;
    std::uint8_t rcode = 0;
    std::vector<IpAddress> answers;
    /// Forged by a censor on the client's path.
    bool injected = false;
    /// Carries forged records, either injected directly or relayed by a
    /// resolver whose upstream lookup was forged.
    bool forged = false;
};

/// Everything the world does with one query, before encoding.
struct Delivery {
    std::vector<Piece> pieces;
    /// Policy whose action fired, on the client path or upstream.
    std::string policy;
    CensorAction client_action;
    CensorAction upstream_action;
    bool recursed = false;
};

/// Ground truth for one probe, from the world's own knowledge of which
/// addresses are authentic.
struct TruthCell {
    ProbeTask task;
    Outcome outcome = Outcome::Inconclusive;
    std::string policy;
    bool injected = false;
    bool leaked_upstream = false;
};

json to_json(const TruthCell& t);
TruthCell truth_cell_from_json(const json& j);

struct Reply {
    double delay_ms = 0;
    std::vector<std::uint8_t> payload;
};

/// Immutable simulated Internet: resolvers, censors, trusted resolvers and
/// the authentic answer set. Every behavior is a pure function of the
/// config, its seed and the query, so concurrent use is safe.
class World {
public:
    /// Validates the config; throws ConfigInvalid.
    explicit World(SimWorldConfig config);

    const SimWorldConfig& config() const { return config_; }
    std::vector<ResolverPair> pairs() const;
    const SimResolver* resolver_by_pair_id(const std::string& pair_id) const;
    const std::vector<IpAddress>& trusted() const { return trusted_; }
    const SimDomain* domain(std::string_view name) const;

    Delivery deliver(const IpAddress& server, std::string_view qname, RrType qtype, bool rd) const;

    /// Encoded responses to a wire query sent to `server`, with arrival
    /// delays. Unknown servers and unparsable queries get nothing.
    std::vector<Reply> respond(const IpAddress& server, std::span<const std::uint8_t> query) const;

    TruthCell truth(const ProbeTask& task) const;

    /// TLS oracle: the certificate for `sni` validates at `ip` exactly when
    /// `ip` is one of the domain's authentic addresses and the domain has a
    /// valid certificate.
    bool tls_valid(const IpAddress& ip, std::string_view sni) const;

    /// The log an IPv6-only name server for `zone` would record after each
    /// resolver was sent its own probe label.
    std::vector<NsLogEntry> ns_log(std::string_view zone) const;

private:
    struct Endpoint {
        std::size_t resolver;
        Interface iface;
    };

    double jitter(std::uint64_t key) const;
    std::uint64_t query_key(std::string_view scope, const IpAddress& server, std::string_view qname, RrType qtype,
                            bool rd) const;
    std::vector<IpAddress> authentic(const SimDomain& d, RrType qtype) const;

    SimWorldConfig config_;
    std::vector<IpAddress> trusted_;
    std::map<IpAddress, Endpoint> endpoints_;
    std::unordered_map<std::string, std::size_t> pair_index_;
    std::unordered_map<std::string, std::size_t> domain_index_;
};

/// TlsProber backed by the world's oracle.
class OracleTlsProber : public TlsProber {
public:
    explicit OracleTlsProber(const World& world) : world_(world) {}
    TlsCheck verify(const IpAddress& ip, const std::string& sni) override;

private:
    const World& world_;
};

}  // namespace dnsgap::sim
