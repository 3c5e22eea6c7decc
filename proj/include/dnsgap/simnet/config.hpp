#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnsgap/core/types.hpp"
#include "dnsgap/verdict/fingerprint.hpp"

namespace dnsgap::sim {

using json = nlohmann::json;

/// Thrown by world construction and config parsing with the first violation.
class ConfigInvalid : public std::invalid_argument {
public:
    explicit ConfigInvalid(const std::string& what) : std::invalid_argument(what) {}
};

/// Whether a resolver recurses over IPv4 for every RD=1 query, or answers
/// from a warm cache without upstream traffic.
enum class CacheBehavior { AlwaysRecurse, AlwaysCached };
std::string_view to_string(CacheBehavior c);
CacheBehavior parse_cache_behavior(std::string_view s);

enum class ActionKind { Pass, Drop, InjectA, InjectAAAA };
std::string_view to_string(ActionKind k);

struct CensorAction {
    ActionKind kind = ActionKind::Pass;
    /// Forged address for the Inject kinds.
    std::optional<IpAddress> address;

    static CensorAction pass() { return {}; }
    static CensorAction drop() { return {ActionKind::Drop, std::nullopt}; }
    static CensorAction inject(const IpAddress& addr);
    bool operator==(const CensorAction&) const = default;
};

/// Record types a block rule applies to.
enum class RrClass { A, AAAA, Any };
std::string_view to_string(RrClass c);
bool rr_class_matches(RrClass c, RrType t);

struct BlockRule {
    std::string domain;
    RrClass rrclass = RrClass::Any;
    /// Applied to queries seen as IPv4 traffic.
    CensorAction action;
    /// Applied to queries parsed as IPv6; defaults to `action`.
    std::optional<CensorAction> v6_action;
};

struct PolicyScope {
    /// Centralized when `country` is set, per-AS otherwise.
    std::optional<std::string> country;
    std::set<std::uint32_t> asns;
};

struct CensorPolicy {
    std::string name;
    PolicyScope scope;
    std::vector<BlockRule> blocked;
    bool v6_capable = true;
    bool parses_6to4 = false;
    bool requires_rd = false;
    double injection_probability = 1.0;
    /// The censor sits in-path and discards the triggering query, so only
    /// the forged answer comes back.
    bool drops_original = true;
    /// Forged answers carry the same record whatever type was asked for.
    /// Needed for censors that answer AAAA questions with an A record.
    bool answer_type_independent = false;
};

struct SimResolver {
    Ipv4Address v4;
    Ipv6Address v6;
    std::string country;
    std::uint32_t asn = 0;
    std::string as_name;
    ConnType conn_type;
    CacheBehavior cache = CacheBehavior::AlwaysCached;
    /// Source address seen by an IPv6-only name server when this resolver
    /// fetches a name, if different from `v6` (forwarders sharing a backend).
    std::optional<Ipv6Address> ns_egress;

    Ipv6Kind v6_kind() const { return classify_v6_kind(v6); }
};

struct SimDomain {
    std::string name;
    std::vector<Ipv4Address> a;
    std::vector<Ipv6Address> aaaa;
    bool tls_valid = true;
    std::optional<std::string> category;
};

struct LatencyModel {
    double hop_ms = 20.0;
    double jitter_ms = 5.0;
    /// Extra delay of an upstream recursive lookup.
    double upstream_ms = 30.0;
    /// Forged answers race ahead of authentic ones; false puts them behind.
    bool injected_first = true;
};

struct SimWorldConfig {
    std::uint64_t seed = 0;
    std::vector<SimResolver> resolvers;
    std::vector<CensorPolicy> policies;
    std::vector<SimDomain> domains;
    /// Uncensored public resolvers that answer truthfully (used for vetting).
    std::vector<IpAddress> trusted;
    LatencyModel latency;
    /// Extra injector patterns for classification, e.g. a block-page address.
    std::vector<FingerprintRule> fingerprints;
};

/// Throws ConfigInvalid with the first violation found.
void validate(const SimWorldConfig& config);

json to_json(const SimWorldConfig& config);
SimWorldConfig config_from_json(const json& j);
SimWorldConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const SimWorldConfig& config);

}  // namespace dnsgap::sim
