#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnsgap/core/ip.hpp"
#include "dnsgap/core/types.hpp"

namespace dnsgap {

enum class FingerprintName { IranV4, IranV6, GfwTeredo, Custom };
std::string_view to_string(FingerprintName n);

struct InjectorFingerprint {
    FingerprintName name = FingerprintName::Custom;
    /// Rule label for Custom; the canonical name otherwise.
    std::string label;
    /// The answer address that triggered the match.
    IpAddress matched_on;
    bool operator==(const InjectorFingerprint&) const = default;
};

/// A configured pattern: any answer inside `prefix`, optionally only when
/// the query asked for `rrtype`.
struct FingerprintRule {
    std::string label;
    IpPrefix prefix;
    std::optional<RrType> rrtype;
};

inline const Ipv4Address kIranInjectedV4{10, 10, 34, 35};
const Ipv6Address& iran_injected_v6();  // d0::11

/// First match in priority IranV4 > IranV6 > GfwTeredo > custom rules (in
/// rule order). Within one pattern the smallest matching address wins, so
/// the result does not depend on set iteration order.
std::optional<InjectorFingerprint> fingerprint_injector(const std::set<IpAddress>& ips, RrType rrtype,
                                                        const std::vector<FingerprintRule>& custom = {});

/// Reads rules from lines "label,prefix[,A|AAAA]".
std::vector<FingerprintRule> load_fingerprint_rules(const std::filesystem::path& path);

}  // namespace dnsgap
