#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

class MalformedLabel : public std::runtime_error {
public:
    explicit MalformedLabel(const std::string& what) : std::runtime_error(what) {}
};

/// Lowercases and strips one trailing dot.
std::string normalize_name(std::string_view name);

/// True when `name` equals `zone` or ends with ".<zone>" (case-insensitive).
bool name_in_zone(std::string_view name, std::string_view zone);

/// Checks RFC 1035 length limits: labels 1..63 octets, name at most 253.
bool is_valid_domain_name(std::string_view name);

/// 1.1.1.1 under "v6onlyNS.io" becomes "1-1-1-1.v6onlyNS.io". The zone is
/// kept verbatim so the result can be compared against zone logs as written.
std::string encode_probe_label(Ipv4Address v4, std::string_view zone);

/// Inverse of encode_probe_label. Case-insensitive on the zone since
/// resolvers may randomize query-name case. Throws MalformedLabel when the
/// name is outside the zone, has extra labels, or the leading label is not
/// four hyphen-separated integers in 0..255.
Ipv4Address decode_probe_label(std::string_view fqdn, std::string_view zone);

}  // namespace dnsgap
