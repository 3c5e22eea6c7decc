#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

struct NativeV6 {
    bool operator==(const NativeV6&) const = default;
};

/// 2002::/16 transition address. `invalid_embedded` marks an embedded IPv4
/// that is not globally routable; such resolvers are kept and flagged.
struct SixToFour {
    Ipv4Address embedded;
    bool invalid_embedded = false;
    bool operator==(const SixToFour&) const = default;
};

struct Teredo {
    bool operator==(const Teredo&) const = default;
};

using Ipv6Kind = std::variant<NativeV6, SixToFour, Teredo>;

Ipv6Kind classify_v6_kind(const Ipv6Address& addr);

/// Places `v4` in bits 16-47 of 2002::/16; the remaining bits are zero.
Ipv6Address six_to_four_prefix(Ipv4Address v4);

/// "native", "6to4" or "teredo".
std::string_view v6_kind_name(const Ipv6Kind& kind);

inline bool is_six_to_four(const Ipv6Kind& k) { return std::holds_alternative<SixToFour>(k); }

}  // namespace dnsgap
