#include "dnsgap/core/v6_kind.hpp"

namespace dnsgap {

Ipv6Kind classify_v6_kind(const Ipv6Address& addr) {
    const auto& b = addr.bytes();
    if (b[0] == 0x20 && b[1] == 0x02) {
        Ipv4Address embedded(b[2], b[3], b[4], b[5]);
        return SixToFour{embedded, !embedded.is_global()};
    }
    if (b[0] == 0x20 && b[1] == 0x01 && b[2] == 0x00 && b[3] == 0x00) return Teredo{};
    return NativeV6{};
}

Ipv6Address six_to_four_prefix(Ipv4Address v4) {
    Ipv6Address::Bytes b{};
    b[0] = 0x20;
    b[1] = 0x02;
    const auto q = v4.bytes();
    for (int i = 0; i < 4; ++i) b[2 + i] = q[i];
    return Ipv6Address(b);
}

std::string_view v6_kind_name(const Ipv6Kind& kind) {
    switch (kind.index()) {
        case 0: return "native";
        case 1: return "6to4";
        default: return "teredo";
    }
}

}  // namespace dnsgap
