#include "dnsgap/core/ip.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

namespace dnsgap {

namespace {

struct V4Range {
    Ipv4Address net;
    int len;
};

// RFC 6890 special-purpose space that is not globally reachable.
constexpr V4Range kV4NonGlobal[] = {
    {Ipv4Address(0, 0, 0, 0), 8},        {Ipv4Address(10, 0, 0, 0), 8},
    {Ipv4Address(100, 64, 0, 0), 10},    {Ipv4Address(127, 0, 0, 0), 8},
    {Ipv4Address(169, 254, 0, 0), 16},   {Ipv4Address(172, 16, 0, 0), 12},
    {Ipv4Address(192, 0, 0, 0), 24},     {Ipv4Address(192, 0, 2, 0), 24},
    {Ipv4Address(192, 88, 99, 0), 24},   {Ipv4Address(192, 168, 0, 0), 16},
    {Ipv4Address(198, 18, 0, 0), 15},    {Ipv4Address(198, 51, 100, 0), 24},
    {Ipv4Address(203, 0, 113, 0), 24},   {Ipv4Address(224, 0, 0, 0), 4},
    {Ipv4Address(240, 0, 0, 0), 4},
};

Ipv6Address v6_literal(std::string_view text) { return Ipv6Address::parse(text); }

}  // namespace

std::optional<Ipv4Address> Ipv4Address::try_parse(std::string_view text) {
    // Strict dotted quad: four decimal octets, no leading '+' or whitespace.
    std::uint32_t value = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int i = 0; i < 4; ++i) {
        if (p == end || *p < '0' || *p > '9') return std::nullopt;
        unsigned octet = 0;
        auto [next, ec] = std::from_chars(p, end, octet);
        if (ec != std::errc{} || octet > 255 || next - p > 3) return std::nullopt;
        value = (value << 8) | octet;
        p = next;
        if (i < 3) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
    }
    if (p != end) return std::nullopt;
    return Ipv4Address(value);
}

Ipv4Address Ipv4Address::parse(std::string_view text) {
    if (auto v = try_parse(text)) return *v;
    throw AddressParseError(std::string(text));
}

std::array<std::uint8_t, 4> Ipv4Address::bytes() const {
    return {octet(0), octet(1), octet(2), octet(3)};
}

std::string Ipv4Address::to_string() const {
    std::string out;
    out.reserve(15);
    for (int i = 0; i < 4; ++i) {
        if (i) out.push_back('.');
        out += std::to_string(octet(i));
    }
    return out;
}

bool Ipv4Address::in_prefix(Ipv4Address prefix, int length) const {
    if (length <= 0) return true;
    const std::uint32_t mask = length >= 32 ? 0xFFFFFFFFu : ~(0xFFFFFFFFu >> length);
    return (value_ & mask) == (prefix.value() & mask);
}

bool Ipv4Address::is_global() const {
    if (value_ == 0xFFFFFFFFu) return false;
    for (const auto& r : kV4NonGlobal) {
        if (in_prefix(r.net, r.len)) return false;
    }
    return true;
}

std::optional<Ipv6Address> Ipv6Address::try_parse(std::string_view text) {
    if (text.empty() || text.size() >= INET6_ADDRSTRLEN) return std::nullopt;
    char buf[INET6_ADDRSTRLEN];
    std::memcpy(buf, text.data(), text.size());
    buf[text.size()] = '\0';
    Bytes bytes{};
    if (inet_pton(AF_INET6, buf, bytes.data()) != 1) return std::nullopt;
    return Ipv6Address(bytes);
}

Ipv6Address Ipv6Address::parse(std::string_view text) {
    if (auto v = try_parse(text)) return *v;
    throw AddressParseError(std::string(text));
}

std::string Ipv6Address::to_string() const {
    char buf[INET6_ADDRSTRLEN];
    if (!inet_ntop(AF_INET6, bytes_.data(), buf, sizeof buf)) return {};
    return buf;
}

bool Ipv6Address::in_prefix(const Ipv6Address& prefix, int length) const {
    if (length <= 0) return true;
    if (length > 128) length = 128;
    const int full = length / 8;
    if (std::memcmp(bytes_.data(), prefix.bytes_.data(), static_cast<std::size_t>(full)) != 0) return false;
    const int rem = length % 8;
    if (rem == 0) return true;
    const std::uint8_t mask = static_cast<std::uint8_t>(0xFF << (8 - rem));
    return (bytes_[full] & mask) == (prefix.bytes_[full] & mask);
}

bool Ipv6Address::is_global_unicast() const {
    static const Ipv6Address global = v6_literal("2000::");
    static const Ipv6Address ietf = v6_literal("2001::");
    static const Ipv6Address doc = v6_literal("2001:db8::");
    static const Ipv6Address doc2 = v6_literal("3fff::");
    if (!in_prefix(global, 3)) return false;
    if (in_prefix(ietf, 23)) return false;
    if (in_prefix(doc, 32)) return false;
    if (in_prefix(doc2, 20)) return false;
    return true;
}

std::optional<IpAddress> IpAddress::try_parse(std::string_view text) {
    if (text.find(':') != std::string_view::npos) {
        if (auto v6 = Ipv6Address::try_parse(text)) return IpAddress(*v6);
        return std::nullopt;
    }
    if (auto v4 = Ipv4Address::try_parse(text)) return IpAddress(*v4);
    return std::nullopt;
}

IpAddress IpAddress::parse(std::string_view text) {
    if (auto v = try_parse(text)) return *v;
    throw AddressParseError(std::string(text));
}

std::string IpAddress::to_string() const {
    return is_v4() ? v4().to_string() : v6().to_string();
}

IpPrefix IpPrefix::parse(std::string_view text) {
    const auto slash = text.find('/');
    IpPrefix p;
    p.network = IpAddress::parse(text.substr(0, slash));
    const int max_len = p.network.is_v4() ? 32 : 128;
    if (slash == std::string_view::npos) {
        p.length = max_len;
        return p;
    }
    auto len_text = text.substr(slash + 1);
    auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), p.length);
    if (ec != std::errc{} || ptr != len_text.data() + len_text.size() || p.length < 0 || p.length > max_len) {
        throw AddressParseError(std::string(text));
    }
    return p;
}

bool IpPrefix::contains(const IpAddress& addr) const {
    if (addr.family() != network.family()) return false;
    return addr.is_v4() ? addr.v4().in_prefix(network.v4(), length) : addr.v6().in_prefix(network.v6(), length);
}

std::string IpPrefix::to_string() const { return network.to_string() + "/" + std::to_string(length); }

}  // namespace dnsgap

std::size_t std::hash<dnsgap::IpAddress>::operator()(const dnsgap::IpAddress& a) const noexcept {
    std::size_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint8_t b) { h = (h ^ b) * 1099511628211ull; };
    if (a.is_v4()) {
        for (auto b : a.v4().bytes()) mix(b);
    } else {
        mix(0xFF);
        for (auto b : a.v6().bytes()) mix(b);
    }
    return h;
}
