#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace dnsgap {

class AddressParseError : public std::invalid_argument {
public:
    explicit AddressParseError(const std::string& text)
        : std::invalid_argument("invalid IP address: '" + text + "'") {}
};

/// IPv4 address held in host byte order.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}
    constexpr Ipv4Address(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d)
        : value_((std::uint32_t{a} << 24) | (std::uint32_t{b} << 16) | (std::uint32_t{c} << 8) | d) {}

    static Ipv4Address parse(std::string_view text);
    static std::optional<Ipv4Address> try_parse(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    constexpr std::uint8_t octet(int i) const { return static_cast<std::uint8_t>(value_ >> (24 - 8 * i)); }
    std::array<std::uint8_t, 4> bytes() const;
    std::string to_string() const;

    bool in_prefix(Ipv4Address prefix, int length) const;
    /// False for private, loopback, link-local, shared, documentation,
    /// benchmarking, multicast and reserved space.
    bool is_global() const;

    constexpr auto operator<=>(const Ipv4Address&) const = default;

private:
    std::uint32_t value_ = 0;
};

class Ipv6Address {
public:
    using Bytes = std::array<std::uint8_t, 16>;

    constexpr Ipv6Address() = default;
    constexpr explicit Ipv6Address(const Bytes& bytes) : bytes_(bytes) {}

    static Ipv6Address parse(std::string_view text);
    static std::optional<Ipv6Address> try_parse(std::string_view text);

    const Bytes& bytes() const { return bytes_; }
    /// RFC 5952 canonical text form.
    std::string to_string() const;

    bool in_prefix(const Ipv6Address& prefix, int length) const;
    /// Inside 2000::/3 and outside documentation, ORCHID and IETF protocol
    /// assignment space.
    bool is_global_unicast() const;

    auto operator<=>(const Ipv6Address&) const = default;

private:
    Bytes bytes_{};
};

enum class AddressFamily { V4, V6 };

/// Either address family. Ordering puts every IPv4 address before IPv6.
class IpAddress {
public:
    IpAddress() = default;
    IpAddress(Ipv4Address v4) : value_(v4) {}
    IpAddress(Ipv6Address v6) : value_(v6) {}

    static IpAddress parse(std::string_view text);
    static std::optional<IpAddress> try_parse(std::string_view text);

    AddressFamily family() const { return value_.index() == 0 ? AddressFamily::V4 : AddressFamily::V6; }
    bool is_v4() const { return value_.index() == 0; }
    bool is_v6() const { return value_.index() == 1; }
    const Ipv4Address& v4() const { return std::get<Ipv4Address>(value_); }
    const Ipv6Address& v6() const { return std::get<Ipv6Address>(value_); }

    bool is_global() const { return is_v4() ? v4().is_global() : v6().is_global_unicast(); }
    std::string to_string() const;

    auto operator<=>(const IpAddress&) const = default;

private:
    std::variant<Ipv4Address, Ipv6Address> value_;
};

/// An address prefix such as 10.0.0.0/8 or 2001::/32.
struct IpPrefix {
    IpAddress network;
    int length = 0;

    static IpPrefix parse(std::string_view text);
    bool contains(const IpAddress& addr) const;
    std::string to_string() const;
};

}  // namespace dnsgap

template <>
struct std::hash<dnsgap::IpAddress> {
    std::size_t operator()(const dnsgap::IpAddress& a) const noexcept;
};
