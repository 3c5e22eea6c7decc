#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

/// Local socket failure: bind, send or receive error. Distinct from a probe
/// that simply received no answer.
class NetworkError : public std::runtime_error {
public:
    explicit NetworkError(const std::string& what) : std::runtime_error(what) {}
};

struct Datagram {
    IpAddress source;
    std::uint16_t source_port = 53;
    std::vector<std::uint8_t> payload;
};

/// What the probe engine talks to. Real sockets and the simulator implement
/// the same interface, and the engine takes all its time readings from
/// `now()` so a virtual clock works unchanged.
class UdpTransport {
public:
    using Clock = std::chrono::steady_clock;

    virtual ~UdpTransport() = default;
    /// Throws NetworkError on local failure.
    virtual void send(const IpAddress& destination, std::span<const std::uint8_t> payload) = 0;
    /// Next datagram, or nullopt once `deadline` passes.
    virtual std::optional<Datagram> receive(Clock::time_point deadline) = 0;
    virtual Clock::time_point now() const = 0;
};

struct UdpEndpoint {
    IpAddress address;
    std::uint16_t port = 53;
};

/// Non-blocking v4 and v6 UDP sockets on ephemeral ports. Routes let a
/// logical resolver address stand for a loopback endpoint; datagrams from a
/// routed endpoint are reported under the logical address.
class SocketTransport : public UdpTransport {
public:
    explicit SocketTransport(std::uint16_t destination_port = 53);
    ~SocketTransport() override;
    SocketTransport(const SocketTransport&) = delete;
    SocketTransport& operator=(const SocketTransport&) = delete;

    void add_route(const IpAddress& logical, const UdpEndpoint& physical);

    void send(const IpAddress& destination, std::span<const std::uint8_t> payload) override;
    std::optional<Datagram> receive(Clock::time_point deadline) override;
    Clock::time_point now() const override { return Clock::now(); }

private:
    int socket_for(AddressFamily family);

    std::uint16_t destination_port_;
    int fd4_ = -1;
    int fd6_ = -1;
    std::map<IpAddress, UdpEndpoint> routes_;
    std::map<std::pair<IpAddress, std::uint16_t>, IpAddress> reverse_;
};

/// sockaddr conversion helpers shared with the loopback simulator.
struct SockAddr {
    alignas(8) unsigned char storage[128];
    unsigned length = 0;
};
SockAddr to_sockaddr(const IpAddress& address, std::uint16_t port);
UdpEndpoint from_sockaddr(const void* sa, unsigned length);

}  // namespace dnsgap
