#include "dnsgap/probe/transport.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

namespace dnsgap {

namespace {

std::string errno_text(const char* op) { return std::string(op) + ": " + std::strerror(errno); }

}  // namespace

SockAddr to_sockaddr(const IpAddress& address, std::uint16_t port) {
    SockAddr out{};
    if (address.is_v4()) {
        sockaddr_in sin{};
        sin.sin_family = AF_INET;
        sin.sin_port = htons(port);
        sin.sin_addr.s_addr = htonl(address.v4().value());
        std::memcpy(out.storage, &sin, sizeof sin);
        out.length = sizeof sin;
    } else {
        sockaddr_in6 sin6{};
        sin6.sin6_family = AF_INET6;
        sin6.sin6_port = htons(port);
        std::memcpy(&sin6.sin6_addr, address.v6().bytes().data(), 16);
        std::memcpy(out.storage, &sin6, sizeof sin6);
        out.length = sizeof sin6;
    }
    return out;
}

UdpEndpoint from_sockaddr(const void* sa, unsigned length) {
    const auto* base = static_cast<const sockaddr*>(sa);
    if (base->sa_family == AF_INET && length >= sizeof(sockaddr_in)) {
        sockaddr_in sin;
        std::memcpy(&sin, sa, sizeof sin);
        return {Ipv4Address(ntohl(sin.sin_addr.s_addr)), ntohs(sin.sin_port)};
    }
    if (base->sa_family == AF_INET6 && length >= sizeof(sockaddr_in6)) {
        sockaddr_in6 sin6;
        std::memcpy(&sin6, sa, sizeof sin6);
        Ipv6Address::Bytes b;
        std::memcpy(b.data(), &sin6.sin6_addr, 16);
        const Ipv6Address v6(b);
        // v4-mapped sources come back as plain IPv4.
        if (v6.in_prefix(Ipv6Address::parse("::ffff:0:0"), 96)) {
            return {Ipv4Address(b[12], b[13], b[14], b[15]), ntohs(sin6.sin6_port)};
        }
        return {v6, ntohs(sin6.sin6_port)};
    }
    throw NetworkError("unsupported socket address family");
}

SocketTransport::SocketTransport(std::uint16_t destination_port) : destination_port_(destination_port) {}

SocketTransport::~SocketTransport() {
    if (fd4_ >= 0) ::close(fd4_);
    if (fd6_ >= 0) ::close(fd6_);
}

void SocketTransport::add_route(const IpAddress& logical, const UdpEndpoint& physical) {
    routes_[logical] = physical;
    reverse_[{physical.address, physical.port}] = logical;
}

int SocketTransport::socket_for(AddressFamily family) {
    int& fd = family == AddressFamily::V4 ? fd4_ : fd6_;
    if (fd >= 0) return fd;
    const int domain = family == AddressFamily::V4 ? AF_INET : AF_INET6;
    fd = ::socket(domain, SOCK_DGRAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0);
    if (fd < 0) throw NetworkError(errno_text("socket"));
    if (family == AddressFamily::V6) {
        int on = 1;
        ::setsockopt(fd, IPPROTO_IPV6, IPV6_V6ONLY, &on, sizeof on);
    }
    int buf = 4 << 20;
    ::setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &buf, sizeof buf);
    return fd;
}

void SocketTransport::send(const IpAddress& destination, std::span<const std::uint8_t> payload) {
    UdpEndpoint target{destination, destination_port_};
    if (auto it = routes_.find(destination); it != routes_.end()) target = it->second;
    const int fd = socket_for(target.address.family());
    const SockAddr sa = to_sockaddr(target.address, target.port);
    for (;;) {
        const auto n = ::sendto(fd, payload.data(), payload.size(), 0, reinterpret_cast<const sockaddr*>(sa.storage),
                                sa.length);
        if (n >= 0) return;
        if (errno == EINTR) continue;
        if (errno == EAGAIN || errno == EWOULDBLOCK || errno == ENOBUFS) {
            pollfd p{fd, POLLOUT, 0};
            ::poll(&p, 1, 100);
            continue;
        }
        throw NetworkError(errno_text("sendto") + " (" + target.address.to_string() + ")");
    }
}

std::optional<Datagram> SocketTransport::receive(Clock::time_point deadline) {
    std::vector<std::uint8_t> buf(65535);
    for (;;) {
        pollfd fds[2];
        nfds_t n = 0;
        if (fd4_ >= 0) fds[n++] = {fd4_, POLLIN, 0};
        if (fd6_ >= 0) fds[n++] = {fd6_, POLLIN, 0};
        const auto now = Clock::now();
        if (now >= deadline && n == 0) return std::nullopt;
        const auto wait = std::chrono::ceil<std::chrono::milliseconds>(deadline - now).count();
        const int timeout = static_cast<int>(std::clamp<long long>(wait, 0, 1 << 30));
        if (n == 0) {
            ::poll(nullptr, 0, timeout);
            return std::nullopt;
        }
        const int rc = ::poll(fds, n, timeout);
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw NetworkError(errno_text("poll"));
        }
        if (rc == 0) return std::nullopt;
        for (nfds_t i = 0; i < n; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLERR))) continue;
            sockaddr_storage from{};
            socklen_t fromlen = sizeof from;
            const auto got = ::recvfrom(fds[i].fd, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from),
                                        &fromlen);
            if (got < 0) {
                // ICMP unreachable surfaces as ECONNREFUSED on the next read; the
                // probe just times out.
                if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR || errno == ECONNREFUSED) continue;
                throw NetworkError(errno_text("recvfrom"));
            }
            const UdpEndpoint src = from_sockaddr(&from, fromlen);
            Datagram d;
            d.source = src.address;
            d.source_port = src.port;
            if (auto it = reverse_.find({src.address, src.port}); it != reverse_.end()) {
                d.source = it->second;
                d.source_port = destination_port_;
            }
            d.payload.assign(buf.begin(), buf.begin() + got);
            return d;
        }
        if (Clock::now() >= deadline) return std::nullopt;
    }
}

}  // namespace dnsgap
