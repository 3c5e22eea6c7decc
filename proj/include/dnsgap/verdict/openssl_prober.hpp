#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "dnsgap/core/util.hpp"
#include "dnsgap/probe/transport.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap {

struct TlsProberOptions {
    std::uint16_t port = 443;
    std::chrono::milliseconds timeout{10000};
    /// "system" for the platform store, otherwise a PEM bundle path.
    std::string trust = "system";
    /// Global handshakes per second (0 = uncapped) and minimum spacing
    /// between handshakes to one address.
    double rate = 50.0;
    std::chrono::milliseconds per_host_spacing{0};
};

/// TCP connect plus TLS handshake with SNI, chain verification against the
/// configured store and host-name check. A route maps a logical address to
/// the endpoint that actually serves it (loopback simulation).
class OpenSslProber : public TlsProber {
public:
    /// Throws std::runtime_error if the trust store cannot be loaded.
    explicit OpenSslProber(TlsProberOptions options);
    ~OpenSslProber() override;

    void add_route(const IpAddress& logical, const UdpEndpoint& physical);
    TlsCheck verify(const IpAddress& ip, const std::string& sni) override;

private:
    struct Ctx;
    TlsProberOptions options_;
    std::unique_ptr<Ctx> ctx_;
    HandshakeThrottle throttle_;
    std::map<IpAddress, UdpEndpoint> routes_;
};

}  // namespace dnsgap
