#pragma once

#include <chrono>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/probe/engine.hpp"
#include "dnsgap/probe/transport.hpp"

namespace dnsgap {

/// Addresses a control domain must resolve to.
struct ControlExpectation {
    std::set<Ipv4Address> a;
    std::set<Ipv6Address> aaaa;
};
using ControlAnswers = std::map<std::string, ControlExpectation>;

struct HealthResult {
    bool stable = false;
    /// First failing control, e.g. "control1/AAAA/v6 timeout" or
    /// "control2 wrong answer". Empty when stable.
    std::string reason;
};

struct HealthOptions {
    std::chrono::milliseconds window{2000};
    double rate = 1000.0;
    std::uint64_t seed = 0;
};

/// Queries every control for A and AAAA over both interfaces. A control
/// passes when the reply is NOERROR and every returned address of the
/// queried type is expected (at least one must be returned). Timeouts get
/// one retry with a fresh transaction id; network errors count as failures.
/// Controls are checked in order, v4 before v6, A before AAAA.
std::vector<HealthResult> verify_pairs_health(const std::vector<ResolverPair>& pairs,
                                              const std::vector<std::string>& controls,
                                              const ControlAnswers& expected, UdpTransport& transport,
                                              const HealthOptions& options = {});

HealthResult verify_pair_health(const ResolverPair& pair, const std::vector<std::string>& controls,
                                const ControlAnswers& expected, UdpTransport& transport,
                                const HealthOptions& options = {});

/// Sends the encoded probe label of each candidate to that candidate over
/// IPv4 so resolvers able to reach the IPv6-only name server reveal their
/// IPv6 egress address there. Returns the probe results.
std::vector<ProbeResult> send_probe_labels(const std::vector<Ipv4Address>& candidates, const std::string& zone,
                                           UdpTransport& transport, const HealthOptions& options = {});

/// Keeps candidates that answer one control A query over IPv4 correctly.
std::vector<Ipv4Address> validate_ipv4_candidates(const std::vector<Ipv4Address>& candidates,
                                                  const std::string& control, const ControlExpectation& expected,
                                                  UdpTransport& transport, const HealthOptions& options = {});

}  // namespace dnsgap
