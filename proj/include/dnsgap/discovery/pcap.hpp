#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnsgap/discovery/correlate.hpp"

namespace dnsgap {

class PcapFormatError : public std::runtime_error {
public:
    explicit PcapFormatError(const std::string& what) : std::runtime_error(what) {}
};

struct PcapStats {
    std::size_t packets = 0;
    std::size_t ipv6_udp = 0;
    std::size_t dns_queries = 0;
    std::size_t skipped = 0;
};

/// Reads a classic libpcap capture (Ethernet, raw IP or Linux cooked
/// link types) taken at the IPv6-only name server and returns one entry per
/// IPv6 DNS query to `port` whose question lies under `zone`.
std::vector<NsLogEntry> extract_ns_log_from_pcap(const std::filesystem::path& path, const std::string& zone,
                                                 std::uint16_t port = 53, PcapStats* stats = nullptr);

}  // namespace dnsgap
