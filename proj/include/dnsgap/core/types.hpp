#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dnsgap/core/ip.hpp"
#include "dnsgap/core/v6_kind.hpp"

namespace dnsgap {

enum class Interface { V4, V6 };
enum class RrType : std::uint16_t { A = 1, AAAA = 28 };

std::string_view to_string(Interface i);
std::string_view to_string(RrType t);
Interface parse_interface(std::string_view s);
RrType parse_rrtype(std::string_view s);

/// Connection-type class. Labels outside the three known classes keep their
/// verbatim text and fall into the Unknown bucket.
class ConnType {
public:
    enum class Kind { Corporate, CableDsl, Cellular, Unknown };

    ConnType() = default;
    explicit ConnType(Kind kind);
    static ConnType from_label(std::string_view label);

    Kind kind() const { return kind_; }
    const std::string& label() const { return label_; }
    bool operator==(const ConnType& o) const { return kind_ == o.kind_ && label_ == o.label_; }

private:
    Kind kind_ = Kind::Unknown;
    std::string label_ = "Unknown";
};

struct ResolverPair {
    Ipv4Address v4;
    Ipv6Address v6;
    Ipv6Kind v6_kind;
    std::string country;
    std::uint32_t asn = 0;
    std::string as_name;
    ConnType conn_type;

    /// Stable identifier used by probe tasks: "<v4>|<v6>".
    std::string id() const { return v4.to_string() + "|" + v6.to_string(); }
    bool operator==(const ResolverPair&) const = default;
};

/// A target domain whose A and AAAA answers and certificates checked out
/// from an uncensored vantage point.
struct VettedDomain {
    std::string name;
    std::vector<Ipv4Address> a_ips;
    std::vector<Ipv6Address> aaaa_ips;
    std::string vetted_at;
    std::optional<std::string> category;
};

struct ProbeTask {
    std::string pair_id;
    Interface iface = Interface::V4;
    RrType rrtype = RrType::A;
    std::string domain;
    bool rd_flag = true;
    std::uint16_t txid = 0;
    /// Address the query is sent to: the pair's interface address, or a
    /// trusted resolver when vetting.
    IpAddress server;
    /// Position in the planned stream.
    std::uint64_t seq = 0;
};

struct AnswerRecord {
    std::string name;
    std::uint16_t type = 0;
    std::uint16_t rrclass = 1;
    std::uint32_t ttl = 0;
    std::vector<std::uint8_t> rdata;
};

/// One DNS response matched to a probe by transaction id and question.
struct ProbeResponse {
    IpAddress source;
    double offset_ms = 0;
    std::uint8_t rcode = 0;
    std::vector<AnswerRecord> answers;
    std::vector<std::uint8_t> raw;
};

/// A datagram carrying the probe's transaction id that did not match the
/// question section or could not be parsed.
struct ProbeAnomaly {
    IpAddress source;
    double offset_ms = 0;
    std::string reason;
    std::vector<std::uint8_t> raw;
};

enum class ProbeStatus { Answered, Timeout, NetworkError };
std::string_view to_string(ProbeStatus s);
ProbeStatus parse_probe_status(std::string_view s);

struct ProbeResult {
    ProbeTask task;
    ProbeStatus status = ProbeStatus::Timeout;
    std::vector<ProbeResponse> responses;
    std::vector<ProbeAnomaly> anomalies;
    std::string error;
};

}  // namespace dnsgap
