#include "dnsgap/discovery/pcap.hpp"

#include <fstream>
#include <iterator>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/probe/dns_message.hpp"

namespace dnsgap {

namespace {

constexpr std::uint32_t kMagicMicro = 0xA1B2C3D4;
constexpr std::uint32_t kMagicNano = 0xA1B23C4D;

constexpr std::uint32_t kLinkEthernet = 1;
constexpr std::uint32_t kLinkRaw = 101;
constexpr std::uint32_t kLinkRawAlt = 12;
constexpr std::uint32_t kLinkSll = 113;
constexpr std::uint32_t kLinkIpv6 = 229;

std::uint16_t be16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] << 8 | p[1]); }

/// Returns the offset of the IP header inside a link-layer frame, or -1.
long ip_offset(std::uint32_t link, const std::vector<std::uint8_t>& f) {
    switch (link) {
        case kLinkEthernet: {
            std::size_t off = 12;
            if (f.size() < off + 2) return -1;
            std::uint16_t type = be16(&f[off]);
            off += 2;
            while (type == 0x8100 || type == 0x88A8) {
                if (f.size() < off + 4) return -1;
                type = be16(&f[off + 2]);
                off += 4;
            }
            return type == 0x86DD ? static_cast<long>(off) : -1;
        }
        case kLinkSll:
            if (f.size() < 16 || be16(&f[14]) != 0x86DD) return -1;
            return 16;
        case kLinkRaw:
        case kLinkRawAlt:
        case kLinkIpv6:
            return 0;
        default:
            return -1;
    }
}

}  // namespace

std::vector<NsLogEntry> extract_ns_log_from_pcap(const std::filesystem::path& path, const std::string& zone,
                                                 std::uint16_t port, PcapStats* stats) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PcapFormatError("cannot open " + path.string());
    std::vector<std::uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 24) throw PcapFormatError(path.string() + ": too short for a pcap header");

    auto rd32 = [&](std::size_t off, bool swap) {
        std::uint32_t v = static_cast<std::uint32_t>(buf[off]) | static_cast<std::uint32_t>(buf[off + 1]) << 8 |
                          static_cast<std::uint32_t>(buf[off + 2]) << 16 |
                          static_cast<std::uint32_t>(buf[off + 3]) << 24;
        if (swap) v = __builtin_bswap32(v);
        return v;
    };
    bool swap = false;
    const std::uint32_t magic = rd32(0, false);
    bool nano = false;
    if (magic == kMagicMicro || magic == kMagicNano) {
        nano = magic == kMagicNano;
    } else if (__builtin_bswap32(magic) == kMagicMicro || __builtin_bswap32(magic) == kMagicNano) {
        swap = true;
        nano = __builtin_bswap32(magic) == kMagicNano;
    } else {
        throw PcapFormatError(path.string() + ": not a classic pcap file (pcapng is not supported)");
    }
    const std::uint32_t link = rd32(20, swap) & 0x0FFFFFFF;
    if (link != kLinkEthernet && link != kLinkRaw && link != kLinkRawAlt && link != kLinkSll && link != kLinkIpv6) {
        throw PcapFormatError(path.string() + ": unsupported link type " + std::to_string(link));
    }

    PcapStats st;
    std::vector<NsLogEntry> out;
    const std::string z = normalize_name(zone);
    std::size_t pos = 24;
    while (pos + 16 <= buf.size()) {
        const std::uint32_t sec = rd32(pos, swap);
        const std::uint32_t sub = rd32(pos + 4, swap);
        const std::uint32_t caplen = rd32(pos + 8, swap);
        pos += 16;
        if (pos + caplen > buf.size()) throw PcapFormatError(path.string() + ": truncated packet record");
        std::vector<std::uint8_t> frame(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                                        buf.begin() + static_cast<std::ptrdiff_t>(pos + caplen));
        pos += caplen;
        ++st.packets;

        const long ip = ip_offset(link, frame);
        if (ip < 0 || frame.size() < static_cast<std::size_t>(ip) + 40 || (frame[static_cast<std::size_t>(ip)] >> 4) != 6) {
            ++st.skipped;
            continue;
        }
        const auto* h = &frame[static_cast<std::size_t>(ip)];
        std::uint8_t next = h[6];
        std::size_t off = static_cast<std::size_t>(ip) + 40;
        // Hop-by-hop, routing and destination options headers.
        while ((next == 0 || next == 43 || next == 60) && off + 8 <= frame.size()) {
            next = frame[off];
            off += 8 + static_cast<std::size_t>(frame[off + 1]) * 8;
        }
        if (next != 17 || off + 8 > frame.size()) {
            ++st.skipped;
            continue;
        }
        ++st.ipv6_udp;
        if (be16(&frame[off + 2]) != port) {
            ++st.skipped;
            continue;
        }
        const std::size_t udp_len = be16(&frame[off + 4]);
        const std::size_t payload_end = std::min(frame.size(), off + std::max<std::size_t>(udp_len, 8));
        std::span<const std::uint8_t> payload(frame.data() + off + 8, payload_end - off - 8);
        try {
            const auto msg = dns::parse(payload);
            if (msg.qr || msg.questions.empty() || !name_in_zone(msg.questions.front().name, z)) {
                ++st.skipped;
                continue;
            }
            Ipv6Address::Bytes src;
            std::copy(h + 8, h + 24, src.begin());
            ++st.dns_queries;
            out.push_back({msg.questions.front().name, Ipv6Address(src), sec + sub / (nano ? 1e9 : 1e6)});
        } catch (const dns::DnsParseError&) {
            ++st.skipped;
        }
    }
    if (stats) *stats = st;
    return out;
}

}  // namespace dnsgap
