#include <doctest.h>

#include <random>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/records.hpp"
#include "dnsgap/discovery/correlate.hpp"
#include "dnsgap/discovery/health.hpp"
#include "dnsgap/discovery/pcap.hpp"
#include "dnsgap/probe/dns_message.hpp"
#include "dnsgap/simnet/presets.hpp"
#include "dnsgap/simnet/sim_transport.hpp"
#include "dnsgap/simnet/world.hpp"
#include "temp_dir.hpp"

using namespace dnsgap;

namespace {

const std::string kZone = "v6onlyNS.io";

NsLogEntry entry(const char* v4, const char* v6, double ts, const std::string& zone = kZone) {
    return {encode_probe_label(Ipv4Address::parse(v4), zone), Ipv6Address::parse(v6), ts};
}

// Minimal pcap builder: global header, then one record per frame.
struct PcapBuilder {
    std::uint32_t link;
    bool nano = false;
    bool big_endian = false;
    std::string bytes;

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            const int shift = big_endian ? 24 - 8 * i : 8 * i;
            bytes.push_back(static_cast<char>(v >> shift));
        }
    }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) {
            const int shift = big_endian ? 8 - 8 * i : 8 * i;
            bytes.push_back(static_cast<char>(v >> shift));
        }
    }
    PcapBuilder(std::uint32_t link_type, bool nanos = false, bool be = false) : link(link_type), nano(nanos), big_endian(be) {
        u32(nano ? 0xA1B23C4D : 0xA1B2C3D4);
        u16(2);
        u16(4);
        u32(0);
        u32(0);
        u32(65535);
        u32(link);
    }
    void add(std::uint32_t sec, std::uint32_t sub, const std::vector<std::uint8_t>& frame) {
        u32(sec);
        u32(sub);
        u32(static_cast<std::uint32_t>(frame.size()));
        u32(static_cast<std::uint32_t>(frame.size()));
        bytes.append(frame.begin(), frame.end());
    }
};

std::vector<std::uint8_t> ipv6_udp(const Ipv6Address& src, std::uint16_t dport, const std::vector<std::uint8_t>& payload,
                                   bool hop_by_hop = false) {
    std::vector<std::uint8_t> p = {0x60, 0, 0, 0};
    const std::size_t ext = hop_by_hop ? 8 : 0;
    const std::size_t plen = 8 + payload.size() + ext;
    p.push_back(static_cast<std::uint8_t>(plen >> 8));
    p.push_back(static_cast<std::uint8_t>(plen));
    p.push_back(hop_by_hop ? 0 : 17);
    p.push_back(64);
    p.insert(p.end(), src.bytes().begin(), src.bytes().end());
    const auto dst = Ipv6Address::parse("2001:db8::53").bytes();
    p.insert(p.end(), dst.begin(), dst.end());
    if (hop_by_hop) p.insert(p.end(), {17, 0, 1, 4, 0, 0, 0, 0});
    const std::size_t ulen = 8 + payload.size();
    p.insert(p.end(), {0x30, 0x39, static_cast<std::uint8_t>(dport >> 8), static_cast<std::uint8_t>(dport),
                       static_cast<std::uint8_t>(ulen >> 8), static_cast<std::uint8_t>(ulen), 0, 0});
    p.insert(p.end(), payload.begin(), payload.end());
    return p;
}

std::vector<std::uint8_t> ethernet(const std::vector<std::uint8_t>& ip, std::uint16_t ethertype = 0x86DD, bool vlan = false) {
    std::vector<std::uint8_t> f(12, 0xAA);
    if (vlan) f.insert(f.end(), {0x81, 0x00, 0x00, 0x07});
    f.push_back(static_cast<std::uint8_t>(ethertype >> 8));
    f.push_back(static_cast<std::uint8_t>(ethertype));
    f.insert(f.end(), ip.begin(), ip.end());
    return f;
}

std::vector<std::uint8_t> query_for(const char* v4, const std::string& zone = kZone) {
    return dns::build_query(7, encode_probe_label(Ipv4Address::parse(v4), zone), 1, true);
}

}  // namespace

TEST_CASE("correlator keeps the earliest sighting per pair and counts the rest") {
    Correlator c(kZone, std::set<Ipv4Address>{Ipv4Address::parse("1.1.1.1"), Ipv4Address::parse("2.2.2.2")});
    c.add(entry("1.1.1.1", "2001:db8::1", 50));
    c.add(entry("1.1.1.1", "2001:db8::1", 20));
    c.add({"1-1-1-1.V6ONLYns.IO.", Ipv6Address::parse("2001:db8::2"), 30});
    c.add(entry("2.2.2.2", "2001:db8::1", 40));
    c.add(entry("9.9.9.9", "2001:db8::9", 1));
    c.add({"www.v6onlyNS.io", Ipv6Address::parse("2001:db8::3"), 1});
    c.add({"1-1-1-300.v6onlyNS.io", Ipv6Address::parse("2001:db8::3"), 1});
    c.add({"1-1-1-1.other.io", Ipv6Address::parse("2001:db8::3"), 1});

    const auto got = c.candidates();
    REQUIRE(got.size() == 3);
    CHECK(got[0] == PairCandidate{Ipv4Address::parse("1.1.1.1"), Ipv6Address::parse("2001:db8::1"), 20});
    CHECK(got[1].v6 == Ipv6Address::parse("2001:db8::2"));
    CHECK(got[2].v4 == Ipv4Address::parse("2.2.2.2"));
    const auto& s = c.stats();
    CHECK(s.entries == 8);
    CHECK(s.unsolicited == 1);
    CHECK(s.malformed == 2);
    CHECK(s.outside_zone == 1);
    CHECK(s.candidates == 3);
}

TEST_CASE("infrastructure pruning matches a sharing count") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PairCandidate> cands;
        const int n = 1 + static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            Ipv6Address::Bytes b{};
            b[0] = 0x20;
            b[15] = static_cast<std::uint8_t>(rng() % 12);
            cands.push_back({Ipv4Address(static_cast<std::uint32_t>(0x01000000 + i)), Ipv6Address(b), 0});
        }
        for (std::size_t k : {1, 2, 3}) {
            std::map<Ipv6Address, std::size_t> share;
            for (const auto& c : cands) ++share[c.v6];
            std::vector<PairCandidate> expect;
            for (const auto& c : cands) {
                if (share[c.v6] <= k) expect.push_back(c);
            }
            CHECK(prune_infrastructure(cands, k) == expect);
        }
    }
}

TEST_CASE("geo filter keeps only routable same-country pairs") {
    testing::TempDir dir;
    testing::write_file(dir.path() / "geo.csv", "8.0.0.0/8,US\n2001:4860::/32,US\n9.0.0.0/8,DE\n2a00::/16,FR\n");
    testing::write_file(dir.path() / "asn.csv", "8.0.0.0/8,AS15169 GOOGLE\n");
    testing::write_file(dir.path() / "conn.csv", "8.0.0.0/8,Corporate\n");
    const auto geo = GeoProvider::open(dir.path() / "geo.csv");
    const auto asn = AsnProvider::open(dir.path() / "asn.csv");
    const auto conn = ConnTypeProvider::open(dir.path() / "conn.csv");

    const std::vector<PairCandidate> cands = {
        {Ipv4Address::parse("8.8.8.8"), Ipv6Address::parse("2001:4860::8888"), 0},
        {Ipv4Address::parse("9.9.9.9"), Ipv6Address::parse("2a00::1"), 0},
        {Ipv4Address::parse("10.0.0.1"), Ipv6Address::parse("2001:4860::1"), 0},
        {Ipv4Address::parse("7.7.7.7"), Ipv6Address::parse("2001:4860::2"), 0},
    };
    GeoFilterStats st;
    const auto kept = prune_geo_mismatch(cands, {&geo, &asn, &conn}, &st);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].country == "US");
    CHECK(kept[0].asn == 15169);
    CHECK(kept[0].as_name == "GOOGLE");
    CHECK(kept[0].conn_type.kind() == ConnType::Kind::Corporate);
    CHECK(st.kept == 1);
    CHECK(st.mismatched == 1);
    CHECK(st.non_routable == 1);
    CHECK(st.unknown_geo == 1);
    CHECK_THROWS_AS(prune_geo_mismatch(cands, {}), std::invalid_argument);
}

TEST_CASE("NS log records and timestamps") {
    CHECK(parse_timestamp(json(12.5)) == 12.5);
    CHECK(parse_timestamp(json("2023-05-01T00:00:00Z")) == 1682899200.0);
    CHECK(parse_timestamp(json("2023-05-01T00:00:01.250Z")) == doctest::Approx(1682899201.25));
    CHECK_THROWS_AS(parse_timestamp(json("2023-05-01T00:00:00+02:00")), RecordFormatError);
    CHECK_THROWS_AS(parse_timestamp(json("yesterday")), RecordFormatError);

    const NsLogEntry e{"1-2-3-4.v6onlyNS.io", Ipv6Address::parse("2001:db8::5"), 99.5};
    const auto back = ns_log_entry_from_json(to_json(e));
    CHECK(back.fqdn == e.fqdn);
    CHECK(back.src == e.src);
    CHECK(back.ts == e.ts);
    CHECK_THROWS_AS(ns_log_entry_from_json(json{{"fqdn", "x"}, {"src", "1.2.3.4"}}), RecordFormatError);
}

TEST_CASE("pcap extraction over each link type") {
    testing::TempDir dir;
    const auto src = Ipv6Address::parse("2001:db8::77");
    const auto good = ipv6_udp(src, 53, query_for("5.6.7.8"));
    for (std::uint32_t link : {1u, 101u, 113u, 229u}) {
        for (bool nano : {false, true}) {
            CAPTURE(link);
            PcapBuilder pb(link, nano, link == 101);
            auto frame = [&](const std::vector<std::uint8_t>& ip) {
                if (link == 1) return ethernet(ip);
                if (link == 113) {
                    std::vector<std::uint8_t> f(14, 0);
                    f.push_back(0x86);
                    f.push_back(0xDD);
                    f.insert(f.end(), ip.begin(), ip.end());
                    return f;
                }
                return ip;
            };
            pb.add(100, nano ? 500000000 : 500000, frame(good));
            pb.add(101, 0, frame(ipv6_udp(src, 5353, query_for("5.6.7.8"))));
            pb.add(102, 0, frame(ipv6_udp(src, 53, query_for("5.6.7.8", "elsewhere.io"))));
            pb.add(103, 0, frame(ipv6_udp(src, 53, {1, 2, 3})));
            pb.add(104, 0, frame(ipv6_udp(src, 53, query_for("9.9.9.9"), true)));
            if (link == 1) {
                pb.add(105, 0, ethernet(good, 0x86DD, true));
                pb.add(106, 0, ethernet({0x45, 0, 0, 20}, 0x0800));
            }
            const auto path = dir.path() / "cap.pcap";
            testing::write_file(path, pb.bytes);
            PcapStats st;
            const auto log = extract_ns_log_from_pcap(path, kZone, 53, &st);
            REQUIRE(log.size() == (link == 1 ? 3u : 2u));
            CHECK(log[0].src == src);
            CHECK(log[0].ts == doctest::Approx(100.5));
            CHECK(decode_probe_label(log[0].fqdn, kZone) == Ipv4Address::parse("5.6.7.8"));
            CHECK(decode_probe_label(log[1].fqdn, kZone) == Ipv4Address::parse("9.9.9.9"));
            CHECK(st.packets == (link == 1 ? 7u : 5u));
            CHECK(st.dns_queries == log.size());
        }
    }
}

TEST_CASE("pcap format errors") {
    testing::TempDir dir;
    const auto path = dir.path() / "bad.pcap";
    testing::write_file(path, "short");
    CHECK_THROWS_AS(extract_ns_log_from_pcap(path, kZone), PcapFormatError);
    testing::write_file(path, std::string("\x0a\x0d\x0d\x0a", 4) + std::string(40, '\0'));
    CHECK_THROWS_AS(extract_ns_log_from_pcap(path, kZone), PcapFormatError);
    PcapBuilder pb(1);
    pb.add(1, 0, ethernet(ipv6_udp(Ipv6Address::parse("2001:db8::1"), 53, query_for("1.2.3.4"))));
    pb.bytes.resize(pb.bytes.size() - 5);
    testing::write_file(path, pb.bytes);
    CHECK_THROWS_AS(extract_ns_log_from_pcap(path, kZone), PcapFormatError);
    PcapBuilder wrong(147);
    testing::write_file(path, wrong.bytes);
    CHECK_THROWS_AS(extract_ns_log_from_pcap(path, kZone), PcapFormatError);
    CHECK_THROWS_AS(extract_ns_log_from_pcap(dir.path() / "missing.pcap", kZone), PcapFormatError);
}

TEST_CASE("discovery recovers the simulated pairs from the name server log") {
    const sim::World world(sim::iran_preset({.seed = 3, .resolvers = 20, .domains = 4}));
    const auto log = world.ns_log(kZone);
    const auto cands = prune_infrastructure(correlate_pairs(log, kZone));
    std::set<std::pair<Ipv4Address, Ipv6Address>> got, want;
    for (const auto& c : cands) got.insert({c.v4, c.v6});
    std::map<Ipv6Address, int> egress_share;
    for (const auto& r : world.config().resolvers) ++egress_share[r.ns_egress.value_or(r.v6)];
    for (const auto& r : world.config().resolvers) {
        const auto egress = r.ns_egress.value_or(r.v6);
        if (egress_share[egress] == 1) want.insert({r.v4, egress});
    }
    CHECK(got == want);
    CHECK_FALSE(got.empty());
}

TEST_CASE("pair health against the simulated world") {
    auto cfg = sim::iran_preset({.seed = 4, .resolvers = 12, .domains = 6});
    const sim::World world(cfg);
    sim::SimTransport transport(world);

    // A control the censor leaves alone, and one it blocks.
    std::string open_name, blocked_name;
    std::set<std::string> blocked;
    for (const auto& p : cfg.policies) {
        for (const auto& r : p.blocked) blocked.insert(r.domain);
    }
    for (const auto& d : cfg.domains) {
        if (blocked.count(d.name) == 0 && open_name.empty()) open_name = d.name;
        if (blocked.count(d.name) && blocked_name.empty()) blocked_name = d.name;
    }
    REQUIRE_FALSE(open_name.empty());
    REQUIRE_FALSE(blocked_name.empty());
    ControlAnswers expected;
    for (const auto& name : {open_name, blocked_name}) {
        const auto* d = world.domain(name);
        expected[name] = {{d->a.begin(), d->a.end()}, {d->aaaa.begin(), d->aaaa.end()}};
    }

    const auto pairs = world.pairs();
    auto healthy = verify_pairs_health(pairs, {open_name}, expected, transport);
    REQUIRE(healthy.size() == pairs.size());
    for (const auto& h : healthy) {
        CHECK(h.stable);
        CHECK(h.reason.empty());
    }

    // Iranian resolvers all sit behind the injector, so a blocked control
    // flags every pair with a wrong answer.
    const auto flagged = verify_pairs_health(pairs, {open_name, blocked_name}, expected, transport);
    for (const auto& h : flagged) {
        CHECK_FALSE(h.stable);
        CHECK(h.reason.find(blocked_name) != std::string::npos);
    }

    transport.set_unroutable(AddressFamily::V6);
    const auto no_v6 = verify_pair_health(pairs.front(), {open_name}, expected, transport);
    CHECK_FALSE(no_v6.stable);
    CHECK(no_v6.reason.find("/v6") != std::string::npos);
}

TEST_CASE("IPv4 candidate validation and probe label delivery") {
    auto cfg = sim::iran_preset({.seed = 8, .resolvers = 6, .domains = 3});
    const sim::World world(cfg);
    sim::SimTransport transport(world);
    std::vector<Ipv4Address> cands;
    for (const auto& p : world.pairs()) cands.push_back(p.v4);
    cands.push_back(Ipv4Address::parse("192.0.2.1"));  // nobody home

    std::set<std::string> blocked;
    for (const auto& p : cfg.policies) {
        for (const auto& r : p.blocked) blocked.insert(r.domain);
    }
    const sim::SimDomain* control = nullptr;
    for (const auto& dom : cfg.domains) {
        if (!blocked.count(dom.name)) control = &dom;
    }
    REQUIRE(control);
    const auto valid = validate_ipv4_candidates(cands, control->name, {{control->a.begin(), control->a.end()}, {}}, transport);
    CHECK(valid.size() == cands.size() - 1);

    const auto results = send_probe_labels(cands, kZone, transport);
    REQUIRE(results.size() == cands.size());
    CHECK(results.back().status == ProbeStatus::Timeout);
    CHECK(decode_probe_label(results.front().task.domain, kZone) == cands.front());
}
