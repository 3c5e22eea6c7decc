#include <doctest.h>

#include "dnsgap/domainvet/vet.hpp"
#include "dnsgap/simnet/sim_transport.hpp"
#include "dnsgap/simnet/world.hpp"

using namespace dnsgap;

namespace {

sim::SimDomain dom(std::string name, std::vector<const char*> a, std::vector<const char*> aaaa, bool tls = true) {
    sim::SimDomain d;
    d.name = std::move(name);
    for (const auto* s : a) d.a.push_back(Ipv4Address::parse(s));
    for (const auto* s : aaaa) d.aaaa.push_back(Ipv6Address::parse(s));
    d.tls_valid = tls;
    return d;
}

sim::SimWorldConfig vet_world() {
    sim::SimWorldConfig cfg;
    cfg.seed = 9;
    sim::SimResolver r;
    r.v4 = Ipv4Address::parse("203.0.113.1");
    r.v6 = Ipv6Address::parse("2a01:4f8::1");
    r.country = "DE";
    cfg.resolvers.push_back(r);
    cfg.domains = {
        dom("good.example", {"93.184.216.34", "93.184.216.35"}, {"2606:2800:220:1::1"}),
        dom("v4only.example", {"93.184.216.36"}, {}),
        dom("v6only.example", {}, {"2606:2800:220:1::2"}),
        dom("private.example", {"10.0.0.5"}, {"2606:2800:220:1::3"}),
        dom("badcert.example", {"93.184.216.37"}, {"2606:2800:220:1::4"}, false),
    };
    cfg.domains[0].category = "News";
    return cfg;
}

VetOptions fixed_clock() {
    VetOptions o;
    o.clock = [] { return std::chrono::system_clock::time_point(std::chrono::seconds(1700000000)); };
    return o;
}

}  // namespace

TEST_CASE("single-domain vetting outcomes") {
    const sim::World world(vet_world());
    sim::SimTransport transport(world);
    sim::OracleTlsProber tls(world);
    const auto opts = fixed_clock();

    auto out = vet_domain("good.example", world.trusted(), transport, tls, opts);
    REQUIRE(std::holds_alternative<VettedDomain>(out));
    const auto& v = std::get<VettedDomain>(out);
    CHECK(v.a_ips.size() == 2);
    CHECK(v.aaaa_ips == std::vector<Ipv6Address>{Ipv6Address::parse("2606:2800:220:1::1")});
    CHECK(v.vetted_at == "2023-11-14T22:13:20Z");

    auto reason = [&](const std::string& name) {
        auto o = vet_domain(name, world.trusted(), transport, tls, opts);
        REQUIRE(std::holds_alternative<Rejection>(o));
        return std::get<Rejection>(o).reason;
    };
    CHECK(reason("v4only.example") == RejectReason::NoAAAA);
    CHECK(reason("v6only.example") == RejectReason::NoA);
    CHECK(reason("private.example") == RejectReason::NoA);
    CHECK(reason("badcert.example") == RejectReason::TlsInvalid);
    CHECK(reason(std::string(64, 'x') + ".example") == RejectReason::InvalidName);
    CHECK(reason("bad..example") == RejectReason::InvalidName);
}

TEST_CASE("no trusted resolver answering is an error, not a rejection") {
    const sim::World world(vet_world());
    sim::SimTransport transport(world);
    sim::OracleTlsProber tls(world);
    const std::vector<IpAddress> silent = {IpAddress::parse("192.0.2.99")};
    CHECK_THROWS_AS(vet_domain("good.example", silent, transport, tls, fixed_clock()), ResolverUnreachable);
}

TEST_CASE("batch vetting matches single vetting and keeps input order") {
    const sim::World world(vet_world());
    sim::OracleTlsProber tls(world);
    const std::vector<std::string> names = {"badcert.example", "good.example", "v4only.example", "private.example",
                                            "v6only.example", std::string(64, 'y') + ".example", "good.example"};
    sim::SimTransport batch_transport(world);
    const auto report = vet_domains(names, world.trusted(), batch_transport, tls, fixed_clock());
    CHECK(report.total() == names.size());
    REQUIRE(report.vetted.size() == 2);
    CHECK(report.vetted[0].name == "good.example");
    CHECK(report.count(RejectReason::NoA) == 2);
    CHECK(report.count(RejectReason::NoAAAA) == 1);
    CHECK(report.count(RejectReason::TlsInvalid) == 1);
    CHECK(report.count(RejectReason::InvalidName) == 1);
    REQUIRE(report.rejected.size() == 5);
    CHECK(report.rejected[0].first == "badcert.example");
    CHECK(report.rejected[1].first == "v4only.example");

    for (const auto& [name, rej] : report.rejected) {
        sim::SimTransport single_transport(world);
        const auto single = vet_domain(name, world.trusted(), single_transport, tls, fixed_clock());
        REQUIRE(std::holds_alternative<Rejection>(single));
        CHECK(std::get<Rejection>(single).reason == rej.reason);
    }

    const std::vector<IpAddress> silent = {IpAddress::parse("192.0.2.99")};
    sim::SimTransport t2(world);
    const auto none = vet_domains({"good.example"}, silent, t2, tls, fixed_clock());
    CHECK(none.unreachable == std::vector<std::string>{"good.example"});
}

TEST_CASE("a domain whose certificates never validate is rejected") {
    struct Refuse : TlsProber {
        TlsCheck verify(const IpAddress&, const std::string&) override { return {TlsOutcome::Failed, "bad cert"}; }
    } tls;
    const sim::World world(vet_world());
    sim::SimTransport transport(world);
    const auto out = vet_domain("good.example", world.trusted(), transport, tls, fixed_clock());
    REQUIRE(std::holds_alternative<Rejection>(out));
    CHECK(std::get<Rejection>(out).reason == RejectReason::TlsInvalid);
}
