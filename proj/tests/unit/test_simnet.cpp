#include <doctest.h>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/discovery/correlate.hpp"
#include "dnsgap/simnet/campaign.hpp"
#include "dnsgap/simnet/censor.hpp"
#include "dnsgap/simnet/presets.hpp"
#include "dnsgap/simnet/world.hpp"
#include "dnsgap/verdict/records.hpp"
#include "temp_dir.hpp"

using namespace dnsgap;
using namespace dnsgap::sim;

namespace {

SimResolver resolver(const char* v4, const char* v6, CacheBehavior cache = CacheBehavior::AlwaysCached) {
    SimResolver r;
    r.v4 = Ipv4Address::parse(v4);
    r.v6 = Ipv6Address::parse(v6);
    r.country = "IR";
    r.asn = 58224;
    r.as_name = "TCI";
    r.cache = cache;
    return r;
}

SimDomain domain(const std::string& name, int i) {
    SimDomain d;
    d.name = name;
    d.a = {Ipv4Address(static_cast<std::uint32_t>(0x5DB8D800 + i))};
    d.aaaa = {Ipv6Address::parse("2606:2800:220:1::" + std::to_string(i + 1))};
    return d;
}

/// Two domains, one blocked by an Iran-style injector (A 10.10.34.35 over
/// IPv4, AAAA d0::11 over native IPv6, blind to 6to4).
SimWorldConfig small_world(std::vector<SimResolver> resolvers, bool with_censor = true) {
    SimWorldConfig cfg;
    cfg.seed = 17;
    cfg.resolvers = std::move(resolvers);
    cfg.domains = {domain("open.example", 0), domain("blocked.example", 1)};
    if (with_censor) {
        CensorPolicy p;
        p.name = "ir-injector";
        p.scope.country = "IR";
        BlockRule rule;
        rule.domain = "blocked.example";
        rule.action = CensorAction::inject(IpAddress::parse("10.10.34.35"));
        rule.v6_action = CensorAction::inject(IpAddress::parse("d0::11"));
        p.blocked.push_back(rule);
        p.answer_type_independent = true;
        cfg.policies.push_back(p);
    }
    return cfg;
}

CampaignOptions quick() {
    CampaignOptions o;
    o.engine.window = std::chrono::milliseconds(500);
    return o;
}

std::map<std::tuple<Interface, RrType, std::string>, Outcome> by_cell(const CampaignResult& r, const std::string& pair_id) {
    std::map<std::tuple<Interface, RrType, std::string>, Outcome> out;
    for (const auto& v : r.verdicts) {
        if (v.task.pair_id == pair_id) out[{v.task.iface, v.task.rrtype, v.task.domain}] = v.outcome;
    }
    return out;
}

}  // namespace

TEST_CASE("config validation rejects inconsistent worlds") {
    auto base = small_world({resolver("203.0.113.1", "2a01::1")});
    CHECK_NOTHROW(validate(base));

    auto c = base;
    c.resolvers.push_back(resolver("203.0.113.1", "2a01::2"));
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.resolvers[0].country = "";
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.policies[0].injection_probability = 1.5;
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.policies[0].blocked[0].domain = "nowhere.example";
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.policies[0].blocked[0].action = {ActionKind::InjectA, std::nullopt};
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.domains.push_back(domain(std::string(70, 'a') + ".example", 5));
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.policies[0].scope = {};
    CHECK_THROWS_AS(validate(c), ConfigInvalid);
    c = base;
    c.trusted = {IpAddress::parse("203.0.113.1")};
    CHECK_THROWS_AS(World{c}, ConfigInvalid);
}

TEST_CASE("config JSON round trip") {
    testing::TempDir dir;
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const auto cfg = make_preset(name, {.seed = 2, .resolvers = 8, .domains = 10});
        const auto j = to_json(cfg);
        CHECK(to_json(config_from_json(j)) == j);
        const auto path = dir.path() / (name + ".json");
        save_config(path, cfg);
        CHECK(to_json(load_config(path)) == j);
    }
    CHECK_THROWS_AS(make_preset("atlantis"), ConfigInvalid);
    testing::write_file(dir.path() / "bad.json", "{\"resolvers\": 3}");
    CHECK_THROWS_AS(load_config(dir.path() / "bad.json"), ConfigInvalid);
    testing::write_file(dir.path() / "bad.json", "{not json");
    CHECK_THROWS_AS(load_config(dir.path() / "bad.json"), ConfigInvalid);
}

TEST_CASE("censor decision table") {
    CensorPolicy p;
    p.name = "c";
    p.scope.country = "XX";
    BlockRule any{"x.example", RrClass::Any, CensorAction::drop(), CensorAction::inject(IpAddress::parse("::2"))};
    BlockRule aaaa{"x.example", RrClass::AAAA, CensorAction::inject(IpAddress::parse("2001::1")), std::nullopt};
    p.blocked = {any, aaaa};

    CensorContext ctx;
    ctx.domain = "X.Example.";
    CHECK(censor_decide(p, ctx) == CensorAction::drop());
    ctx.rrtype = RrType::AAAA;
    CHECK(censor_decide(p, ctx).kind == ActionKind::InjectAAAA);  // exact-type rule wins
    ctx.rrtype = RrType::A;
    ctx.family = AddressFamily::V6;
    CHECK(censor_decide(p, ctx) == CensorAction::inject(IpAddress::parse("::2")));
    ctx.encapsulated_6to4 = true;
    CHECK(censor_decide(p, ctx) == CensorAction::pass());
    p.parses_6to4 = true;
    CHECK(censor_decide(p, ctx).kind == ActionKind::InjectAAAA);
    p.v6_capable = false;
    CHECK(censor_decide(p, ctx) == CensorAction::pass());
    ctx.family = AddressFamily::V4;
    ctx.encapsulated_6to4 = false;
    p.requires_rd = true;
    ctx.rd_flag = false;
    CHECK(censor_decide(p, ctx) == CensorAction::pass());
    ctx.rd_flag = true;
    p.injection_probability = 0.3;
    ctx.draw = 0.31;
    CHECK(censor_decide(p, ctx) == CensorAction::pass());
    ctx.draw = 0.29;
    CHECK(censor_decide(p, ctx) == CensorAction::drop());
    ctx.domain = "y.example";
    CHECK(censor_decide(p, ctx) == CensorAction::pass());

    SimResolver r;
    r.country = "XX";
    CHECK(policy_applies(p, r));
    p.scope = {std::nullopt, {64500}};
    r.asn = 64500;
    CHECK(policy_applies(p, r));
    r.asn = 1;
    CHECK_FALSE(policy_applies(p, r));
}

TEST_CASE("a world without censors is accessible everywhere") {
    const World world(small_world({resolver("203.0.113.1", "2a01::1"), resolver("203.0.113.2", "2002:cb00:7102::1")}, false));
    const auto res = run_campaign(world, quick());
    REQUIRE(res.verdicts.size() == 2 * 2 * 2 * 2);
    for (const auto& v : res.verdicts) CHECK(v.outcome == Outcome::Accessible);
    CHECK(compare_with_truth(res.verdicts, res.truth).exact());
}

TEST_CASE("6to4 blindness and recursion leakage") {
    const auto native = resolver("203.0.113.1", "2a01::1");
    const auto cached_6to4 = resolver("203.0.113.2", "2002:cb00:7102::1");
    const auto recursing_6to4 = resolver("203.0.113.3", "2002:cb00:7103::1", CacheBehavior::AlwaysRecurse);
    const World world(small_world({native, cached_6to4, recursing_6to4}));
    const auto res = run_campaign(world, quick());
    CHECK(compare_with_truth(res.verdicts, res.truth).exact());
    const auto pairs = world.pairs();

    for (const auto& p : pairs) {
        CAPTURE(p.id());
        const auto cells = by_cell(res, p.id());
        for (auto rr : {RrType::A, RrType::AAAA}) {
            CHECK(cells.at({Interface::V4, rr, "blocked.example"}) == Outcome::Censored);
            CHECK(cells.at({Interface::V4, rr, "open.example"}) == Outcome::Accessible);
            CHECK(cells.at({Interface::V6, rr, "open.example"}) == Outcome::Accessible);
            const auto v6 = cells.at({Interface::V6, rr, "blocked.example"});
            if (p.v4 == cached_6to4.v4) {
                CHECK(v6 == Outcome::Accessible);
            } else {
                CHECK(v6 == Outcome::Censored);
            }
        }
    }
    bool leaked = false;
    for (const auto& t : res.truth) {
        if (t.task.pair_id.rfind("203.0.113.3|", 0) == 0 && t.task.iface == Interface::V6 && t.task.domain == "blocked.example") {
            CHECK(t.leaked_upstream);
            leaked = true;
        }
    }
    CHECK(leaked);

    // With RD clear the recursing resolver answers from cache and nothing leaks.
    auto no_rd = quick();
    no_rd.rd_flag = false;
    const auto res2 = run_campaign(world, no_rd);
    CHECK(compare_with_truth(res2.verdicts, res2.truth).exact());
    const auto cells = by_cell(res2, recursing_6to4.v4.to_string() + "|" + recursing_6to4.v6.to_string());
    CHECK(cells.at({Interface::V6, RrType::A, "blocked.example"}) == Outcome::Accessible);
}

TEST_CASE("campaigns are deterministic for a seed") {
    const World world(make_preset("china-aaaa", {.seed = 6, .resolvers = 6, .domains = 12}));
    const auto a = run_campaign(world, quick());
    const auto b = run_campaign(world, quick());
    REQUIRE(a.verdicts.size() == b.verdicts.size());
    for (std::size_t i = 0; i < a.verdicts.size(); ++i) CHECK(to_json(a.verdicts[i]) == to_json(b.verdicts[i]));
    CHECK(a.stats.sent == b.stats.sent);
}

TEST_CASE("preset campaigns match ground truth") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const World world(make_preset(name, {.seed = 12, .resolvers = 10, .domains = 20}));
        const auto res = run_campaign(world, quick());
        const auto cmp = compare_with_truth(res.verdicts, res.truth);
        CHECK(cmp.matched == res.truth.size());
        CHECK(cmp.exact());
        for (const auto& e : cmp.examples) MESSAGE(e);
    }
}

TEST_CASE("empty and invalid campaign inputs") {
    auto cfg = small_world({}, false);
    const World empty(cfg);
    const auto res = run_campaign(empty, quick());
    CHECK(res.verdicts.empty());
    CHECK(res.truth.empty());

    const World world(small_world({resolver("203.0.113.1", "2a01::1")}));
    CHECK(run_campaign(world, world.pairs(), {}, quick()).verdicts.empty());
    CHECK_THROWS_AS(run_campaign(world, world.pairs(), {"missing.example"}, quick()), std::invalid_argument);
    auto ghost = world.pairs();
    ghost[0].v4 = Ipv4Address::parse("198.51.100.1");
    CHECK_THROWS_AS(run_campaign(world, ghost, {"open.example"}, quick()), std::invalid_argument);
}

TEST_CASE("TLS oracle and name server log") {
    auto r1 = resolver("203.0.113.1", "2a01::1");
    auto r2 = resolver("203.0.113.2", "2a01::2");
    auto r3 = resolver("203.0.113.3", "2a01::3");
    r2.ns_egress = Ipv6Address::parse("2a01::99");
    r3.ns_egress = Ipv6Address::parse("2a01::99");
    const World world(small_world({r1, r2, r3}));
    const auto* d = world.domain("open.example");
    REQUIRE(d);
    CHECK(world.tls_valid(IpAddress(d->a[0]), "open.example"));
    CHECK_FALSE(world.tls_valid(IpAddress(d->a[0]), "blocked.example"));
    CHECK_FALSE(world.tls_valid(IpAddress::parse("10.10.34.35"), "blocked.example"));

    const auto log = world.ns_log("v6onlyNS.io");
    REQUIRE(log.size() == 3);
    const auto cands = prune_infrastructure(correlate_pairs(log, "v6onlyNS.io"));
    REQUIRE(cands.size() == 1);
    CHECK(cands[0].v4 == r1.v4);
}

TEST_CASE("loopback sockets reproduce the virtual-clock verdicts") {
    const auto native = resolver("203.0.113.1", "2a01::1");
    const auto cached_6to4 = resolver("203.0.113.2", "2002:cb00:7102::1");
    const World world(small_world({native, cached_6to4}));
    auto virt = quick();
    const auto a = run_campaign(world, virt);
    auto loop = quick();
    loop.loopback = true;
    loop.time_scale = 0.2;
    loop.engine.window = std::chrono::milliseconds(400);
    const auto b = run_campaign(world, loop);
    REQUIRE(a.verdicts.size() == b.verdicts.size());
    for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
        CAPTURE(a.verdicts[i].task.domain);
        CHECK(a.verdicts[i].outcome == b.verdicts[i].outcome);
    }
    CHECK(compare_with_truth(b.verdicts, b.truth).exact());
}
