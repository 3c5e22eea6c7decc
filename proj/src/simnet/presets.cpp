#include "dnsgap/simnet/presets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "dnsgap/core/util.hpp"

namespace dnsgap::sim {

namespace {

struct AsChoice {
    std::uint32_t asn;
    const char* name;
};

const std::vector<std::string> kCategories = {"News",          "Social Networking", "Gambling",
                                              "Government/Military", "Streaming Media",   "Search Engines",
                                              "Shopping",      "Education"};

std::size_t count_for(double percent, std::size_t total) {
    return static_cast<std::size_t>(std::lround(percent / 100.0 * static_cast<double>(total)));
}

Ipv6Address with_suffix(Ipv6Address base, std::uint32_t suffix) {
    auto b = base.bytes();
    for (int i = 0; i < 4; ++i) b[15 - i] = static_cast<std::uint8_t>(suffix >> (8 * i));
    return Ipv6Address(b);
}

ConnType pick_conn(std::uint64_t h, double cable, double cellular) {
    const double u = unit_from_hash(h);
    if (u < cable) return ConnType(ConnType::Kind::CableDsl);
    if (u < cable + cellular) return ConnType(ConnType::Kind::Cellular);
    return ConnType(ConnType::Kind::Corporate);
}

struct ResolverShape {
    std::string country;
    Ipv4Address v4_base;
    Ipv6Address native_base;
    std::vector<AsChoice> ases;
    std::size_t native;
    std::size_t recurse;
    double cable;
    double cellular;
};

/// Resolvers 0..native-1 get native IPv6, the rest 6to4 addresses derived
/// from their IPv4. Which `recurse` resolvers recurse is a seeded choice,
/// independent of kind.
std::vector<SimResolver> make_resolvers(const ResolverShape& s, std::size_t n, std::uint64_t seed) {
    std::vector<SimResolver> out;
    std::vector<std::pair<std::uint64_t, std::size_t>> ranked;
    for (std::size_t i = 0; i < n; ++i) ranked.emplace_back(hash_combine(hash_combine(seed, "recurse"), i), i);
    std::sort(ranked.begin(), ranked.end());
    std::vector<bool> recurses(n, false);
    for (std::size_t k = 0; k < std::min(s.recurse, n); ++k) recurses[ranked[k].second] = true;

    for (std::size_t i = 0; i < n; ++i) {
        SimResolver r;
        r.v4 = Ipv4Address(s.v4_base.value() + static_cast<std::uint32_t>(256 * i + 53));
        r.v6 = i < s.native ? with_suffix(s.native_base, static_cast<std::uint32_t>(0x10000 + i))
                            : with_suffix(six_to_four_prefix(r.v4), 1);
        r.country = s.country;
        const auto h = hash_combine(seed, r.v4.to_string());
        const auto& as = s.ases[h % s.ases.size()];
        r.asn = as.asn;
        r.as_name = as.name;
        r.conn_type = pick_conn(mix64(h), s.cable, s.cellular);
        r.cache = recurses[i] ? CacheBehavior::AlwaysRecurse : CacheBehavior::AlwaysCached;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

std::vector<SimDomain> synthetic_domains(std::size_t count, std::uint64_t seed) {
    std::vector<SimDomain> out;
    for (std::size_t i = 0; i < count; ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "site-%03zu.example", i);
        SimDomain d;
        d.name = name;
        d.a.push_back(Ipv4Address(93, 184, static_cast<std::uint8_t>(200 + i / 250), static_cast<std::uint8_t>(1 + i % 250)));
        d.aaaa.push_back(with_suffix(Ipv6Address::parse("2606:2800:220:1::"), static_cast<std::uint32_t>(i + 1)));
        d.category = kCategories[hash_combine(seed, d.name) % kCategories.size()];
        out.push_back(std::move(d));
    }
    return out;
}

CellTargets preset_targets(std::string_view name) {
    if (name == "iran") return {25.12, 24.49, 21.95, 21.45};
    if (name == "china-aaaa") return {29.27, 32.32, 28.41, 32.08};
    if (name == "thailand-central") return {8.25, 1.18, 1.13, 0.93};
    throw ConfigInvalid("unknown preset '" + std::string(name) + "'");
}

SimWorldConfig iran_preset(const PresetOptions& o) {
    const auto t = preset_targets("iran");
    const std::size_t n = o.resolvers ? o.resolvers : 50;
    const std::size_t d = o.domains ? o.domains : 40;
    SimWorldConfig c;
    c.seed = o.seed;
    c.domains = synthetic_domains(d, o.seed);

    // The IPv6 shortfall comes from 6to4 resolvers answering from cache.
    const double v4 = (t[0] + t[1]) / 2, v6 = (t[2] + t[3]) / 2;
    const std::size_t cached = count_for(100.0 * (1.0 - v6 / v4), n);
    ResolverShape shape{"IR",
                        Ipv4Address(5, 160, 0, 0),
                        Ipv6Address::parse("2a01:5ec0::"),
                        {{58224, "Iran Telecommunication Company PJS"},
                         {44244, "Iran Cell Service and Communication Company"},
                         {197207, "Mobile Communication Company of Iran PLC"},
                         {16322, "Pars Online PJS"},
                         {208161, "PARSVDS"}},
                        std::min<std::size_t>(n, 2),
                        n - std::min(cached, n),
                        0.7,
                        0.2};
    c.resolvers = make_resolvers(shape, n, o.seed);

    CensorPolicy p;
    p.name = "iran";
    p.scope.country = "IR";
    p.v6_capable = true;
    p.parses_6to4 = false;
    p.requires_rd = true;
    p.drops_original = true;
    p.answer_type_independent = true;
    const std::size_t blocked = std::max<std::size_t>(1, count_for(v4, d));
    for (std::size_t i = 0; i < blocked && i < d; ++i) {
        const auto& name = c.domains[(i * d) / blocked].name;
        p.blocked.push_back({name, RrClass::Any, CensorAction::inject(IpAddress(Ipv4Address(10, 10, 34, 35))),
                             CensorAction::inject(IpAddress(Ipv6Address::parse("d0::11")))});
    }
    c.policies.push_back(std::move(p));
    return c;
}

SimWorldConfig china_aaaa_preset(const PresetOptions& o) {
    const auto t = preset_targets("china-aaaa");
    const std::size_t n = o.resolvers ? o.resolvers : 30;
    const std::size_t d = o.domains ? o.domains : 100;
    SimWorldConfig c;
    c.seed = o.seed;
    c.domains = synthetic_domains(d, o.seed);
    ResolverShape shape{"CN",
                        Ipv4Address(36, 110, 0, 0),
                        Ipv6Address::parse("240e:100::"),
                        {{4134, "Chinanet"}, {4837, "China Unicom Backbone"}, {9808, "China Mobile"},
                         {4538, "China Education and Research Network"}},
                        n - n / 4,
                        n / 2,
                        0.6,
                        0.17};
    c.resolvers = make_resolvers(shape, n, o.seed);

    static const char* kForgedV4[] = {"31.13.66.23", "69.171.248.65", "159.106.121.75", "46.82.174.68",
                                      "93.46.8.89"};
    CensorPolicy p;
    p.name = "china-aaaa";
    p.scope.country = "CN";
    p.v6_capable = true;
    p.parses_6to4 = true;
    p.requires_rd = false;
    p.drops_original = true;
    const std::size_t common = std::min(d, count_for((t[0] + t[2]) / 2, d));
    const std::size_t aaaa_only = std::min(d - common, count_for(21.0, d));
    for (std::size_t i = 0; i < common + aaaa_only; ++i) {
        const auto& name = c.domains[i].name;
        const auto h = hash_combine(o.seed, name);
        const auto teredo = with_suffix(Ipv6Address::parse("2001::"), static_cast<std::uint32_t>(h & 0xFFFFFF) | 1);
        p.blocked.push_back({name, RrClass::AAAA, CensorAction::inject(IpAddress(teredo)), std::nullopt});
        if (i < common) {
            const auto v4 = Ipv4Address::parse(kForgedV4[h % std::size(kForgedV4)]);
            p.blocked.push_back({name, RrClass::A, CensorAction::inject(IpAddress(v4)), std::nullopt});
        }
    }
    c.policies.push_back(std::move(p));
    return c;
}

SimWorldConfig thailand_central_preset(const PresetOptions& o) {
    const auto t = preset_targets("thailand-central");
    const std::size_t n = o.resolvers ? o.resolvers : 50;
    const std::size_t d = o.domains ? o.domains : 100;
    SimWorldConfig c;
    c.seed = o.seed;
    c.domains = synthetic_domains(d, o.seed);
    // 112 of the 186 measured resolvers sit behind 6to4.
    ResolverShape shape{"TH",
                        Ipv4Address(171, 96, 0, 0),
                        Ipv6Address::parse("2405:9800::"),
                        {{9835, "Government IT Services"}, {17552, "True Internet"}, {45758, "Triple T Broadband"},
                         {23969, "TOT Public Company"}, {131445, "Advanced Wireless Network"}},
                        n - count_for(100.0 * 112 / 186, n),
                        count_for(100.0 * t[2] / t[0], n),
                        0.74,
                        0.13};
    c.resolvers = make_resolvers(shape, n, o.seed);

    const IpAddress page_v4(Ipv4Address(180, 180, 255, 130));
    const IpAddress page_v6(Ipv6Address::parse("2405:9800:ff::130"));
    CensorPolicy p;
    p.name = "thailand-central";
    p.scope.country = "TH";
    p.v6_capable = false;
    p.parses_6to4 = false;
    p.requires_rd = false;
    p.drops_original = true;
    const std::size_t a_list = std::max<std::size_t>(1, std::min(d, count_for(t[0], d)));
    const std::size_t aaaa_list = std::max<std::size_t>(1, std::min(a_list, count_for(t[1], d)));
    for (std::size_t i = 0; i < a_list; ++i) {
        const auto& name = c.domains[(i * d) / a_list].name;
        p.blocked.push_back({name, RrClass::A, CensorAction::inject(page_v4), std::nullopt});
        if (i < aaaa_list) p.blocked.push_back({name, RrClass::AAAA, CensorAction::inject(page_v6), std::nullopt});
    }
    c.policies.push_back(std::move(p));
    c.fingerprints.push_back({"th-blockpage", IpPrefix::parse("180.180.255.130/32"), std::nullopt});
    c.fingerprints.push_back({"th-blockpage", IpPrefix::parse("2405:9800:ff::130/128"), std::nullopt});
    return c;
}

SimWorldConfig make_preset(std::string_view name, const PresetOptions& options) {
    if (name == "iran") return iran_preset(options);
    if (name == "china-aaaa") return china_aaaa_preset(options);
    if (name == "thailand-central") return thailand_central_preset(options);
    throw ConfigInvalid("unknown preset '" + std::string(name) + "' (iran|china-aaaa|thailand-central)");
}

std::vector<std::string> preset_names() { return {"iran", "china-aaaa", "thailand-central"}; }

}  // namespace dnsgap::sim
