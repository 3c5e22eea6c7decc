#pragma once

#include <array>
#include <string>
#include <vector>

#include "dnsgap/simnet/config.hpp"

namespace dnsgap::sim {

struct PresetOptions {
    std::uint64_t seed = 1;
    /// 0 keeps the preset's default size.
    std::size_t resolvers = 0;
    std::size_t domains = 0;
};

/// Measured per-cell censorship rates (percent) the preset is sized from,
/// in cell order v4/A, v4/AAAA, v6/A, v6/AAAA.
using CellTargets = std::array<double, 4>;

/// Iran: one centralized injector answering every blocked name with A
/// 10.10.34.35 over IPv4 and AAAA d0::11 over native IPv6, whatever the
/// question type; blind to 6to4, acts only on RD=1. Mostly 6to4 resolvers,
/// most of which recurse over IPv4 and so relay the IPv4 injection.
/// Default 50 resolvers x 40 domains.
SimWorldConfig iran_preset(const PresetOptions& options = {});

/// China: a shared block list censored on both record types plus 21 per 100
/// domains blocked only for AAAA, answered with addresses in the Teredo
/// prefix. Parses 6to4. Default 30 resolvers x 100 domains.
SimWorldConfig china_aaaa_preset(const PresetOptions& options = {});

/// Thailand: centralized IPv4-only censor with a long A list and a short
/// AAAA list answered with a block page; IPv6 sees censorship only through
/// resolvers that recurse over IPv4. Default 50 resolvers x 100 domains.
SimWorldConfig thailand_central_preset(const PresetOptions& options = {});

/// "iran", "china-aaaa" or "thailand-central"; throws ConfigInvalid otherwise.
SimWorldConfig make_preset(std::string_view name, const PresetOptions& options = {});
std::vector<std::string> preset_names();
CellTargets preset_targets(std::string_view name);

/// `count` domains named site-NNN.example with one A and one AAAA address
/// each and a category drawn from a fixed list.
std::vector<SimDomain> synthetic_domains(std::size_t count, std::uint64_t seed);

}  // namespace dnsgap::sim
