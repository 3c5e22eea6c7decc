#include "dnsgap/verdict/fingerprint.hpp"

#include <stdexcept>

#include "dnsgap/core/util.hpp"

namespace dnsgap {

std::string_view to_string(FingerprintName n) {
    switch (n) {
        case FingerprintName::IranV4: return "IranV4";
        case FingerprintName::IranV6: return "IranV6";
        case FingerprintName::GfwTeredo: return "GfwTeredo";
        case FingerprintName::Custom: return "Custom";
    }
    return "Custom";
}

const Ipv6Address& iran_injected_v6() {
    static const Ipv6Address addr = Ipv6Address::parse("d0::11");
    return addr;
}

std::optional<InjectorFingerprint> fingerprint_injector(const std::set<IpAddress>& ips, RrType rrtype,
                                                        const std::vector<FingerprintRule>& custom) {
    auto make = [](FingerprintName n, const IpAddress& ip, std::string label = {}) {
        if (label.empty()) label = std::string(to_string(n));
        return InjectorFingerprint{n, std::move(label), ip};
    };
    // std::set is ordered, so each scan below returns the smallest match.
    for (const auto& ip : ips) {
        if (ip.is_v4() && ip.v4() == kIranInjectedV4) return make(FingerprintName::IranV4, ip);
    }
    for (const auto& ip : ips) {
        if (ip.is_v6() && ip.v6() == iran_injected_v6()) return make(FingerprintName::IranV6, ip);
    }
    static const IpPrefix teredo = IpPrefix::parse("2001::/32");
    for (const auto& ip : ips) {
        if (teredo.contains(ip)) return make(FingerprintName::GfwTeredo, ip);
    }
    for (const auto& rule : custom) {
        if (rule.rrtype && *rule.rrtype != rrtype) continue;
        for (const auto& ip : ips) {
            if (rule.prefix.contains(ip)) return make(FingerprintName::Custom, ip, rule.label);
        }
    }
    return std::nullopt;
}

std::vector<FingerprintRule> load_fingerprint_rules(const std::filesystem::path& path) {
    std::vector<FingerprintRule> rules;
    for (const auto& line : read_lines(path)) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            parts.emplace_back(trim(std::string_view(line).substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (parts.size() < 2 || parts.size() > 3 || parts[0].empty()) {
            throw std::invalid_argument("bad fingerprint rule: " + line);
        }
        FingerprintRule r{parts[0], IpPrefix::parse(parts[1]), std::nullopt};
        if (parts.size() == 3) r.rrtype = parse_rrtype(parts[2]);
        rules.push_back(std::move(r));
    }
    return rules;
}

}  // namespace dnsgap
