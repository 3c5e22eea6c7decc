#include "dnsgap/core/label_codec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace dnsgap {

std::string normalize_name(std::string_view name) {
    if (!name.empty() && name.back() == '.') name.remove_suffix(1);
    std::string out(name);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool name_in_zone(std::string_view name, std::string_view zone) {
    const std::string n = normalize_name(name);
    const std::string z = normalize_name(zone);
    if (n == z) return true;
    return n.size() > z.size() && n.compare(n.size() - z.size(), z.size(), z) == 0 &&
           n[n.size() - z.size() - 1] == '.';
}

bool is_valid_domain_name(std::string_view name) {
    if (!name.empty() && name.back() == '.') name.remove_suffix(1);
    if (name.empty() || name.size() > 253) return false;
    std::size_t start = 0;
    while (start <= name.size()) {
        auto dot = name.find('.', start);
        if (dot == std::string_view::npos) dot = name.size();
        const auto len = dot - start;
        if (len == 0 || len > 63) return false;
        start = dot + 1;
    }
    return true;
}

std::string encode_probe_label(Ipv4Address v4, std::string_view zone) {
    std::string label;
    for (int i = 0; i < 4; ++i) {
        if (i) label.push_back('-');
        label += std::to_string(v4.octet(i));
    }
    std::string fqdn = label + "." + std::string(zone);
    if (!is_valid_domain_name(fqdn)) {
        throw std::invalid_argument("zone too long for probe label: " + std::string(zone));
    }
    return fqdn;
}

Ipv4Address decode_probe_label(std::string_view fqdn, std::string_view zone) {
    const std::string n = normalize_name(fqdn);
    const std::string z = normalize_name(zone);
    if (!name_in_zone(n, z) || n.size() == z.size()) {
        throw MalformedLabel("name '" + std::string(fqdn) + "' is not below zone '" + std::string(zone) + "'");
    }
    const std::string_view label(n.data(), n.size() - z.size() - 1);
    if (label.find('.') != std::string_view::npos) {
        throw MalformedLabel("unexpected extra labels in '" + std::string(fqdn) + "'");
    }
    std::uint32_t value = 0;
    const char* p = label.data();
    const char* end = label.data() + label.size();
    for (int i = 0; i < 4; ++i) {
        if (p == end || *p < '0' || *p > '9') throw MalformedLabel("non-numeric probe label '" + std::string(label) + "'");
        unsigned octet = 0;
        auto [next, ec] = std::from_chars(p, end, octet);
        if (ec != std::errc{} || octet > 255 || next - p > 3) {
            throw MalformedLabel("octet out of range in '" + std::string(label) + "'");
        }
        value = (value << 8) | octet;
        p = next;
        if (i < 3) {
            if (p == end || *p != '-') throw MalformedLabel("expected '-' in '" + std::string(label) + "'");
            ++p;
        }
    }
    if (p != end) throw MalformedLabel("trailing data in '" + std::string(label) + "'");
    return Ipv4Address(value);
}

}  // namespace dnsgap
