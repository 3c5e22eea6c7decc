#include "dnsgap/enrich/csv_table.hpp"

#include <algorithm>

#include "dnsgap/core/util.hpp"
#include "dnsgap/enrich/mmdb.hpp"

namespace dnsgap {

namespace {

IpAddress mask(const IpAddress& ip, int length) {
    if (ip.is_v4()) {
        const std::uint32_t m = length == 0 ? 0 : ~std::uint32_t{0} << (32 - length);
        return Ipv4Address(ip.v4().value() & m);
    }
    auto b = ip.v6().bytes();
    for (int i = 0; i < 16; ++i) {
        const int keep = std::clamp(length - 8 * i, 0, 8);
        b[static_cast<std::size_t>(i)] &= static_cast<std::uint8_t>(keep == 0 ? 0 : 0xFF << (8 - keep));
    }
    return Ipv6Address(b);
}

}  // namespace

std::pair<std::string, std::string> split_csv_pair(const std::string& line) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("expected key,value: " + line);
    std::string key(trim(std::string_view(line).substr(0, comma)));
    std::string value(trim(std::string_view(line).substr(comma + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        std::string unq;
        for (std::size_t i = 1; i + 1 < value.size(); ++i) {
            if (value[i] == '"' && i + 2 < value.size() && value[i + 1] == '"') ++i;
            unq.push_back(value[i]);
        }
        value = std::move(unq);
    }
    return {std::move(key), std::move(value)};
}

IpCsvTable::IpCsvTable(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    try {
        lines = read_lines(path);
    } catch (const std::exception& e) {
        throw DatasetUnreadable(e.what());
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            auto [key, value] = split_csv_pair(lines[i]);
            insert(IpPrefix::parse(key), std::move(value));
        } catch (const std::invalid_argument& e) {
            if (i == 0) continue;
            throw DatasetUnreadable(path.string() + ": " + e.what());
        }
    }
}

void IpCsvTable::insert(const IpPrefix& network, std::string value) {
    auto& by_len = network.network.is_v4() ? v4_ : v6_;
    by_len[network.length][mask(network.network, network.length)] = std::move(value);
    ++size_;
}

std::optional<std::string> IpCsvTable::lookup(const IpAddress& ip) const {
    const auto& by_len = ip.is_v4() ? v4_ : v6_;
    for (const auto& [len, entries] : by_len) {
        if (auto it = entries.find(mask(ip, len)); it != entries.end()) return it->second;
    }
    return std::nullopt;
}

}  // namespace dnsgap
