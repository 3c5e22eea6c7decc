#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

/// One `key,value` row. The value may be double-quoted to carry commas.
std::pair<std::string, std::string> split_csv_pair(const std::string& line);

/// `key,value` fixture keyed by an address or CIDR network; lookups return
/// the value of the longest matching network.
class IpCsvTable {
public:
    /// Throws DatasetUnreadable on I/O failure or an unparsable key. A first
    /// row whose key is not an address is taken as a header.
    explicit IpCsvTable(const std::filesystem::path& path);
    IpCsvTable() = default;

    void insert(const IpPrefix& network, std::string value);
    std::optional<std::string> lookup(const IpAddress& ip) const;
    std::size_t size() const { return size_; }

private:
    // Prefix length -> masked network -> value, longest length first.
    std::map<int, std::map<IpAddress, std::string>, std::greater<>> v4_, v6_;
    std::size_t size_ = 0;
};

}  // namespace dnsgap
