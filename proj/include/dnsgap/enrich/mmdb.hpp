#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

/// A dataset file that cannot be opened or is not in a recognized format.
class DatasetUnreadable : public std::runtime_error {
public:
    explicit DatasetUnreadable(const std::string& what) : std::runtime_error(what) {}
};

/// Reader for the MaxMind DB binary format (version 2.x): binary search
/// tree with 24, 28 or 32-bit records, followed by the typed data section
/// and the metadata map. Decoded values are returned as JSON.
class MmdbReader {
public:
    /// Loads the whole file; throws DatasetUnreadable on I/O or format error.
    explicit MmdbReader(const std::filesystem::path& path);
    explicit MmdbReader(std::vector<std::uint8_t> bytes);

    /// Record for the most specific network containing `ip`, or nullopt.
    /// IPv4 addresses in an IPv6 tree are looked up under ::/96.
    std::optional<nlohmann::json> lookup(const IpAddress& ip) const;

    const nlohmann::json& metadata() const { return metadata_; }
    std::string database_type() const { return metadata_.value("database_type", ""); }

private:
    void init();
    std::uint32_t read_record(std::uint32_t node, int bit) const;
    nlohmann::json decode_at(std::size_t offset) const;

    std::vector<std::uint8_t> bytes_;
    nlohmann::json metadata_;
    std::uint32_t node_count_ = 0;
    int record_size_ = 0;
    int ip_version_ = 6;
    std::size_t tree_size_ = 0;
    std::uint32_t ipv4_start_ = 0;
};

/// Builds MMDB files. Used for fixtures and tests; values are JSON objects
/// encoded with the narrowest fitting MMDB type. Networks inserted later
/// replace overlapping earlier ones.
class MmdbWriter {
public:
    MmdbWriter(std::string database_type, int record_size = 28, std::uint64_t build_epoch = 0);

    void insert(const IpPrefix& network, const nlohmann::json& value);
    std::vector<std::uint8_t> serialize() const;
    void write(const std::filesystem::path& path) const;

private:
    struct Node {
        // Child encoding: -1 empty, >= 0 node index, <= -2 data index (-2 - i).
        std::int64_t child[2] = {-1, -1};
    };

    std::string database_type_;
    int record_size_;
    std::uint64_t build_epoch_;
    std::vector<Node> nodes_;
    std::vector<nlohmann::json> values_;
};

/// Low-level data-section codec, exposed for tests.
namespace mmdb {
std::vector<std::uint8_t> encode_value(const nlohmann::json& value);
/// Decodes the value at `offset` in `data`; pointers resolve against `data`.
nlohmann::json decode_value(std::span<const std::uint8_t> data, std::size_t offset);
}  // namespace mmdb

}  // namespace dnsgap
