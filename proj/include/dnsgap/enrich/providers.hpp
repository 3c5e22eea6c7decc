#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "dnsgap/core/types.hpp"
#include "dnsgap/enrich/csv_table.hpp"
#include "dnsgap/enrich/mmdb.hpp"

namespace dnsgap {

/// The geolocation dataset specifically could not be opened.
class GeoUnavailable : public DatasetUnreadable {
public:
    explicit GeoUnavailable(const std::string& what) : DatasetUnreadable(what) {}
};

/// An address-keyed dataset backed by either an MMDB file or a `key,value`
/// CSV fixture. The format is detected from the file contents.
class IpDataset {
public:
    static IpDataset open(const std::filesystem::path& path);
    explicit IpDataset(IpCsvTable table) : backend_(std::move(table)) {}
    explicit IpDataset(MmdbReader reader) : backend_(std::move(reader)) {}

    /// MMDB records come back as maps, CSV values as strings.
    std::optional<nlohmann::json> lookup(const IpAddress& ip) const;
    bool is_mmdb() const { return std::holds_alternative<MmdbReader>(backend_); }
    /// SHA-256 of the file, empty for in-memory tables.
    const std::string& checksum() const { return checksum_; }

private:
    std::variant<MmdbReader, IpCsvTable> backend_;
    std::string checksum_;
};

struct AsnInfo {
    std::uint32_t asn = 0;
    std::string name;
    bool operator==(const AsnInfo&) const = default;
};

/// Every lookup returns nullopt for Unknown; nothing is fabricated.
class GeoProvider {
public:
    /// Throws GeoUnavailable when the dataset cannot be opened.
    static GeoProvider open(const std::filesystem::path& path);
    explicit GeoProvider(IpDataset data) : data_(std::move(data)) {}
    /// ISO-3166 alpha-2 country, from `country.iso_code` in MMDB records.
    std::optional<std::string> country(const IpAddress& ip) const;
    const std::string& checksum() const { return data_.checksum(); }

private:
    IpDataset data_;
};

class AsnProvider {
public:
    static AsnProvider open(const std::filesystem::path& path) { return AsnProvider(IpDataset::open(path)); }
    explicit AsnProvider(IpDataset data) : data_(std::move(data)) {}
    /// MMDB: autonomous_system_number/organization. CSV value: "<asn> <name>",
    /// an "AS" prefix on the number is accepted.
    std::optional<AsnInfo> asn(const IpAddress& ip) const;
    const std::string& checksum() const { return data_.checksum(); }

private:
    IpDataset data_;
};

class ConnTypeProvider {
public:
    static ConnTypeProvider open(const std::filesystem::path& path) { return ConnTypeProvider(IpDataset::open(path)); }
    explicit ConnTypeProvider(IpDataset data) : data_(std::move(data)) {}
    std::optional<ConnType> conn_type(const IpAddress& ip) const;
    const std::string& checksum() const { return data_.checksum(); }

private:
    IpDataset data_;
};

/// `domain,category` file; domains compared case-insensitively without a
/// trailing dot.
class CategoryProvider {
public:
    static CategoryProvider open(const std::filesystem::path& path);
    explicit CategoryProvider(std::map<std::string, std::string> categories);
    CategoryProvider() = default;

    std::optional<std::string> category(std::string_view domain) const;
    const std::string& checksum() const { return checksum_; }

private:
    std::map<std::string, std::string> categories_;
    std::string checksum_;
};

}  // namespace dnsgap
