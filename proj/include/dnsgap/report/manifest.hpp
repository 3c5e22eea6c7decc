#pragma once

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

namespace dnsgap {

inline constexpr const char* kToolVersion = "0.3.0";

/// Provenance of one pipeline stage run: stage versions, input and dataset
/// checksums, every tunable, and wall-clock timestamps. The checksum covers
/// everything except the timestamps, so re-running with the same inputs
/// and settings reproduces it.
struct RunManifest {
    std::string stage;
    std::map<std::string, std::string> versions;
    /// Input role (the flag that named it) -> SHA-256. Paths are left out so
    /// the same inputs in another directory give the same checksum.
    std::map<std::string, std::string> inputs;
    /// Dataset role (geo, asn, conn, category, trust) -> SHA-256.
    std::map<std::string, std::string> datasets;
    nlohmann::json tunables = nlohmann::json::object();
    std::string started_at;
    std::string finished_at;

    explicit RunManifest(std::string stage_name = {});

    void add_input(const std::string& role, const std::filesystem::path& path);
    void add_dataset(const std::string& role, const std::string& checksum);

    /// SHA-256 of the canonical JSON form without timestamps.
    std::string checksum() const;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
    static RunManifest read(const std::filesystem::path& path);
    void write(const std::filesystem::path& path) const;
};

}  // namespace dnsgap
