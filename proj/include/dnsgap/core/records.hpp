#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dnsgap/core/types.hpp"

namespace dnsgap {

using json = nlohmann::json;

class RecordFormatError : public std::runtime_error {
public:
    explicit RecordFormatError(const std::string& what) : std::runtime_error(what) {}
};

json to_json(const ResolverPair& p);
ResolverPair resolver_pair_from_json(const json& j);

json to_json(const VettedDomain& d);
VettedDomain vetted_domain_from_json(const json& j);
std::vector<VettedDomain> read_vetted(const std::filesystem::path& path);

json to_json(const ProbeTask& t);
ProbeTask probe_task_from_json(const json& j);

json to_json(const ProbeResult& r);
ProbeResult probe_result_from_json(const json& j);

/// Line-delimited JSON output. When a manifest checksum is given the first
/// line is `{"_manifest":"<sha256>"}`; readers skip it.
class JsonlWriter {
public:
    explicit JsonlWriter(const std::filesystem::path& path, std::optional<std::string> manifest_checksum = {});
    void write(const json& record);
    void flush() { out_.flush(); }

private:
    std::ofstream out_;
};

/// Calls `fn` for every record line; the manifest header is passed to
/// `on_manifest` when present. Throws RecordFormatError with the line number.
void read_jsonl(const std::filesystem::path& path, const std::function<void(const json&)>& fn,
                const std::function<void(const std::string&)>& on_manifest = {});

std::vector<ResolverPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, const std::vector<ResolverPair>& pairs,
                 std::optional<std::string> manifest_checksum = {});

}  // namespace dnsgap
