#include "dnsgap/report/manifest.hpp"

#include <fstream>

#include "dnsgap/core/records.hpp"
#include "dnsgap/core/util.hpp"

namespace dnsgap {

RunManifest::RunManifest(std::string stage_name) : stage(std::move(stage_name)) {
    versions["dnsgap"] = kToolVersion;
    if (!stage.empty()) versions[stage] = "1";
}

void RunManifest::add_input(const std::string& role, const std::filesystem::path& path) {
    inputs[role] = sha256_file(path);
}

void RunManifest::add_dataset(const std::string& role, const std::string& checksum) { datasets[role] = checksum; }

nlohmann::json RunManifest::to_json() const {
    return {{"stage", stage},          {"versions", versions},       {"inputs", inputs},
            {"datasets", datasets},    {"tunables", tunables},       {"started_at", started_at},
            {"finished_at", finished_at}, {"checksum", checksum()}};
}

std::string RunManifest::checksum() const {
    // nlohmann::json objects keep keys sorted, so dump() is canonical.
    const nlohmann::json body = {
        {"stage", stage}, {"versions", versions}, {"inputs", inputs}, {"datasets", datasets}, {"tunables", tunables}};
    return sha256_hex(body.dump());
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.stage = j.value("stage", "");
        m.versions = j.value("versions", std::map<std::string, std::string>{});
        m.inputs = j.value("inputs", std::map<std::string, std::string>{});
        m.datasets = j.value("datasets", std::map<std::string, std::string>{});
        m.tunables = j.value("tunables", nlohmann::json::object());
        m.started_at = j.value("started_at", "");
        m.finished_at = j.value("finished_at", "");
    } catch (const nlohmann::json::exception& e) {
        throw RecordFormatError(std::string("manifest: ") + e.what());
    }
    return m;
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RecordFormatError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw RecordFormatError(path.string() + ": " + e.what());
    }
    return from_json(j);
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path.string());
    out << to_json().dump(2) << '\n';
}

}  // namespace dnsgap
