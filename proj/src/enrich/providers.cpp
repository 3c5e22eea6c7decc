#include "dnsgap/enrich/providers.hpp"

#include <charconv>
#include <fstream>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/util.hpp"

namespace dnsgap {

namespace {

bool looks_like_mmdb(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DatasetUnreadable("cannot open " + path.string());
    // The metadata marker sits in the last 128 KiB of every MMDB file.
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::streamoff>(in.tellg());
    const std::streamoff tail = std::min<std::streamoff>(size, 128 * 1024);
    in.seekg(size - tail);
    std::string buf(static_cast<std::size_t>(tail), '\0');
    in.read(buf.data(), tail);
    return buf.find("\xAB\xCD\xEFMaxMind.com") != std::string::npos;
}

const nlohmann::json* find_path(const nlohmann::json& j, std::initializer_list<const char*> keys) {
    const nlohmann::json* cur = &j;
    for (const char* k : keys) {
        if (!cur->is_object()) return nullptr;
        auto it = cur->find(k);
        if (it == cur->end()) return nullptr;
        cur = &*it;
    }
    return cur;
}

}  // namespace

IpDataset IpDataset::open(const std::filesystem::path& path) {
    IpDataset ds = looks_like_mmdb(path) ? IpDataset(MmdbReader(path)) : IpDataset(IpCsvTable(path));
    ds.checksum_ = sha256_file(path);
    return ds;
}

std::optional<nlohmann::json> IpDataset::lookup(const IpAddress& ip) const {
    if (const auto* m = std::get_if<MmdbReader>(&backend_)) return m->lookup(ip);
    if (auto v = std::get<IpCsvTable>(backend_).lookup(ip)) return nlohmann::json(*v);
    return std::nullopt;
}

GeoProvider GeoProvider::open(const std::filesystem::path& path) {
    try {
        return GeoProvider(IpDataset::open(path));
    } catch (const DatasetUnreadable& e) {
        throw GeoUnavailable(e.what());
    } catch (const std::exception& e) {
        throw GeoUnavailable(path.string() + ": " + e.what());
    }
}

std::optional<std::string> GeoProvider::country(const IpAddress& ip) const {
    auto rec = data_.lookup(ip);
    if (!rec) return std::nullopt;
    if (rec->is_string()) {
        const auto& s = rec->get_ref<const std::string&>();
        if (s.empty()) return std::nullopt;
        return s;
    }
    for (auto path : {std::initializer_list<const char*>{"country", "iso_code"},
                      std::initializer_list<const char*>{"registered_country", "iso_code"}}) {
        if (const auto* v = find_path(*rec, path); v && v->is_string()) return v->get<std::string>();
    }
    return std::nullopt;
}

std::optional<AsnInfo> AsnProvider::asn(const IpAddress& ip) const {
    auto rec = data_.lookup(ip);
    if (!rec) return std::nullopt;
    AsnInfo info;
    if (rec->is_string()) {
        std::string_view s = trim(rec->get_ref<const std::string&>());
        if (s.size() > 2 && (s[0] == 'A' || s[0] == 'a') && (s[1] == 'S' || s[1] == 's')) s.remove_prefix(2);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), info.asn);
        if (ec != std::errc{} || ptr == s.data()) return std::nullopt;
        info.name = std::string(trim(std::string_view(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr))));
        return info;
    }
    const auto* num = find_path(*rec, {"autonomous_system_number"});
    if (!num || !num->is_number_unsigned()) return std::nullopt;
    info.asn = num->get<std::uint32_t>();
    if (const auto* org = find_path(*rec, {"autonomous_system_organization"}); org && org->is_string()) {
        info.name = org->get<std::string>();
    }
    return info;
}

std::optional<ConnType> ConnTypeProvider::conn_type(const IpAddress& ip) const {
    auto rec = data_.lookup(ip);
    if (!rec) return std::nullopt;
    const nlohmann::json* label = rec->is_string() ? &*rec : find_path(*rec, {"connection_type"});
    if (!label || !label->is_string() || label->get_ref<const std::string&>().empty()) return std::nullopt;
    return ConnType::from_label(label->get<std::string>());
}

CategoryProvider::CategoryProvider(std::map<std::string, std::string> categories) {
    for (auto& [k, v] : categories) categories_[normalize_name(k)] = std::move(v);
}

CategoryProvider CategoryProvider::open(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    try {
        lines = read_lines(path);
    } catch (const std::exception& e) {
        throw DatasetUnreadable(e.what());
    }
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::pair<std::string, std::string> kv;
        try {
            kv = split_csv_pair(lines[i]);
        } catch (const std::invalid_argument& e) {
            throw DatasetUnreadable(path.string() + ": " + e.what());
        }
        if (i == 0 && kv.first == "domain") continue;
        m[kv.first] = kv.second;
    }
    CategoryProvider p(std::move(m));
    p.checksum_ = sha256_file(path);
    return p;
}

std::optional<std::string> CategoryProvider::category(std::string_view domain) const {
    if (auto it = categories_.find(normalize_name(domain)); it != categories_.end() && !it->second.empty()) {
        return it->second;
    }
    return std::nullopt;
}

}  // namespace dnsgap
