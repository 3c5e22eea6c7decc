#include "dnsgap/core/records.hpp"

#include <cmath>

#include "dnsgap/core/util.hpp"

namespace dnsgap {

namespace {

template <typename T>
T field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw RecordFormatError(std::string("missing field '") + key + "'");
    try {
        return it->get<T>();
    } catch (const json::exception& e) {
        throw RecordFormatError(std::string("bad field '") + key + "': " + e.what());
    }
}

double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

}  // namespace

json to_json(const ResolverPair& p) {
    return json{{"v4", p.v4.to_string()},
                {"v6", p.v6.to_string()},
                {"v6_kind", std::string(v6_kind_name(p.v6_kind))},
                {"country", p.country},
                {"asn", p.asn},
                {"as_name", p.as_name},
                {"conn_type", p.conn_type.label()}};
}

ResolverPair resolver_pair_from_json(const json& j) {
    ResolverPair p;
    try {
        p.v4 = Ipv4Address::parse(field<std::string>(j, "v4"));
        p.v6 = Ipv6Address::parse(field<std::string>(j, "v6"));
    } catch (const AddressParseError& e) {
        throw RecordFormatError(e.what());
    }
    // The kind is a function of the address; the stored label must agree.
    p.v6_kind = classify_v6_kind(p.v6);
    const auto kind = field<std::string>(j, "v6_kind");
    if (kind != v6_kind_name(p.v6_kind)) {
        throw RecordFormatError("v6_kind '" + kind + "' disagrees with address " + p.v6.to_string());
    }
    p.country = field<std::string>(j, "country");
    p.asn = field<std::uint32_t>(j, "asn");
    p.as_name = field<std::string>(j, "as_name");
    p.conn_type = ConnType::from_label(field<std::string>(j, "conn_type"));
    return p;
}

json to_json(const VettedDomain& d) {
    json a = json::array(), aaaa = json::array();
    for (const auto& ip : d.a_ips) a.push_back(ip.to_string());
    for (const auto& ip : d.aaaa_ips) aaaa.push_back(ip.to_string());
    json j{{"name", d.name}, {"a_ips", a}, {"aaaa_ips", aaaa}, {"vetted_at", d.vetted_at}};
    j["category"] = d.category ? json(*d.category) : json(nullptr);
    return j;
}

VettedDomain vetted_domain_from_json(const json& j) {
    VettedDomain d;
    d.name = field<std::string>(j, "name");
    try {
        for (const auto& s : field<json>(j, "a_ips")) d.a_ips.push_back(Ipv4Address::parse(s.get<std::string>()));
        for (const auto& s : field<json>(j, "aaaa_ips")) d.aaaa_ips.push_back(Ipv6Address::parse(s.get<std::string>()));
    } catch (const AddressParseError& e) {
        throw RecordFormatError(e.what());
    }
    if (d.a_ips.empty() || d.aaaa_ips.empty()) throw RecordFormatError("vetted domain " + d.name + " lacks A or AAAA addresses");
    d.vetted_at = j.value("vetted_at", "");
    if (j.contains("category") && j["category"].is_string()) d.category = j["category"].get<std::string>();
    return d;
}

std::vector<VettedDomain> read_vetted(const std::filesystem::path& path) {
    std::vector<VettedDomain> out;
    read_jsonl(path, [&](const json& j) { out.push_back(vetted_domain_from_json(j)); });
    return out;
}

json to_json(const ProbeTask& t) {
    return json{{"seq", t.seq},
                {"pair_id", t.pair_id},
                {"interface", std::string(to_string(t.iface))},
                {"rrtype", std::string(to_string(t.rrtype))},
                {"domain", t.domain},
                {"rd", t.rd_flag},
                {"txid", t.txid},
                {"server", t.server.to_string()}};
}

ProbeTask probe_task_from_json(const json& j) {
    ProbeTask t;
    try {
        t.seq = field<std::uint64_t>(j, "seq");
        t.pair_id = field<std::string>(j, "pair_id");
        t.iface = parse_interface(field<std::string>(j, "interface"));
        t.rrtype = parse_rrtype(field<std::string>(j, "rrtype"));
        t.domain = field<std::string>(j, "domain");
        t.rd_flag = field<bool>(j, "rd");
        t.txid = field<std::uint16_t>(j, "txid");
        t.server = IpAddress::parse(field<std::string>(j, "server"));
    } catch (const std::invalid_argument& e) {
        throw RecordFormatError(e.what());
    }
    return t;
}

json to_json(const ProbeResult& r) {
    json j = to_json(r.task);
    j["status"] = std::string(to_string(r.status));
    if (!r.error.empty()) j["error"] = r.error;
    json responses = json::array();
    for (const auto& resp : r.responses) {
        json answers = json::array();
        for (const auto& a : resp.answers) {
            json aj{{"name", a.name}, {"type", a.type}, {"class", a.rrclass}, {"ttl", a.ttl}, {"rdata", to_hex(a.rdata)}};
            if (a.type == 1 && a.rdata.size() == 4) {
                aj["value"] = Ipv4Address(a.rdata[0], a.rdata[1], a.rdata[2], a.rdata[3]).to_string();
            } else if (a.type == 28 && a.rdata.size() == 16) {
                Ipv6Address::Bytes b{};
                std::copy(a.rdata.begin(), a.rdata.end(), b.begin());
                aj["value"] = Ipv6Address(b).to_string();
            }
            answers.push_back(std::move(aj));
        }
        responses.push_back(json{{"src", resp.source.to_string()},
                                 {"offset_ms", round_ms(resp.offset_ms)},
                                 {"rcode", resp.rcode},
                                 {"answers", std::move(answers)},
                                 {"raw", to_hex(resp.raw)}});
    }
    j["responses"] = std::move(responses);
    json anomalies = json::array();
    for (const auto& a : r.anomalies) {
        anomalies.push_back(json{{"src", a.source.to_string()},
                                 {"offset_ms", round_ms(a.offset_ms)},
                                 {"reason", a.reason},
                                 {"raw", to_hex(a.raw)}});
    }
    j["anomalies"] = std::move(anomalies);
    return j;
}

ProbeResult probe_result_from_json(const json& j) {
    ProbeResult r;
    r.task = probe_task_from_json(j);
    try {
        r.status = parse_probe_status(field<std::string>(j, "status"));
        if (j.contains("error")) r.error = j["error"].get<std::string>();
        for (const auto& rj : field<json>(j, "responses")) {
            ProbeResponse resp;
            resp.source = IpAddress::parse(field<std::string>(rj, "src"));
            resp.offset_ms = field<double>(rj, "offset_ms");
            resp.rcode = field<std::uint8_t>(rj, "rcode");
            resp.raw = from_hex(field<std::string>(rj, "raw"));
            for (const auto& aj : field<json>(rj, "answers")) {
                AnswerRecord a;
                a.name = field<std::string>(aj, "name");
                a.type = field<std::uint16_t>(aj, "type");
                a.rrclass = field<std::uint16_t>(aj, "class");
                a.ttl = field<std::uint32_t>(aj, "ttl");
                a.rdata = from_hex(field<std::string>(aj, "rdata"));
                resp.answers.push_back(std::move(a));
            }
            r.responses.push_back(std::move(resp));
        }
        if (j.contains("anomalies")) {
            for (const auto& aj : j["anomalies"]) {
                ProbeAnomaly a;
                a.source = IpAddress::parse(field<std::string>(aj, "src"));
                a.offset_ms = field<double>(aj, "offset_ms");
                a.reason = field<std::string>(aj, "reason");
                a.raw = from_hex(field<std::string>(aj, "raw"));
                r.anomalies.push_back(std::move(a));
            }
        }
    } catch (const std::invalid_argument& e) {
        throw RecordFormatError(e.what());
    }
    return r;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path, std::optional<std::string> manifest_checksum)
    : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    if (manifest_checksum) out_ << json{{"_manifest", *manifest_checksum}}.dump() << '\n';
}

void JsonlWriter::write(const json& record) { out_ << record.dump() << '\n'; }

void read_jsonl(const std::filesystem::path& path, const std::function<void(const json&)>& fn,
                const std::function<void(const std::string&)>& on_manifest) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw RecordFormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
        if (j.is_object() && j.size() == 1 && j.contains("_manifest")) {
            if (on_manifest) on_manifest(j["_manifest"].get<std::string>());
            continue;
        }
        try {
            fn(j);
        } catch (const RecordFormatError& e) {
            throw RecordFormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::vector<ResolverPair> read_pairs(const std::filesystem::path& path) {
    std::vector<ResolverPair> pairs;
    read_jsonl(path, [&](const json& j) { pairs.push_back(resolver_pair_from_json(j)); });
    return pairs;
}

void write_pairs(const std::filesystem::path& path, const std::vector<ResolverPair>& pairs,
                 std::optional<std::string> manifest_checksum) {
    JsonlWriter w(path, std::move(manifest_checksum));
    for (const auto& p : pairs) w.write(to_json(p));
}

}  // namespace dnsgap
