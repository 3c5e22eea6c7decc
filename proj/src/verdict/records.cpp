#include "dnsgap/verdict/records.hpp"

namespace dnsgap {

json to_json(const CensorVerdict& v) {
    json j;
    j["task"] = to_json(v.task);
    j["outcome"] = std::string(to_string(v.outcome));
    j["reason"] = v.reason;
    json ips = json::array();
    for (const auto& ip : v.answer_ips) ips.push_back(ip.to_string());
    j["answer_ips"] = std::move(ips);
    if (v.fingerprint) {
        j["fingerprint"] = json{{"name", std::string(to_string(v.fingerprint->name))},
                                {"label", v.fingerprint->label},
                                {"matched_on", v.fingerprint->matched_on.to_string()}};
    } else {
        j["fingerprint"] = nullptr;
    }
    json attempts = json::array();
    for (const auto& a : v.tls_attempts) {
        json aj{{"round", a.round}, {"ip", a.ip.to_string()}, {"outcome", std::string(to_string(a.outcome))}};
        if (!a.detail.empty()) aj["detail"] = a.detail;
        attempts.push_back(std::move(aj));
    }
    j["tls_attempts"] = std::move(attempts);
    j["probe_status"] = std::string(to_string(v.probe_status));
    j["malformed_rdata"] = v.malformed_rdata;
    json rcodes = json::object();
    for (const auto& [code, n] : v.rcodes) rcodes[std::to_string(code)] = n;
    j["rcodes"] = std::move(rcodes);
    return j;
}

CensorVerdict censor_verdict_from_json(const json& j) {
    CensorVerdict v;
    try {
        v.task = probe_task_from_json(j.at("task"));
        v.outcome = parse_outcome(j.at("outcome").get<std::string>());
        v.reason = j.value("reason", "");
        for (const auto& s : j.at("answer_ips")) v.answer_ips.insert(IpAddress::parse(s.get<std::string>()));
        if (j.contains("fingerprint") && j["fingerprint"].is_object()) {
            const auto& f = j["fingerprint"];
            const auto name = f.at("name").get<std::string>();
            InjectorFingerprint fp;
            if (name == "IranV4") fp.name = FingerprintName::IranV4;
            else if (name == "IranV6") fp.name = FingerprintName::IranV6;
            else if (name == "GfwTeredo") fp.name = FingerprintName::GfwTeredo;
            else fp.name = FingerprintName::Custom;
            fp.label = f.value("label", name);
            fp.matched_on = IpAddress::parse(f.at("matched_on").get<std::string>());
            v.fingerprint = fp;
        }
        for (const auto& a : j.at("tls_attempts")) {
            v.tls_attempts.push_back({a.at("round").get<int>(), IpAddress::parse(a.at("ip").get<std::string>()),
                                      parse_tls_outcome(a.at("outcome").get<std::string>()), a.value("detail", "")});
        }
        v.probe_status = parse_probe_status(j.value("probe_status", "answered"));
        v.malformed_rdata = j.value("malformed_rdata", std::size_t{0});
        if (j.contains("rcodes")) {
            for (const auto& [k, n] : j["rcodes"].items()) {
                v.rcodes[static_cast<std::uint8_t>(std::stoi(k))] = n.get<std::size_t>();
            }
        }
    } catch (const json::exception& e) {
        throw RecordFormatError(std::string("bad verdict record: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw RecordFormatError(std::string("bad verdict record: ") + e.what());
    }
    return v;
}

std::vector<CensorVerdict> read_verdicts(const std::filesystem::path& path) {
    std::vector<CensorVerdict> out;
    read_jsonl(path, [&](const json& j) { out.push_back(censor_verdict_from_json(j)); });
    return out;
}

}  // namespace dnsgap
