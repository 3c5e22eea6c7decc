#include "dnsgap/report/findings.hpp"

#include "dnsgap/core/records.hpp"

namespace dnsgap {

namespace {

template <typename T>
nlohmann::json opt(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

Stratum parse_stratum(std::string_view s) {
    for (auto st : {Stratum::V4Only, Stratum::V6Only, Stratum::AOnly, Stratum::AAAAOnly, Stratum::All}) {
        if (to_string(st) == s) return st;
    }
    throw std::invalid_argument("unknown stratum '" + std::string(s) + "'");
}

nlohmann::json to_json(const CountryFinding& f) {
    return {{"country", f.country},
            {"axis", std::string(to_string(f.axis))},
            {"stratum", std::string(to_string(f.stratum))},
            {"rate_a", f.rate_a},
            {"rate_b", f.rate_b},
            {"pp", f.pp},
            {"pct", opt(f.pct)},
            {"t", f.t},
            {"df", f.df},
            {"p_value", f.p_value},
            {"threshold", f.threshold},
            {"significant", f.significant},
            {"degenerate", f.degenerate},
            {"samples_a", f.samples_a},
            {"samples_b", f.samples_b}};
}

CountryFinding country_finding_from_json(const nlohmann::json& j) {
    CountryFinding f;
    try {
        f.country = j.at("country").get<std::string>();
        f.axis = parse_axis(j.at("axis").get<std::string>());
        f.stratum = parse_stratum(j.at("stratum").get<std::string>());
        f.rate_a = j.at("rate_a").get<double>();
        f.rate_b = j.at("rate_b").get<double>();
        f.pp = j.at("pp").get<double>();
        if (!j.at("pct").is_null()) f.pct = j.at("pct").get<double>();
        f.t = j.value("t", 0.0);
        f.df = j.value("df", 0.0);
        f.p_value = j.at("p_value").get<double>();
        f.threshold = j.at("threshold").get<double>();
        f.significant = j.at("significant").get<bool>();
        f.degenerate = j.value("degenerate", false);
        f.samples_a = j.value("samples_a", std::size_t{0});
        f.samples_b = j.value("samples_b", std::size_t{0});
    } catch (const nlohmann::json::exception& e) {
        throw RecordFormatError(std::string("country finding: ") + e.what());
    }
    return f;
}

std::vector<CountryFinding> read_country_findings(const std::filesystem::path& path) {
    std::vector<CountryFinding> out;
    read_jsonl(path, [&](const nlohmann::json& j) { out.push_back(country_finding_from_json(j)); });
    return out;
}

nlohmann::json to_json(const SkippedStratum& s) {
    return {{"country", s.country}, {"stratum", std::string(to_string(s.stratum))}, {"skipped", s.reason}};
}

nlohmann::json to_json(const ResolverFinding& f) {
    return {{"pair_id", f.pair_id},         {"country", f.country},           {"asn", f.asn},
            {"conn_type", f.conn_type},     {"censored_a", f.censored_a},     {"conclusive_a", f.conclusive_a},
            {"censored_b", f.censored_b},   {"conclusive_b", f.conclusive_b}, {"z", opt(f.z)},
            {"p_value", f.p_value},         {"not_applicable", f.not_applicable},
            {"inconsistent", f.inconsistent}};
}

nlohmann::json to_json(const DiversityReport& d) {
    return {{"country", d.country},
            {"axis", std::string(to_string(d.axis))},
            {"resolvers", d.resolvers},
            {"inconsistent", d.inconsistent},
            {"threshold", d.threshold},
            {"s_all", d.s_all},
            {"s_inconsistent", opt(d.s_inconsistent)},
            {"divergence", opt(d.divergence)},
            {"most_inconsistent_as", opt(d.most_inconsistent_as)},
            {"most_inconsistent_conn_type", opt(d.most_inconsistent_conn_type)}};
}

nlohmann::json to_json(const DomainFinding& f) {
    return {{"country", f.country},       {"domain", f.domain},           {"category", f.category},
            {"censored_a", f.censored_a}, {"conclusive_a", f.conclusive_a}, {"censored_b", f.censored_b},
            {"conclusive_b", f.conclusive_b}, {"z", opt(f.z)},             {"p_value", f.p_value},
            {"any_blocking", f.any_blocking}, {"inconsistent", f.inconsistent}};
}

nlohmann::json to_json(const DomainDivergence& d) {
    return {{"country", d.country},
            {"axis", std::string(to_string(d.axis))},
            {"tested", d.tested},
            {"threshold", d.threshold},
            {"d_any", d.d_any},
            {"d_inconsistent", d.d_inconsistent},
            {"divergence", opt(d.divergence)},
            {"inconsistent_domains", d.inconsistent_domains}};
}

}  // namespace dnsgap
