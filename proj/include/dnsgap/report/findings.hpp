#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "dnsgap/stats/analyze.hpp"

namespace dnsgap {

nlohmann::json to_json(const CountryFinding& f);
CountryFinding country_finding_from_json(const nlohmann::json& j);
std::vector<CountryFinding> read_country_findings(const std::filesystem::path& path);

nlohmann::json to_json(const SkippedStratum& s);
nlohmann::json to_json(const ResolverFinding& f);
nlohmann::json to_json(const DiversityReport& d);
nlohmann::json to_json(const DomainFinding& f);
nlohmann::json to_json(const DomainDivergence& d);

Stratum parse_stratum(std::string_view s);

}  // namespace dnsgap
