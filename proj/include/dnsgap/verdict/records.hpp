#pragma once

#include <filesystem>
#include <vector>

#include "dnsgap/core/records.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap {

json to_json(const CensorVerdict& v);
CensorVerdict censor_verdict_from_json(const json& j);
std::vector<CensorVerdict> read_verdicts(const std::filesystem::path& path);

}  // namespace dnsgap
