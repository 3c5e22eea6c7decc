#pragma once

#include <cstdint>
#include <map>
#include <set>

#include "dnsgap/core/types.hpp"

namespace dnsgap {

struct AnswerExtraction {
    std::set<IpAddress> ips;
    /// A/AAAA records whose RDATA length is wrong for the type.
    std::size_t malformed = 0;
    /// Responses by RCODE, for inspecting answerless replies.
    std::map<std::uint8_t, std::size_t> rcodes;
};

/// Union of every A and AAAA RDATA across all captured responses, injected
/// and authentic alike.
AnswerExtraction extract_answers(const ProbeResult& result);
std::set<IpAddress> extract_answer_ips(const ProbeResult& result);

}  // namespace dnsgap
