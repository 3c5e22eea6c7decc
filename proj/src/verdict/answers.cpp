#include "dnsgap/verdict/answers.hpp"

#include <algorithm>

namespace dnsgap {

AnswerExtraction extract_answers(const ProbeResult& result) {
    AnswerExtraction out;
    for (const auto& resp : result.responses) {
        ++out.rcodes[resp.rcode];
        for (const auto& rec : resp.answers) {
            if (rec.type == static_cast<std::uint16_t>(RrType::A)) {
                if (rec.rdata.size() != 4) {
                    ++out.malformed;
                    continue;
                }
                out.ips.insert(Ipv4Address(rec.rdata[0], rec.rdata[1], rec.rdata[2], rec.rdata[3]));
            } else if (rec.type == static_cast<std::uint16_t>(RrType::AAAA)) {
                if (rec.rdata.size() != 16) {
                    ++out.malformed;
                    continue;
                }
                Ipv6Address::Bytes b;
                std::copy(rec.rdata.begin(), rec.rdata.end(), b.begin());
                out.ips.insert(Ipv6Address(b));
            }
        }
    }
    return out;
}

std::set<IpAddress> extract_answer_ips(const ProbeResult& result) { return extract_answers(result).ips; }

}  // namespace dnsgap
