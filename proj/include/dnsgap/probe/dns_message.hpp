#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dnsgap/core/types.hpp"

namespace dnsgap::dns {

class DnsParseError : public std::runtime_error {
public:
    explicit DnsParseError(const std::string& what) : std::runtime_error(what) {}
};

enum Rcode : std::uint8_t { NoError = 0, FormErr = 1, ServFail = 2, NxDomain = 3, NotImp = 4, Refused = 5 };
std::string rcode_name(std::uint8_t rcode);

constexpr std::uint16_t kClassIn = 1;

struct Question {
    std::string name;
    std::uint16_t qtype = 1;
    std::uint16_t qclass = kClassIn;
};

struct Message {
    std::uint16_t id = 0;
    bool qr = false;
    std::uint8_t opcode = 0;
    bool aa = false;
    bool tc = false;
    bool rd = false;
    bool ra = false;
    std::uint8_t rcode = 0;
    std::vector<Question> questions;
    std::vector<AnswerRecord> answers;
    std::vector<AnswerRecord> authority;
    std::vector<AnswerRecord> additional;
};

/// Standard query: QR=0, OPCODE=0, one IN question, no EDNS.
std::vector<std::uint8_t> build_query(std::uint16_t id, std::string_view name, std::uint16_t qtype, bool rd);

/// Encodes any message. Record owner names equal to the first question's
/// name are written as a compression pointer to offset 12.
std::vector<std::uint8_t> encode(const Message& msg);

/// Full decode with compression-pointer support. Throws DnsParseError on
/// truncation, pointer loops or oversize names.
Message parse(std::span<const std::uint8_t> wire);

/// Reads only the 16-bit id, for demultiplexing before a full parse.
bool peek_id(std::span<const std::uint8_t> wire, std::uint16_t& id);

AnswerRecord make_address_record(std::string_view owner, const IpAddress& addr, std::uint32_t ttl = 300);

/// Case-insensitive comparison of question name, type and class.
bool same_question(const Question& a, const Question& b);

}  // namespace dnsgap::dns
