#include "dnsgap/core/types.hpp"

#include <stdexcept>

#include "dnsgap/core/label_codec.hpp"

namespace dnsgap {

std::string_view to_string(Interface i) { return i == Interface::V4 ? "v4" : "v6"; }
std::string_view to_string(RrType t) { return t == RrType::A ? "A" : "AAAA"; }

Interface parse_interface(std::string_view s) {
    if (s == "v4" || s == "V4") return Interface::V4;
    if (s == "v6" || s == "V6") return Interface::V6;
    throw std::invalid_argument("unknown interface: " + std::string(s));
}

RrType parse_rrtype(std::string_view s) {
    const auto n = normalize_name(s);
    if (n == "a") return RrType::A;
    if (n == "aaaa") return RrType::AAAA;
    throw std::invalid_argument("unknown record type: " + std::string(s));
}

ConnType::ConnType(Kind kind) : kind_(kind) {
    switch (kind) {
        case Kind::Corporate: label_ = "Corporate"; break;
        case Kind::CableDsl: label_ = "Cable/DSL"; break;
        case Kind::Cellular: label_ = "Cellular"; break;
        case Kind::Unknown: label_ = "Unknown"; break;
    }
}

ConnType ConnType::from_label(std::string_view label) {
    const auto n = normalize_name(label);
    if (n == "corporate") return ConnType(Kind::Corporate);
    if (n == "cable/dsl" || n == "cabledsl") return ConnType(Kind::CableDsl);
    if (n == "cellular") return ConnType(Kind::Cellular);
    ConnType c;
    if (!label.empty()) c.label_ = std::string(label);
    return c;
}

std::string_view to_string(ProbeStatus s) {
    switch (s) {
        case ProbeStatus::Answered: return "answered";
        case ProbeStatus::Timeout: return "timeout";
        case ProbeStatus::NetworkError: return "network_error";
    }
    return "timeout";
}

ProbeStatus parse_probe_status(std::string_view s) {
    if (s == "answered") return ProbeStatus::Answered;
    if (s == "timeout") return ProbeStatus::Timeout;
    if (s == "network_error") return ProbeStatus::NetworkError;
    throw std::invalid_argument("unknown probe status: " + std::string(s));
}

}  // namespace dnsgap
