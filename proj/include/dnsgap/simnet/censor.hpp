#pragma once

#include <string>

#include "dnsgap/simnet/config.hpp"

namespace dnsgap::sim {

/// What an on-path censor observes about one query.
struct CensorContext {
    AddressFamily family = AddressFamily::V4;
    /// IPv6 carried inside IPv4 by a 6to4 gateway; `family` is then V6.
    bool encapsulated_6to4 = false;
    RrType rrtype = RrType::A;
    bool rd_flag = true;
    std::string domain;
    /// Uniform draw in [0, 1) for the injection coin, supplied by the caller
    /// from a seeded hash so the decision stays a pure function.
    double draw = 0.0;
};

/// Pass for unblocked names, for 6to4 traffic the censor cannot parse, for
/// IPv6 when the censor has no IPv6 capability, and for RD=0 queries when
/// the censor keys on RD. Otherwise the rule's action for the observed
/// family, subject to the injection probability.
CensorAction censor_decide(const CensorPolicy& policy, const CensorContext& ctx);

/// The rule governing `domain` for `rrtype`: an exact-type rule wins over an
/// "any" rule. Null when unblocked.
const BlockRule* find_rule(const CensorPolicy& policy, std::string_view domain, RrType rrtype);

bool policy_applies(const CensorPolicy& policy, const SimResolver& resolver);

}  // namespace dnsgap::sim
