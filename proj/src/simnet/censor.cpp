#include "dnsgap/simnet/censor.hpp"

#include "dnsgap/core/label_codec.hpp"

namespace dnsgap::sim {

const BlockRule* find_rule(const CensorPolicy& policy, std::string_view domain, RrType rrtype) {
    const auto name = normalize_name(domain);
    const BlockRule* any = nullptr;
    for (const auto& r : policy.blocked) {
        if (normalize_name(r.domain) != name || !rr_class_matches(r.rrclass, rrtype)) continue;
        if (r.rrclass != RrClass::Any) return &r;
        if (!any) any = &r;
    }
    return any;
}

bool policy_applies(const CensorPolicy& policy, const SimResolver& resolver) {
    if (policy.scope.country) return *policy.scope.country == resolver.country;
    return policy.scope.asns.count(resolver.asn) > 0;
}

CensorAction censor_decide(const CensorPolicy& policy, const CensorContext& ctx) {
    const BlockRule* rule = find_rule(policy, ctx.domain, ctx.rrtype);
    if (!rule) return CensorAction::pass();
    if (ctx.encapsulated_6to4 && !policy.parses_6to4) return CensorAction::pass();
    if (ctx.family == AddressFamily::V6 && !policy.v6_capable) return CensorAction::pass();
    if (policy.requires_rd && !ctx.rd_flag) return CensorAction::pass();
    if (ctx.draw >= policy.injection_probability) return CensorAction::pass();
    if (ctx.family == AddressFamily::V6 && rule->v6_action) return *rule->v6_action;
    return rule->action;
}

}  // namespace dnsgap::sim
