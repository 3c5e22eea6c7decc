#include "dnsgap/probe/plan.hpp"

#include <numeric>
#include <stdexcept>

#include "dnsgap/core/util.hpp"

namespace dnsgap {

namespace {

// Fisher-Yates driven by mix64 so the order does not depend on the
// standard library's shuffle implementation.
std::vector<std::uint32_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> v(n);
    std::iota(v.begin(), v.end(), 0u);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t r = hash_combine(seed, static_cast<std::uint64_t>(i));
        std::swap(v[i - 1], v[r % i]);
    }
    return v;
}

}  // namespace

std::optional<ProbeTask> VectorTaskSource::next() {
    if (pos_ >= tasks_.size()) return std::nullopt;
    return std::move(tasks_[pos_++]);
}

std::uint16_t derive_txid(std::uint64_t seed, std::uint64_t index) {
    return static_cast<std::uint16_t>(hash_combine(seed ^ 0x7478696400000000ull, index) >> 48);
}

MatrixPlan::MatrixPlan(std::vector<ResolverPair> pairs, std::vector<std::string> domains, std::uint64_t seed,
                       bool rd_flag)
    : pairs_(std::move(pairs)), domains_(std::move(domains)), seed_(seed), rd_flag_(rd_flag) {
    endpoint_order_ = seeded_permutation(endpoints(), hash_combine(seed_, std::string_view("endpoints")));
    slot_order_ = seeded_permutation(slots(), hash_combine(seed_, std::string_view("slots")));
    endpoint_offset_.resize(endpoints());
    const std::uint64_t offset_seed = hash_combine(seed_, std::string_view("offsets"));
    for (std::size_t e = 0; e < endpoint_offset_.size(); ++e) {
        endpoint_offset_[e] = slots() ? static_cast<std::uint32_t>(hash_combine(offset_seed, e) % slots()) : 0;
    }
}

std::uint64_t MatrixPlan::endpoint_at(std::uint64_t index) const { return endpoint_order_[index % endpoints()]; }

MatrixPlan::Slot MatrixPlan::slot_at(std::uint64_t index) const {
    const std::uint64_t round = index / endpoints();
    const std::uint64_t endpoint = endpoint_at(index);
    const std::uint64_t slot = slot_order_[(round + endpoint_offset_[endpoint]) % slots()];
    Slot s;
    s.pair_index = static_cast<std::uint32_t>(endpoint / 2);
    s.iface = endpoint % 2 == 0 ? Interface::V4 : Interface::V6;
    s.domain_index = static_cast<std::uint32_t>(slot / 2);
    s.rrtype = slot % 2 == 0 ? RrType::A : RrType::AAAA;
    return s;
}

ProbeTask MatrixPlan::task_at(std::uint64_t index) const {
    const Slot s = slot_at(index);
    const auto& pair = pairs_[s.pair_index];
    ProbeTask t;
    t.pair_id = pair.id();
    t.iface = s.iface;
    t.rrtype = s.rrtype;
    t.domain = domains_[s.domain_index];
    t.rd_flag = rd_flag_;
    t.txid = derive_txid(seed_, index);
    t.server = s.iface == Interface::V4 ? IpAddress(pair.v4) : IpAddress(pair.v6);
    t.seq = index;
    return t;
}

MatrixPlan plan_matrix(const CampaignPlan& plan) {
    if (plan.pairs.empty() || plan.domains.empty()) {
        throw std::invalid_argument("plan_matrix needs at least one pair and one domain");
    }
    std::vector<std::string> names;
    names.reserve(plan.domains.size());
    for (const auto& d : plan.domains) names.push_back(d.name);
    return MatrixPlan(plan.pairs, std::move(names), plan.seed, plan.rd_flag);
}

std::optional<ProbeTask> MatrixTaskSource::next() {
    if (pos_ >= plan_.size()) return std::nullopt;
    return plan_.task_at(pos_++);
}

}  // namespace dnsgap
