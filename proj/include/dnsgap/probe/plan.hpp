#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dnsgap/core/types.hpp"

namespace dnsgap {

struct CampaignPlan {
    std::vector<ResolverPair> pairs;
    std::vector<VettedDomain> domains;
    std::vector<std::string> controls;
    std::chrono::milliseconds window{2000};
    double rate = 1000.0;
    std::uint64_t seed = 0;
    bool rd_flag = true;
};

/// Produces tasks one at a time; the probe engine pulls from it.
class TaskSource {
public:
    virtual ~TaskSource() = default;
    virtual std::optional<ProbeTask> next() = 0;
};

class VectorTaskSource : public TaskSource {
public:
    explicit VectorTaskSource(std::vector<ProbeTask> tasks) : tasks_(std::move(tasks)) {}
    std::optional<ProbeTask> next() override;

private:
    std::vector<ProbeTask> tasks_;
    std::size_t pos_ = 0;
};

/// The {A, AAAA} x {v4, v6} query matrix in round-robin order.
///
/// An endpoint is one interface of one pair. Task i goes to endpoint
/// order[i % E] in round i / E, so every endpoint receives its k-th query
/// before any endpoint receives its (k+1)-th. Each endpoint walks the 2D
/// (domain, rrtype) slots from its own seeded offset, which spreads a
/// round's queries over different domains. Tasks are computed from the
/// index on demand; nothing is materialized up front.
class MatrixPlan {
public:
    struct Slot {
        std::uint32_t pair_index;
        Interface iface;
        RrType rrtype;
        std::uint32_t domain_index;
    };

    MatrixPlan(std::vector<ResolverPair> pairs, std::vector<std::string> domains, std::uint64_t seed,
               bool rd_flag = true);

    std::uint64_t size() const { return endpoints() * slots(); }
    std::uint64_t endpoints() const { return 2ull * pairs_.size(); }
    std::uint64_t slots() const { return 2ull * domains_.size(); }

    Slot slot_at(std::uint64_t index) const;
    /// Endpoint id (2 * pair_index + iface) of task `index`.
    std::uint64_t endpoint_at(std::uint64_t index) const;
    ProbeTask task_at(std::uint64_t index) const;

    const std::vector<ResolverPair>& pairs() const { return pairs_; }
    const std::vector<std::string>& domains() const { return domains_; }

private:
    std::vector<ResolverPair> pairs_;
    std::vector<std::string> domains_;
    std::uint64_t seed_;
    bool rd_flag_;
    std::vector<std::uint32_t> endpoint_order_;
    std::vector<std::uint32_t> slot_order_;
    std::vector<std::uint32_t> endpoint_offset_;
};

/// Throws std::invalid_argument when pairs or domains are empty.
MatrixPlan plan_matrix(const CampaignPlan& plan);

class MatrixTaskSource : public TaskSource {
public:
    explicit MatrixTaskSource(const MatrixPlan& plan) : plan_(plan) {}
    std::optional<ProbeTask> next() override;

private:
    const MatrixPlan& plan_;
    std::uint64_t pos_ = 0;
};

std::uint16_t derive_txid(std::uint64_t seed, std::uint64_t index);

}  // namespace dnsgap
