#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap {

/// Cell order used everywhere: V4·A, V4·AAAA, V6·A, V6·AAAA.
constexpr std::size_t kCells = 4;
std::size_t cell_index(Interface iface, RrType rrtype);
std::string cell_name(std::size_t index);

struct CellCounts {
    std::uint64_t censored = 0;
    std::uint64_t accessible = 0;
    std::uint64_t inconclusive = 0;
    std::uint64_t conclusive() const { return censored + accessible; }
    /// 100 * censored / (censored + accessible); absent with no conclusive probe.
    std::optional<double> rate() const;
    CellCounts& operator+=(const CellCounts& o);
};

struct RateRow {
    std::string key;
    std::size_t pairs = 0;
    std::array<std::optional<double>, kCells> cells{};
    /// Counts behind the cells; all zero for rows read from a rate table.
    std::array<CellCounts, kCells> counts{};
    /// Mean of the present cells, unrounded.
    std::optional<double> avg() const;
};

struct RateTable {
    /// One row per country, in key order.
    std::vector<RateRow> rows;
    /// Column-wise unweighted mean over countries.
    RateRow global;
    /// Country x connection type and country x v6 kind rows, keyed
    /// "<country>/<label>".
    std::vector<RateRow> by_conn_type;
    std::vector<RateRow> by_v6_kind;
    std::size_t unmatched_verdicts = 0;
};

/// Unweighted mean of each column over `rows` (absent cells skipped).
RateRow global_row(const std::vector<RateRow>& rows);

/// Pooled per-cell rates. Inconclusive verdicts are counted but excluded
/// from both numerator and denominator.
RateTable blocking_rates(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs);

class PctUndefined : public std::domain_error {
public:
    PctUndefined() : std::domain_error("percentage change from a zero rate is undefined") {}
};

struct RateDiff {
    double pp = 0;
    double pct = 0;
};

/// pp = b - a, pct = 100 (b - a) / a. Throws PctUndefined when a == 0.
RateDiff diff_with_pct(double rate_a, double rate_b);

}  // namespace dnsgap
