#include "dnsgap/stats/rates.hpp"

#include <set>
#include <unordered_map>

namespace dnsgap {

std::size_t cell_index(Interface iface, RrType rrtype) {
    return (iface == Interface::V4 ? 0 : 2) + (rrtype == RrType::A ? 0 : 1);
}

std::string cell_name(std::size_t index) {
    static const char* names[kCells] = {"v4_a", "v4_aaaa", "v6_a", "v6_aaaa"};
    return names[index];
}

std::optional<double> CellCounts::rate() const {
    if (conclusive() == 0) return std::nullopt;
    return 100.0 * static_cast<double>(censored) / static_cast<double>(conclusive());
}

CellCounts& CellCounts::operator+=(const CellCounts& o) {
    censored += o.censored;
    accessible += o.accessible;
    inconclusive += o.inconclusive;
    return *this;
}

std::optional<double> RateRow::avg() const {
    double sum = 0;
    int n = 0;
    for (const auto& c : cells) {
        if (c) {
            sum += *c;
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
}

RateRow global_row(const std::vector<RateRow>& rows) {
    RateRow g;
    g.key = "Global";
    for (std::size_t c = 0; c < kCells; ++c) {
        double sum = 0;
        int n = 0;
        for (const auto& r : rows) {
            if (r.cells[c]) {
                sum += *r.cells[c];
                ++n;
            }
        }
        if (n > 0) g.cells[c] = sum / n;
    }
    for (const auto& r : rows) {
        g.pairs += r.pairs;
        for (std::size_t c = 0; c < kCells; ++c) g.counts[c] += r.counts[c];
    }
    return g;
}

namespace {

void add(CellCounts& c, Outcome o) {
    switch (o) {
        case Outcome::Censored: ++c.censored; break;
        case Outcome::Accessible: ++c.accessible; break;
        case Outcome::Inconclusive: ++c.inconclusive; break;
    }
}

std::vector<RateRow> finish_rows(std::map<std::string, RateRow>& rows) {
    std::vector<RateRow> out;
    for (auto& [key, row] : rows) {
        for (std::size_t c = 0; c < kCells; ++c) row.cells[c] = row.counts[c].rate();
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace

RateTable blocking_rates(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs) {
    std::unordered_map<std::string, const ResolverPair*> by_id;
    for (const auto& p : pairs) by_id.emplace(p.id(), &p);

    std::map<std::string, RateRow> country, conn, kind;
    std::map<std::string, std::set<std::string>> pair_sets;
    RateTable table;
    for (const auto& v : verdicts) {
        auto it = by_id.find(v.task.pair_id);
        if (it == by_id.end()) {
            ++table.unmatched_verdicts;
            continue;
        }
        const ResolverPair& p = *it->second;
        const auto cell = cell_index(v.task.iface, v.task.rrtype);
        const std::string keys[3] = {p.country, p.country + "/" + p.conn_type.label(),
                                     p.country + "/" + std::string(v6_kind_name(p.v6_kind))};
        std::map<std::string, RateRow>* maps[3] = {&country, &conn, &kind};
        for (int i = 0; i < 3; ++i) {
            auto& row = (*maps[i])[keys[i]];
            row.key = keys[i];
            add(row.counts[cell], v.outcome);
            if (pair_sets[std::to_string(i) + keys[i]].insert(p.id()).second) ++row.pairs;
        }
    }
    table.rows = finish_rows(country);
    table.by_conn_type = finish_rows(conn);
    table.by_v6_kind = finish_rows(kind);
    table.global = global_row(table.rows);
    return table;
}

RateDiff diff_with_pct(double rate_a, double rate_b) {
    if (rate_a == 0) throw PctUndefined();
    return {rate_b - rate_a, 100.0 * (rate_b - rate_a) / rate_a};
}

}  // namespace dnsgap
