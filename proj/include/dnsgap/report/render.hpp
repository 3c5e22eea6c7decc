#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dnsgap/stats/analyze.hpp"
#include "dnsgap/stats/rates.hpp"

namespace dnsgap {

enum class TableFormat { Csv, Markdown, Text };
TableFormat parse_table_format(std::string_view s);

/// Country rows sorted by average descending (ties by key), then the
/// Global row. Columns: pairs, the four cells, avg; two decimals. Absent
/// cells render empty in CSV and as "n/a" otherwise. Markdown bolds the
/// largest cell of each row unless the row is all zero.
std::string render_rate_table(const RateTable& rates, TableFormat format);

/// Same layout for an arbitrary row list (conn-type or v6-kind breakdowns).
std::string render_rate_rows(const std::vector<RateRow>& rows, TableFormat format, std::string_view key_header);

/// Inverse of the CSV form. Lines starting with '#' are skipped. Values come
/// back quantized to two decimals; the Global row goes to `global`.
RateTable parse_rate_table_csv(std::string_view csv);

/// "-7.1 pp (-85.7%)" for a significant finding, "ns" otherwise.
std::string format_diff_cell(const CountryFinding& f);

/// One row per country with a cell per stratum of the axis. Countries with
/// no significant stratum are left out unless `include_ns`. Text form is
/// "TH: -7.1 pp (-85.7%) | ns | -3.7 pp (-77.5%)".
std::string render_diff_table(const std::vector<CountryFinding>& findings, Axis axis, TableFormat format,
                              bool include_ns = false);

/// Per-country resolver consistency summary: resolvers, inconsistent count
/// and share, most inconsistent AS, entropies, divergence, dominant
/// connection type.
std::string render_resolver_table(const ResolverAnalysis& analysis, TableFormat format);

/// Per-country domain summary: tested, inconsistent, divergence and the
/// category most over-represented among inconsistent domains.
std::string render_domain_table(const DomainAnalysis& analysis, TableFormat format);

}  // namespace dnsgap
