#include "dnsgap/report/render.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "dnsgap/core/util.hpp"

namespace dnsgap {

TableFormat parse_table_format(std::string_view s) {
    if (s == "csv") return TableFormat::Csv;
    if (s == "markdown" || s == "md") return TableFormat::Markdown;
    if (s == "text") return TableFormat::Text;
    throw std::invalid_argument("unknown table format '" + std::string(s) + "' (csv|markdown|text)");
}

namespace {

std::string fixed2(double v) { return fmt::format("{:.2f}", v); }

/// Assembles rows of already formatted cells in the requested format.
std::string layout(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows,
                   TableFormat format) {
    std::string out;
    auto join = [](const std::vector<std::string>& cells, std::string_view sep) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += sep;
            line += cells[i];
        }
        return line;
    };
    switch (format) {
        case TableFormat::Csv:
            out += join(header, ",") + "\n";
            for (const auto& r : rows) out += join(r, ",") + "\n";
            break;
        case TableFormat::Text:
            out += join(header, ", ") + "\n";
            for (const auto& r : rows) out += join(r, ", ") + "\n";
            break;
        case TableFormat::Markdown: {
            out += "| " + join(header, " | ") + " |\n|";
            for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? "---|" : "---:|";
            out += "\n";
            for (const auto& r : rows) out += "| " + join(r, " | ") + " |\n";
            break;
        }
    }
    return out;
}

std::vector<std::string> rate_cells(const RateRow& row, TableFormat format) {
    const std::string missing = format == TableFormat::Csv ? "" : "n/a";
    std::vector<std::string> cells{row.key, std::to_string(row.pairs)};
    double max = 0;
    for (const auto& c : row.cells) {
        if (c) max = std::max(max, std::stod(fixed2(*c)));
    }
    for (const auto& c : row.cells) {
        if (!c) {
            cells.push_back(missing);
            continue;
        }
        auto text = fixed2(*c);
        if (format == TableFormat::Markdown && max > 0 && std::stod(text) == max) text = "**" + text + "**";
        cells.push_back(std::move(text));
    }
    const auto avg = row.avg();
    cells.push_back(avg ? fixed2(*avg) : missing);
    return cells;
}

std::vector<std::string> rate_header(std::string_view key_header) {
    std::vector<std::string> h{std::string(key_header), "pairs"};
    for (std::size_t i = 0; i < kCells; ++i) h.push_back(cell_name(i));
    h.push_back("avg");
    return h;
}

std::vector<const RateRow*> sorted_rows(const std::vector<RateRow>& rows) {
    std::vector<const RateRow*> out;
    for (const auto& r : rows) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(), [](const RateRow* a, const RateRow* b) {
        const auto x = a->avg(), y = b->avg();
        if (x.has_value() != y.has_value()) return x.has_value();
        if (x && *x != *y) return *x > *y;
        return a->key < b->key;
    });
    return out;
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

std::string render_rate_rows(const std::vector<RateRow>& rows, TableFormat format, std::string_view key_header) {
    std::vector<std::vector<std::string>> body;
    for (const auto* r : sorted_rows(rows)) body.push_back(rate_cells(*r, format));
    return layout(rate_header(key_header), body, format);
}

std::string render_rate_table(const RateTable& rates, TableFormat format) {
    std::vector<std::vector<std::string>> body;
    for (const auto* r : sorted_rows(rates.rows)) body.push_back(rate_cells(*r, format));
    if (!rates.rows.empty()) {
        RateRow global = rates.global;
        global.key = "Global";
        body.push_back(rate_cells(global, format));
    }
    return layout(rate_header("country"), body, format);
}

RateTable parse_rate_table_csv(std::string_view csv) {
    RateTable table;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    std::size_t data_lines = 0;
    while (pos < csv.size()) {
        auto end = csv.find('\n', pos);
        if (end == std::string_view::npos) end = csv.size();
        const auto line = trim(csv.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        if (++data_lines == 1) continue;  // header
        const auto f = split_fields(line);
        if (f.size() != 3 + kCells) {
            throw std::invalid_argument(fmt::format("rate table line {}: expected {} fields", line_no, 3 + kCells));
        }
        RateRow row;
        row.key = f[0];
        try {
            row.pairs = std::stoul(f[1]);
            for (std::size_t i = 0; i < kCells; ++i) {
                if (!f[2 + i].empty()) row.cells[i] = std::stod(f[2 + i]);
            }
        } catch (const std::logic_error&) {
            throw std::invalid_argument(fmt::format("rate table line {}: bad number", line_no));
        }
        if (row.key == "Global") table.global = std::move(row);
        else table.rows.push_back(std::move(row));
    }
    std::sort(table.rows.begin(), table.rows.end(), [](const RateRow& a, const RateRow& b) { return a.key < b.key; });
    return table;
}

std::string format_diff_cell(const CountryFinding& f) {
    if (!f.significant) return "ns";
    if (!f.pct) return fmt::format("{:.1f} pp (n/a)", f.pp);
    return fmt::format("{:.1f} pp ({:+.1f}%)", f.pp, *f.pct);
}

std::string render_diff_table(const std::vector<CountryFinding>& findings, Axis axis, TableFormat format,
                              bool include_ns) {
    const auto strata = strata_for(axis);
    std::vector<std::string> header{"country"};
    for (auto s : strata) {
        if (s == Stratum::All) header.push_back("Both");
        else if (s == Stratum::V4Only) header.push_back("IPv4");
        else if (s == Stratum::V6Only) header.push_back("IPv6");
        else if (s == Stratum::AOnly) header.push_back("A");
        else header.push_back("AAAA");
    }

    std::map<std::string, std::map<Stratum, const CountryFinding*>> by_country;
    for (const auto& f : findings) {
        if (f.axis == axis) by_country[f.country][f.stratum] = &f;
    }
    std::vector<std::vector<std::string>> rows;
    for (const auto& [country, cells] : by_country) {
        bool any = false;
        std::vector<std::string> row{country};
        for (auto s : strata) {
            auto it = cells.find(s);
            if (it == cells.end()) {
                row.push_back("n/a");
                continue;
            }
            any = any || it->second->significant;
            row.push_back(format_diff_cell(*it->second));
        }
        if (any || include_ns) rows.push_back(std::move(row));
    }

    if (format != TableFormat::Text) return layout(header, rows, format);
    std::string out = header[0] + ": " + header[1];
    for (std::size_t i = 2; i < header.size(); ++i) out += " | " + header[i];
    out += "\n";
    for (const auto& r : rows) {
        out += r[0] + ": " + r[1];
        for (std::size_t i = 2; i < r.size(); ++i) out += " | " + r[i];
        out += "\n";
    }
    return out;
}

std::string render_resolver_table(const ResolverAnalysis& analysis, TableFormat format) {
    const std::string missing = format == TableFormat::Csv ? "" : "n/a";
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : analysis.diversity) {
        std::size_t as_count = 0, conn_count = 0;
        for (const auto& r : analysis.resolvers) {
            if (r.country != d.country || !r.inconsistent) continue;
            if (d.most_inconsistent_as && r.asn == *d.most_inconsistent_as) ++as_count;
            if (d.most_inconsistent_conn_type && r.conn_type == *d.most_inconsistent_conn_type) ++conn_count;
        }
        const double share = d.resolvers ? 100.0 * static_cast<double>(d.inconsistent) / d.resolvers : 0.0;
        rows.push_back({d.country, std::to_string(d.resolvers), fmt::format("{} ({:.1f}%)", d.inconsistent, share),
                        d.most_inconsistent_as ? fmt::format("AS{} ({})", *d.most_inconsistent_as, as_count) : missing,
                        fixed2(d.s_all), d.s_inconsistent ? fixed2(*d.s_inconsistent) : missing,
                        d.divergence ? fixed2(*d.divergence) : missing,
                        d.most_inconsistent_conn_type
                            ? fmt::format("{} ({})", *d.most_inconsistent_conn_type, conn_count)
                            : missing});
    }
    return layout({"country", "resolvers", "inconsistent", "top_as", "s_all", "s_inconsistent", "divergence",
                   "top_conn_type"},
                  rows, format);
}

std::string render_domain_table(const DomainAnalysis& analysis, TableFormat format) {
    const std::string missing = format == TableFormat::Csv ? "" : "n/a";
    std::vector<std::vector<std::string>> rows;
    for (const auto& d : analysis.divergence) {
        double any_total = 0, inc_total = 0;
        for (const auto& [k, v] : d.d_any) any_total += v;
        for (const auto& [k, v] : d.d_inconsistent) inc_total += v;
        std::string top = missing;
        double best = -1;
        for (const auto& [cat, n] : d.d_inconsistent) {
            auto it = d.d_any.find(cat);
            const double base = it == d.d_any.end() || any_total == 0 ? 0 : it->second / any_total;
            const double lift = base > 0 ? (n / inc_total) / base : n / inc_total;
            if (lift > best) {
                best = lift;
                top = fmt::format("{} ({})", cat, static_cast<long long>(n));
            }
        }
        rows.push_back({d.country, std::to_string(d.tested), std::to_string(d.inconsistent_domains.size()),
                        d.divergence ? fixed2(*d.divergence) : missing, top});
    }
    return layout({"country", "tested", "inconsistent", "divergence", "top_category"}, rows, format);
}

}  // namespace dnsgap
