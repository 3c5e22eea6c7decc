#include "dnsgap/stats/analyze.hpp"

#include <set>
#include <stdexcept>
#include <unordered_map>

#include "dnsgap/stats/rates.hpp"

namespace dnsgap {

std::string_view to_string(Axis a) { return a == Axis::RrType ? "rrtype" : "interface"; }

Axis parse_axis(std::string_view s) {
    if (s == "rrtype") return Axis::RrType;
    if (s == "interface") return Axis::Interface;
    throw std::invalid_argument("unknown axis '" + std::string(s) + "' (rrtype|interface)");
}

std::string_view to_string(Stratum s) {
    switch (s) {
        case Stratum::V4Only: return "v4";
        case Stratum::V6Only: return "v6";
        case Stratum::AOnly: return "a";
        case Stratum::AAAAOnly: return "aaaa";
        case Stratum::All: return "all";
    }
    return "all";
}

std::vector<Stratum> strata_for(Axis axis) {
    if (axis == Axis::RrType) return {Stratum::V4Only, Stratum::V6Only, Stratum::All};
    return {Stratum::AOnly, Stratum::AAAAOnly, Stratum::All};
}

namespace {

/// 0 for group a (A or V4), 1 for group b.
int group_of(const ProbeTask& t, Axis axis) {
    if (axis == Axis::RrType) return t.rrtype == RrType::A ? 0 : 1;
    return t.iface == Interface::V4 ? 0 : 1;
}

bool in_stratum(const ProbeTask& t, Stratum s) {
    switch (s) {
        case Stratum::V4Only: return t.iface == Interface::V4;
        case Stratum::V6Only: return t.iface == Interface::V6;
        case Stratum::AOnly: return t.rrtype == RrType::A;
        case Stratum::AAAAOnly: return t.rrtype == RrType::AAAA;
        case Stratum::All: return true;
    }
    return false;
}

void count(CellCounts& c, Outcome o) {
    if (o == Outcome::Censored) ++c.censored;
    else if (o == Outcome::Accessible) ++c.accessible;
    else ++c.inconclusive;
}

using PairIndex = std::unordered_map<std::string, const ResolverPair*>;

PairIndex index_pairs(const std::vector<ResolverPair>& pairs) {
    PairIndex idx;
    for (const auto& p : pairs) idx.emplace(p.id(), &p);
    return idx;
}

double fraction(const CellCounts& c) {
    return static_cast<double>(c.censored) / static_cast<double>(c.conclusive());
}

struct ZOutcome {
    std::optional<double> z;
    double p = 1;
    bool not_applicable = false;
};

ZOutcome z_or_na(const CellCounts& a, const CellCounts& b) {
    ZOutcome out;
    if (a.conclusive() == 0 || b.conclusive() == 0) {
        out.not_applicable = true;
        return out;
    }
    try {
        const auto r = z_test_two_proportion(a.censored, a.conclusive(), b.censored, b.conclusive());
        out.z = r.z;
        out.p = r.p;
    } catch (const NotApplicable&) {
        out.not_applicable = true;
    }
    return out;
}

}  // namespace

CountryAnalysis analyze_country(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                                Axis axis, const AnalysisOptions& options) {
    const auto idx = index_pairs(pairs);
    const auto strata = strata_for(axis);
    // country -> pair -> stratum -> group counts
    std::map<std::string, std::map<std::string, std::array<std::array<CellCounts, 2>, 3>>> data;
    for (const auto& v : verdicts) {
        auto it = idx.find(v.task.pair_id);
        if (it == idx.end()) continue;
        auto& per_pair = data[it->second->country][v.task.pair_id];
        const int g = group_of(v.task, axis);
        for (std::size_t s = 0; s < strata.size(); ++s) {
            if (in_stratum(v.task, strata[s])) count(per_pair[s][static_cast<std::size_t>(g)], v.outcome);
        }
    }

    CountryAnalysis out;
    out.comparisons = options.comparisons.value_or(data.size());
    if (out.comparisons == 0) return out;
    out.threshold = sidak_alpha(options.alpha, out.comparisons, options.sidak);

    for (const auto& [country, per_pair] : data) {
        for (std::size_t s = 0; s < strata.size(); ++s) {
            std::vector<double> xs, ys;
            CellCounts pooled[2];
            for (const auto& [pid, cells] : per_pair) {
                if (cells[s][0].conclusive() > 0) xs.push_back(fraction(cells[s][0]));
                if (cells[s][1].conclusive() > 0) ys.push_back(fraction(cells[s][1]));
                pooled[0] += cells[s][0];
                pooled[1] += cells[s][1];
            }
            if (xs.size() < 2 || ys.size() < 2) {
                out.skipped.push_back({country, strata[s], "fewer than 2 resolvers with conclusive probes in a group"});
                continue;
            }
            CountryFinding f;
            f.country = country;
            f.axis = axis;
            f.stratum = strata[s];
            f.rate_a = *pooled[0].rate();
            f.rate_b = *pooled[1].rate();
            f.pp = f.rate_b - f.rate_a;
            if (f.rate_a != 0) f.pct = diff_with_pct(f.rate_a, f.rate_b).pct;
            const auto t = options.pooled_t ? t_test_pooled(xs, ys) : t_test_two_sample(xs, ys);
            f.t = t.t;
            f.df = t.df;
            f.p_value = t.p;
            f.degenerate = t.degenerate;
            f.threshold = out.threshold;
            f.significant = t.p <= out.threshold;
            f.samples_a = xs.size();
            f.samples_b = ys.size();
            out.findings.push_back(f);
        }
    }
    return out;
}

ResolverAnalysis analyze_resolvers(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                                   Axis axis, const AnalysisOptions& options) {
    const auto idx = index_pairs(pairs);
    std::map<std::string, std::map<std::string, std::array<CellCounts, 2>>> data;
    for (const auto& v : verdicts) {
        auto it = idx.find(v.task.pair_id);
        if (it == idx.end()) continue;
        count(data[it->second->country][v.task.pair_id][static_cast<std::size_t>(group_of(v.task, axis))], v.outcome);
    }

    ResolverAnalysis out;
    for (const auto& [country, per_pair] : data) {
        const std::size_t n = options.comparisons.value_or(per_pair.size());
        const double threshold = sidak_alpha(options.alpha, n, options.sidak);
        Counts as_all, as_inconsistent;
        std::map<std::uint32_t, std::size_t> inconsistent_by_as;
        std::map<std::string, std::size_t> inconsistent_by_conn;
        DiversityReport report;
        report.country = country;
        report.axis = axis;
        report.threshold = threshold;
        for (const auto& [pid, groups] : per_pair) {
            const ResolverPair& p = *idx.at(pid);
            ResolverFinding f;
            f.pair_id = pid;
            f.country = country;
            f.asn = p.asn;
            f.conn_type = p.conn_type.label();
            f.censored_a = groups[0].censored;
            f.conclusive_a = groups[0].conclusive();
            f.censored_b = groups[1].censored;
            f.conclusive_b = groups[1].conclusive();
            const auto z = z_or_na(groups[0], groups[1]);
            f.z = z.z;
            f.p_value = z.p;
            f.not_applicable = z.not_applicable;
            f.inconsistent = !z.not_applicable && z.p <= threshold;
            const std::string as_key = "AS" + std::to_string(p.asn);
            as_all[as_key] += 1;
            ++report.resolvers;
            if (f.inconsistent) {
                as_inconsistent[as_key] += 1;
                ++inconsistent_by_as[p.asn];
                ++inconsistent_by_conn[f.conn_type];
                ++report.inconsistent;
            }
            out.resolvers.push_back(std::move(f));
        }
        report.s_all = shannon_entropy(as_all);
        if (report.inconsistent > 0) {
            report.s_inconsistent = shannon_entropy(as_inconsistent);
            report.divergence = kl_divergence(as_inconsistent, as_all, options.epsilon);
            std::size_t best = 0;
            for (const auto& [asn, c] : inconsistent_by_as) {
                if (c > best) {
                    best = c;
                    report.most_inconsistent_as = asn;
                }
            }
            best = 0;
            for (const auto& [label, c] : inconsistent_by_conn) {
                if (c > best) {
                    best = c;
                    report.most_inconsistent_conn_type = label;
                }
            }
        }
        out.diversity.push_back(std::move(report));
    }
    return out;
}

DomainAnalysis analyze_domains(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                               const CategoryProvider& categories, Axis axis, const AnalysisOptions& options) {
    const auto idx = index_pairs(pairs);
    std::map<std::string, std::map<std::string, std::array<CellCounts, 2>>> data;
    for (const auto& v : verdicts) {
        auto it = idx.find(v.task.pair_id);
        if (it == idx.end()) continue;
        count(data[it->second->country][v.task.domain][static_cast<std::size_t>(group_of(v.task, axis))], v.outcome);
    }

    DomainAnalysis out;
    for (const auto& [country, per_domain] : data) {
        DomainDivergence div;
        div.country = country;
        div.axis = axis;
        div.tested = per_domain.size();
        div.threshold = sidak_alpha(options.alpha, options.comparisons.value_or(div.tested), options.sidak);
        for (const auto& [domain, groups] : per_domain) {
            DomainFinding f;
            f.country = country;
            f.domain = domain;
            f.category = categories.category(domain).value_or(kUncategorized);
            f.censored_a = groups[0].censored;
            f.conclusive_a = groups[0].conclusive();
            f.censored_b = groups[1].censored;
            f.conclusive_b = groups[1].conclusive();
            f.any_blocking = f.censored_a + f.censored_b > 0;
            const auto z = z_or_na(groups[0], groups[1]);
            f.z = z.z;
            f.p_value = z.p;
            f.inconsistent = !z.not_applicable && z.p <= div.threshold;
            if (f.any_blocking) div.d_any[f.category] += 1;
            if (f.inconsistent) {
                div.d_inconsistent[f.category] += 1;
                div.inconsistent_domains.push_back(domain);
            }
            out.domains.push_back(std::move(f));
        }
        if (!div.d_inconsistent.empty()) div.divergence = kl_divergence(div.d_inconsistent, div.d_any, options.epsilon);
        out.divergence.push_back(std::move(div));
    }
    return out;
}

}  // namespace dnsgap
