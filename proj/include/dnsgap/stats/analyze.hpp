#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/enrich/providers.hpp"
#include "dnsgap/stats/information.hpp"
#include "dnsgap/stats/tests.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap {

/// Which two groups are compared: A against AAAA queries, or queries over
/// IPv4 against queries over IPv6. Group "a" is A / V4, group "b" is
/// AAAA / V6.
enum class Axis { RrType, Interface };
std::string_view to_string(Axis a);
Axis parse_axis(std::string_view s);

/// The slice of the other dimension a comparison is restricted to.
enum class Stratum { V4Only, V6Only, AOnly, AAAAOnly, All };
std::string_view to_string(Stratum s);
/// The three strata used for an axis, in table column order.
std::vector<Stratum> strata_for(Axis axis);

struct AnalysisOptions {
    double alpha = 0.05;
    SidakMode sidak = SidakMode::Standard;
    /// Overrides the number of comparisons used for the Sidak correction.
    std::optional<std::size_t> comparisons;
    /// Additive smoothing for KL divergences.
    double epsilon = 0.0;
    /// Pooled-variance Student t instead of Welch.
    bool pooled_t = false;
};

struct CountryFinding {
    std::string country;
    Axis axis = Axis::RrType;
    Stratum stratum = Stratum::All;
    /// Pooled query rates of the two groups, in percent.
    double rate_a = 0;
    double rate_b = 0;
    double pp = 0;
    /// Absent when rate_a is 0.
    std::optional<double> pct;
    double t = 0;
    double df = 0;
    double p_value = 1;
    double threshold = 0;
    bool significant = false;
    bool degenerate = false;
    std::size_t samples_a = 0;
    std::size_t samples_b = 0;
};

struct SkippedStratum {
    std::string country;
    Stratum stratum;
    std::string reason;
};

struct CountryAnalysis {
    std::vector<CountryFinding> findings;
    std::vector<SkippedStratum> skipped;
    std::size_t comparisons = 0;
    double threshold = 0;
};

/// Per country and stratum, Welch t-test on per-resolver censored fractions
/// of the two groups; Sidak n = number of countries with verdicts.
CountryAnalysis analyze_country(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                                Axis axis, const AnalysisOptions& options = {});

struct ResolverFinding {
    std::string pair_id;
    std::string country;
    std::uint32_t asn = 0;
    std::string conn_type;
    std::uint64_t censored_a = 0, conclusive_a = 0;
    std::uint64_t censored_b = 0, conclusive_b = 0;
    std::optional<double> z;
    double p_value = 1;
    /// The z-test was not applicable (zero pooled variance or no data).
    bool not_applicable = false;
    bool inconsistent = false;
};

struct DiversityReport {
    std::string country;
    Axis axis = Axis::RrType;
    std::size_t resolvers = 0;
    std::size_t inconsistent = 0;
    double threshold = 0;
    /// Entropy (bits) of the AS distribution of all / inconsistent resolvers.
    double s_all = 0;
    std::optional<double> s_inconsistent;
    /// KL(inconsistent || all), bits.
    std::optional<double> divergence;
    std::optional<std::uint32_t> most_inconsistent_as;
    std::optional<std::string> most_inconsistent_conn_type;
};

struct ResolverAnalysis {
    std::vector<ResolverFinding> resolvers;
    std::vector<DiversityReport> diversity;
};

/// Per resolver, a two-proportion z-test of censored counts across the
/// axis; Sidak n = resolvers tested in that country.
ResolverAnalysis analyze_resolvers(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                                   Axis axis, const AnalysisOptions& options = {});

struct DomainFinding {
    std::string country;
    std::string domain;
    std::string category;
    std::uint64_t censored_a = 0, conclusive_a = 0;
    std::uint64_t censored_b = 0, conclusive_b = 0;
    std::optional<double> z;
    double p_value = 1;
    bool any_blocking = false;
    bool inconsistent = false;
};

struct DomainDivergence {
    std::string country;
    Axis axis = Axis::RrType;
    std::size_t tested = 0;
    double threshold = 0;
    Counts d_any;
    Counts d_inconsistent;
    /// KL(d_inconsistent || d_any), absent when nothing is inconsistent.
    std::optional<double> divergence;
    std::vector<std::string> inconsistent_domains;
};

struct DomainAnalysis {
    std::vector<DomainFinding> domains;
    std::vector<DomainDivergence> divergence;
};

inline const std::string kUncategorized = "Uncategorized";

/// Per country and domain, a z-test on query counts pooled over the
/// country's resolvers; Sidak n = domains tested in that country.
DomainAnalysis analyze_domains(const std::vector<CensorVerdict>& verdicts, const std::vector<ResolverPair>& pairs,
                               const CategoryProvider& categories, Axis axis, const AnalysisOptions& options = {});

}  // namespace dnsgap
