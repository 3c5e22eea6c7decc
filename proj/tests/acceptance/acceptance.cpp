// Acceptance checks. Prints one PASS/FAIL line per criterion; with
// --criterion N only that one runs. Exit status is non-zero when any
// selected criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "dnsgap/core/label_codec.hpp"
#include "dnsgap/core/v6_kind.hpp"
#include "dnsgap/enrich/providers.hpp"
#include "dnsgap/probe/plan.hpp"
#include "dnsgap/simnet/campaign.hpp"
#include "dnsgap/simnet/presets.hpp"
#include "dnsgap/stats/analyze.hpp"
#include "dnsgap/stats/information.hpp"
#include "dnsgap/stats/rates.hpp"
#include "dnsgap/stats/tests.hpp"
#include "dnsgap/verdict/records.hpp"
#include "fuzz.hpp"
#include "oracles.hpp"
#include "published.hpp"

using namespace dnsgap;

namespace {

// Tolerances and budgets, pinned.
constexpr double kTableTime = 1.0;       // seconds, criteria 1-3
constexpr double kSimTime = 60.0;        // seconds, criteria 7-8
constexpr double kDiffPp = 0.1;          // percentage points
constexpr double kDiffPct = 0.6;         // relative percentage points
constexpr double kGlobalSlack = 0.01;
constexpr double kSidakTol = 1e-6;
constexpr double kPValueTol = 1e-6;
constexpr double kInfoTol = 1e-4;

struct Check {
    bool pass = true;
    std::vector<std::string> notes;
    void fail(std::string why) {
        pass = false;
        notes.push_back(std::move(why));
    }
    void note(std::string s) { notes.push_back(std::move(s)); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void check_time(Check& out, Clock::time_point t0, double budget) {
    const double s = seconds_since(t0);
    if (s >= budget) out.fail(fmt::format("took {:.2f} s, budget {:.0f} s", s, budget));
}

Check matrix_cardinality() {
    const auto t0 = Clock::now();
    Check out;
    CampaignPlan plan;
    for (std::uint32_t i = 0; i < 7843; ++i) {
        ResolverPair p;
        p.v4 = Ipv4Address(0x0B000000u + i);
        p.v6 = six_to_four_prefix(p.v4);
        plan.pairs.push_back(p);
    }
    for (int i = 0; i < 714; ++i) plan.domains.push_back({fmt::format("site-{}.example", i), {}, {}, {}, {}});
    const auto matrix = plan_matrix(plan);
    const std::uint64_t want = 22'399'608;
    if (matrix.size() != want) out.fail(fmt::format("{} tasks, expected {}", matrix.size(), want));
    // The last index must still resolve to a task.
    const auto last = matrix.task_at(matrix.size() - 1);
    if (last.domain.empty()) out.fail("last task has no domain");
    out.note(fmt::format("{} tasks", matrix.size()));
    check_time(out, t0, kTableTime);
    return out;
}

Check difference_tables() {
    const auto t0 = Clock::now();
    Check out;
    std::size_t ok = 0;
    const auto& diffs = fixtures::published_diffs();
    for (const auto& e : diffs) {
        const auto* row = fixtures::find_country(e.country);
        if (!row) {
            out.fail(e.country + " missing from rate fixture");
            continue;
        }
        const auto [a, b] = fixtures::compared_rates(*row, e.axis, e.column);
        const auto d = diff_with_pct(a, b);
        const bool pp_ok = std::fabs(d.pp - e.pp) <= kDiffPp + 1e-9;
        const bool pct_ok = std::fabs(d.pct - e.pct) <= kDiffPct + 1e-9;
        if (pp_ok && pct_ok) {
            ++ok;
        } else {
            out.fail(fmt::format("{} {} col {}: {:+.2f} pp ({:+.1f}%) vs published {:+.1f} pp ({:+.1f}%)", e.axis,
                                 e.country, e.column, d.pp, d.pct, e.pp, e.pct));
        }
    }
    out.note(fmt::format("{}/{} entries reproduced", ok, diffs.size()));
    check_time(out, t0, kTableTime);
    return out;
}

Check global_row_means() {
    const auto t0 = Clock::now();
    Check out;
    std::vector<RateRow> rows;
    for (const auto& f : fixtures::published_rates()) {
        RateRow r;
        r.key = f.country;
        for (std::size_t i = 0; i < kCells; ++i) r.cells[i] = f.cells[i];
        rows.push_back(r);
    }
    const auto g = global_row(rows);
    std::array<double, 5> got{};
    for (std::size_t i = 0; i < kCells; ++i) got[i] = g.cells[i].value_or(NAN);
    got[4] = g.avg().value_or(NAN);
    std::string shown;
    for (std::size_t i = 0; i < got.size(); ++i) {
        shown += fmt::format("{}{:.3f}", i ? " / " : "", got[i]);
        if (!(std::fabs(got[i] - fixtures::kPrintedGlobal[i]) <= kGlobalSlack + 1e-9))
            out.fail(fmt::format("column {}: {:.4f} vs {:.2f}", i, got[i], fixtures::kPrintedGlobal[i]));
    }
    out.note(shown + fmt::format(" over {} countries", rows.size()));
    check_time(out, t0, kTableTime);
    return out;
}

Check sidak_thresholds() {
    Check out;
    const double standard = sidak_alpha(0.05, 106, SidakMode::Standard);
    const double literal = sidak_alpha(0.05, 106, SidakMode::Literal);
    const double standard_ref = oracle::sidak_standard(0.05, 106);
    const double literal_ref = oracle::sidak_literal(0.05, 106);
    if (std::fabs(standard - 4.838e-4) > kSidakTol) out.fail(fmt::format("standard {:.6e} vs 4.838e-4", standard));
    if (std::fabs(standard - standard_ref) > 1e-12) out.fail(fmt::format("standard vs bisection {:.3e}", standard - standard_ref));
    if (std::fabs(literal - 2.786e-2) > kSidakTol) out.fail(fmt::format("literal {:.8f} vs 2.786e-2 (off by {:.1e})", literal, literal - 2.786e-2));
    if (std::fabs(literal - literal_ref) > 1e-12) out.fail(fmt::format("literal vs bisection {:.3e}", literal - literal_ref));
    out.note(fmt::format("standard {:.6e}, literal {:.8f}", standard, literal));
    return out;
}

Check statistical_oracles() {
    Check out;
    std::mt19937_64 rng(505);
    std::uniform_int_distribution<int> size(2, 12), count(0, 20), denom(1, 20);
    double worst_t = 0, worst_z = 0;
    std::size_t t_checked = 0, z_checked = 0, t_degenerate = 0, z_na = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> xs(size(rng)), ys(size(rng));
        // Per-resolver censored fractions k / n with n <= 20.
        auto fill = [&](std::vector<double>& v) {
            for (auto& e : v) {
                const int n = denom(rng);
                e = double(std::uniform_int_distribution<int>(0, n)(rng)) / n;
            }
        };
        fill(xs);
        fill(ys);
        const auto r = t_test_two_sample(xs, ys);
        const auto s = t_test_two_sample(ys, xs);
        if (s.t != -r.t || s.p != r.p || s.df != r.df) out.fail(fmt::format("t case {}: swap not antisymmetric", i));
        if (r.degenerate) {
            ++t_degenerate;
        } else {
            const auto ref = oracle::welch(xs, ys);
            const double err = std::fabs(r.p - ref.p);
            worst_t = std::max(worst_t, err);
            if (!(err <= kPValueTol)) out.fail(fmt::format("t case {}: p {:.10f} vs {:.10f}", i, r.p, ref.p));
            ++t_checked;
        }

        const std::uint64_t n1 = denom(rng), n2 = denom(rng);
        const std::uint64_t x1 = std::min<std::uint64_t>(count(rng), n1), x2 = std::min<std::uint64_t>(count(rng), n2);
        const double pool = double(x1 + x2) / double(n1 + n2);
        try {
            const auto z = z_test_two_proportion(x1, n1, x2, n2);
            const auto zs = z_test_two_proportion(x2, n2, x1, n1);
            if (zs.z != -z.z || zs.p != z.p) out.fail(fmt::format("z case {}: swap not antisymmetric", i));
            const auto ref = oracle::two_proportion(x1, n1, x2, n2);
            const double err = std::fabs(z.p - ref.p);
            worst_z = std::max(worst_z, err);
            if (!(err <= kPValueTol)) out.fail(fmt::format("z case {}: p {:.10f} vs {:.10f}", i, z.p, ref.p));
            ++z_checked;
        } catch (const NotApplicable&) {
            if (pool != 0 && pool != 1) out.fail(fmt::format("z case {}: NotApplicable with pooled {}", i, pool));
            ++z_na;
        }
    }
    out.note(fmt::format("t {} checked ({} degenerate), worst {:.1e}; z {} checked ({} n/a), worst {:.1e}", t_checked,
                         t_degenerate, worst_t, z_checked, z_na, worst_z));
    return out;
}

Check information_properties() {
    Check out;
    std::mt19937_64 rng(606);
    std::uniform_int_distribution<int> keys(1, 8), weight(0, 50);
    std::size_t kl_checked = 0;
    for (int i = 0; i < 10000; ++i) {
        const int k = keys(rng);
        Counts p, q;
        for (int j = 0; j < k; ++j) {
            p["k" + std::to_string(j)] = weight(rng);
            q["k" + std::to_string(j)] = weight(rng) + 1;
        }
        if (p.begin()->second == 0) p.begin()->second = 1;
        const double s = shannon_entropy(p);
        if (s < 0 || s > std::log2(double(k)) + 1e-12) out.fail(fmt::format("case {}: entropy {} outside [0, log2 {}]", i, s, k));
        const double kl = kl_divergence(p, q);
        if (kl < -1e-12) out.fail(fmt::format("case {}: KL {} < 0", i, kl));
        if (kl_divergence(p, p) != 0.0 && std::fabs(kl_divergence(p, p)) > 1e-15)
            out.fail(fmt::format("case {}: KL(P,P) = {}", i, kl_divergence(p, p)));
        ++kl_checked;
    }
    const double h = shannon_entropy({{"a", 3}, {"b", 1}});
    const double d = kl_divergence({{"a", 3}, {"b", 1}}, {{"a", 1}, {"b", 1}});
    if (std::fabs(h - 0.8113) > kInfoTol) out.fail(fmt::format("entropy fixture {:.6f}", h));
    if (std::fabs(d - 0.1887) > kInfoTol) out.fail(fmt::format("KL fixture {:.6f}", d));
    out.note(fmt::format("{} maps; fixtures {:.4f} and {:.4f} bits", kl_checked, h, d));
    return out;
}

/// Seq -> truth cell.
std::map<std::uint64_t, const sim::TruthCell*> truth_by_seq(const sim::CampaignResult& r) {
    std::map<std::uint64_t, const sim::TruthCell*> m;
    for (const auto& t : r.truth) m[t.task.seq] = &t;
    return m;
}

Check iran_end_to_end() {
    const auto t0 = Clock::now();
    Check out;
    const sim::World world(sim::make_preset("iran", {.seed = 1, .resolvers = 50, .domains = 40}));
    sim::CampaignOptions opts;
    opts.seed = 7;
    const auto res = sim::run_campaign(world, opts);

    const auto cmp = sim::compare_with_truth(res.verdicts, res.truth);
    if (!cmp.exact()) out.fail(fmt::format("{} mismatched, {} missing against ground truth", cmp.mismatched, cmp.missing));
    std::size_t censored = 0, injected = 0;
    const auto truth = truth_by_seq(res);
    const auto v4_injection = IpAddress::parse("10.10.34.35");
    const auto v6_injection = IpAddress::parse("d0::11");
    for (const auto& v : res.verdicts) {
        censored += v.outcome == Outcome::Censored;
        const auto it = truth.find(v.task.seq);
        if (it == truth.end()) continue;
        if ((v.outcome == Outcome::Censored) != (it->second->outcome == Outcome::Censored))
            out.fail("censored cell differs from truth at seq " + std::to_string(v.task.seq));
        if (!it->second->injected) continue;
        ++injected;
        std::optional<FingerprintName> want;
        if (v.answer_ips.count(v4_injection)) want = FingerprintName::IranV4;
        else if (v.answer_ips.count(v6_injection)) want = FingerprintName::IranV6;
        if (!want || !v.fingerprint || v.fingerprint->name != *want)
            out.fail(fmt::format("seq {}: injected answer without the matching fingerprint", v.task.seq));
    }
    if (injected == 0) out.fail("no injected answers");

    // RD clear: the injector stays quiet and 6to4 resolvers answer from cache.
    auto no_rd = opts;
    no_rd.rd_flag = false;
    const auto quiet = sim::run_campaign(world, no_rd);
    std::map<std::string, bool> six_to_four;
    for (const auto& p : quiet.pairs) six_to_four[p.id()] = is_six_to_four(p.v6_kind);
    std::size_t direct = 0, direct_censored = 0;
    for (const auto& v : quiet.verdicts) {
        if (v.task.iface != Interface::V6 || !six_to_four[v.task.pair_id]) continue;
        ++direct;
        direct_censored += v.outcome == Outcome::Censored;
    }
    if (direct == 0) out.fail("no 6to4 probes with RD clear");
    if (direct_censored) out.fail(fmt::format("{} censored 6to4 probes with RD clear", direct_censored));

    const auto analysis = analyze_country(res.verdicts, res.pairs, Axis::Interface);
    const CountryFinding* all = nullptr;
    for (const auto& f : analysis.findings) {
        if (f.country == "IR" && f.stratum == Stratum::All) all = &f;
    }
    if (!all) {
        out.fail("no IR interface finding");
    } else if (!all->significant) {
        out.fail(fmt::format("IR interface difference not significant (p {:.3g}, threshold {:.3g})", all->p_value, all->threshold));
    }

    const auto again = sim::run_campaign(world, opts);
    bool same = again.verdicts.size() == res.verdicts.size();
    for (std::size_t i = 0; same && i < res.verdicts.size(); ++i) same = to_json(again.verdicts[i]) == to_json(res.verdicts[i]);
    if (!same) out.fail("second run with the same seed differs");

    out.note(fmt::format("{} verdicts, {} censored, {} injected; {} 6to4 RD=0 probes, {} censored{}", res.verdicts.size(),
                         censored, injected, direct, direct_censored,
                         all ? fmt::format("; IR v4 {:.2f}% vs v6 {:.2f}%, p {:.2g}", all->rate_a, all->rate_b, all->p_value)
                             : ""));
    check_time(out, t0, kSimTime);
    return out;
}

Check china_aaaa() {
    const auto t0 = Clock::now();
    Check out;
    const auto cfg = sim::make_preset("china-aaaa", {.seed = 1, .resolvers = 0, .domains = 100});
    std::set<std::string> aaaa_only, both;
    for (const auto& pol : cfg.policies) {
        for (const auto& r : pol.blocked) (r.rrclass == sim::RrClass::AAAA ? aaaa_only : both).insert(r.domain);
    }
    for (const auto& d : both) aaaa_only.erase(d);
    if (aaaa_only.size() != 21) out.fail(fmt::format("{} AAAA-only domains in the preset", aaaa_only.size()));

    const sim::World world(cfg);
    const auto res = sim::run_campaign(world, {});
    const auto rates = blocking_rates(res.verdicts, res.pairs);
    const RateRow* cn = nullptr;
    for (const auto& r : rates.rows) {
        if (r.key == "CN") cn = &r;
    }
    if (!cn) {
        out.fail("no CN rate row");
        return out;
    }
    const auto cell = [&](std::size_t i) { return cn->cells[i].value_or(-1); };
    if (!(cell(1) > cell(0))) out.fail(fmt::format("IPv4: AAAA {:.2f}% not above A {:.2f}%", cell(1), cell(0)));
    if (!(cell(3) > cell(2))) out.fail(fmt::format("IPv6: AAAA {:.2f}% not above A {:.2f}%", cell(3), cell(2)));

    const auto domains = analyze_domains(res.verdicts, res.pairs, CategoryProvider{}, Axis::RrType);
    std::set<std::string> found;
    for (const auto& d : domains.domains) {
        if (d.country == "CN" && d.inconsistent) found.insert(d.domain);
    }
    if (found != aaaa_only) {
        std::vector<std::string> extra, missed;
        std::set_difference(found.begin(), found.end(), aaaa_only.begin(), aaaa_only.end(), std::back_inserter(extra));
        std::set_difference(aaaa_only.begin(), aaaa_only.end(), found.begin(), found.end(), std::back_inserter(missed));
        out.fail(fmt::format("{} inconsistent found; {} extra, {} missed", found.size(), extra.size(), missed.size()));
    }
    out.note(fmt::format("CN v4 A {:.2f}% / AAAA {:.2f}%, v6 A {:.2f}% / AAAA {:.2f}%; {} inconsistent domains", cell(0),
                         cell(1), cell(2), cell(3), found.size()));
    check_time(out, t0, kSimTime);
    return out;
}

Check conservatism() {
    Check out;
    std::mt19937_64 rng(909);
    fuzz::RandomProber tls(11);
    std::size_t censored = 0, violations = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto r = fuzz::random_result(rng, i);
        const auto v = classify_result(r, tls, 3);
        censored += v.outcome == Outcome::Censored;
        if (const auto why = fuzz::conservatism_violation(v, 3)) {
            if (violations++ < 5) out.fail(fmt::format("case {}: {}", i, *why));
        }
    }
    if (violations > 5) out.fail(fmt::format("{} violations in total", violations));
    if (censored == 0) out.fail("generator never reached a Censored verdict");
    out.note(fmt::format("10000 cases, {} censored, {} violations", censored, violations));
    return out;
}

Check codec_and_6to4() {
    Check out;
    std::mt19937_64 rng(1010);
    std::size_t bad = 0;
    for (int i = 0; i < 10000; ++i) {
        const Ipv4Address ip(static_cast<std::uint32_t>(rng()));
        const auto label = encode_probe_label(ip, "v6onlyNS.io");
        if (decode_probe_label(label, "v6onlyNS.io") != ip) {
            if (bad++ < 5) out.fail(label + " does not decode back");
        }
    }
    const auto kind = classify_v6_kind(Ipv6Address::parse("2002:0102:0304::"));
    const SixToFour want{Ipv4Address::parse("1.2.3.4"), false};
    if (!std::holds_alternative<SixToFour>(kind) || std::get<SixToFour>(kind) != want)
        out.fail(fmt::format("2002:0102:0304:: classified as {}", v6_kind_name(kind)));
    out.note(fmt::format("10000 round trips, {} failures", bad));
    return out;
}

struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> c = {
        {1, "matrix cardinality", matrix_cardinality},
        {2, "difference table reproduction", difference_tables},
        {3, "global row reproduction", global_row_means},
        {4, "Sidak thresholds", sidak_thresholds},
        {5, "statistical oracle equivalence", statistical_oracles},
        {6, "entropy and KL properties", information_properties},
        {7, "simulated Iran end to end", iran_end_to_end},
        {8, "simulated China AAAA preference", china_aaaa},
        {9, "pipeline conservatism", conservatism},
        {10, "codec and 6to4 invariants", codec_and_6to4},
    };
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dnsgap acceptance checks"};
    int only = 0;
    bool verbose = false;
    app.add_option("--criterion", only, "Run only this criterion (1-10)")->check(CLI::Range(1, 10));
    app.add_flag("-v,--verbose", verbose, "Print every failure note");
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& c : criteria()) {
        if (only && c.id != only) continue;
        const auto t0 = Clock::now();
        Check r;
        try {
            r = c.run();
        } catch (const std::exception& e) {
            r.fail(std::string("exception: ") + e.what());
        }
        const double secs = seconds_since(t0);
        std::cout << fmt::format("criterion {:>2}: {} {} ({:.2f} s)", c.id, r.pass ? "PASS" : "FAIL", c.name, secs);
        if (!r.notes.empty()) std::cout << " | " << r.notes.back();
        std::cout << '\n';
        if (!r.pass || verbose) {
            // The last note is the summary already printed above.
            const std::size_t n = r.notes.empty() ? 0 : r.notes.size() - 1;
            for (std::size_t i = 0; i < (verbose ? n : std::min<std::size_t>(n, 12)); ++i)
                std::cout << "    " << r.notes[i] << '\n';
        }
        failed += !r.pass;
    }
    return failed ? 1 : 0;
}
