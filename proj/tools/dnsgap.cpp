// dnsgap: command-line front end for the measurement pipeline.
//
//   discover -> vet -> probe -> classify -> analyze -> report
//   simulate runs probe and classify against a simulated world.

#include <csignal>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dnsgap/core/records.hpp"
#include "dnsgap/discovery/pcap.hpp"
#include "dnsgap/enrich/mmdb.hpp"
#include "dnsgap/report/commands.hpp"

namespace {

using dnsgap::Path;

std::optional<Path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return Path(s);
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGPIPE, SIG_IGN);
    spdlog::set_default_logger(spdlog::stderr_color_mt("dnsgap"));
    spdlog::set_pattern("%^%l%$: %v");

    CLI::App app{"Dual-stack DNS censorship measurement"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(dnsgap::kToolVersion));

    std::string manifest_path;
    std::uint64_t seed = 0;
    std::string log_level = "info";
    app.add_option("--manifest", manifest_path, "Write the run manifest here");
    auto* seed_opt = app.add_option("--seed", seed, "Seed for ordering, transaction ids and simulation");
    app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "critical", "off"}));

    // discover
    dnsgap::DiscoverOptions d;
    std::string d_nslog, d_pcap, d_cand, d_geo, d_asn, d_conn, d_controls;
    auto* discover = app.add_subcommand("discover", "Correlate probe labels into dual-stack resolver pairs");
    discover->add_option("--zone", d.zone, "Probe zone served by the IPv6-only name server")->required();
    discover->add_option("--nslog", d_nslog, "Name-server query log (JSONL: fqdn, src, ts)");
    discover->add_option("--pcap", d_pcap, "Packet capture taken at the name server");
    discover->add_option("--candidates", d_cand, "IPv4 addresses that were sent probe labels");
    discover->add_option("--geo", d_geo, "Geolocation database (MMDB or CSV)")->envname("DNSGAP_GEO_DB");
    discover->add_option("--asn", d_asn, "ASN database")->envname("DNSGAP_ASN_DB");
    discover->add_option("--conn", d_conn, "Connection-type database")->envname("DNSGAP_CONN_DB");
    discover->add_option("--controls", d_controls, "Control domains for the health check: name addr [addr...]");
    discover->add_option("--max-sharing", d.max_sharing, "Drop IPv6 addresses shared by more candidates")
        ->capture_default_str();
    discover->add_option("--window-ms", d.window_ms)->capture_default_str();
    discover->add_option("--rate", d.rate, "Queries per second")->capture_default_str();
    discover->add_flag("--send-labels", d.send_labels, "Send probe labels to --candidates and stop");
    discover->add_option("--out", d.out, "Output file")->required();

    // vet
    dnsgap::VetCmdOptions v;
    std::string v_resolvers, v_categories, v_rejected;
    auto* vet = app.add_subcommand("vet", "Check that candidate domains resolve and serve valid TLS on both families");
    vet->add_option("--domains", v.domains, "One domain per line")->required();
    vet->add_option("--resolvers", v_resolvers, "Trusted resolvers, one address per line");
    vet->add_option("--trust", v.trust, "PEM bundle or 'system'")->envname("DNSGAP_TRUST")->capture_default_str();
    vet->add_option("--categories", v_categories, "domain,category file")->envname("DNSGAP_CATEGORIES");
    vet->add_option("--window-ms", v.window_ms)->capture_default_str();
    vet->add_option("--rate", v.rate)->capture_default_str();
    vet->add_option("--tls-threads", v.tls_threads)->capture_default_str();
    vet->add_option("--tls-timeout-ms", v.tls_timeout_ms)->capture_default_str();
    vet->add_option("--rejected-out", v_rejected, "Write rejected domains with reasons");
    vet->add_option("--out", v.out)->required();

    // probe
    dnsgap::ProbeCmdOptions p;
    bool p_no_rd = false;
    auto* probe = app.add_subcommand("probe", "Send the A/AAAA x IPv4/IPv6 query matrix");
    probe->add_option("--pairs", p.pairs)->required();
    probe->add_option("--domains", p.domains, "Vetted domains (JSONL)")->required();
    probe->add_option("--rate", p.rate, "Queries per second, 0 for no cap")->capture_default_str();
    probe->add_option("--window-ms", p.window_ms, "Listen window per query")->capture_default_str();
    probe->add_option("--max-in-flight", p.max_in_flight)->capture_default_str();
    probe->add_flag("--no-rd", p_no_rd, "Clear the recursion-desired bit");
    probe->add_option("--out", p.out)->required();

    // classify
    dnsgap::ClassifyCmdOptions c;
    std::string c_fp;
    auto* classify = app.add_subcommand("classify", "Verify answers over TLS and label each probe");
    classify->add_option("--results", c.results)->required();
    classify->add_option("--rounds", c.rounds)->capture_default_str();
    classify->add_option("--trust", c.trust, "PEM bundle or 'system'")->envname("DNSGAP_TRUST")->capture_default_str();
    classify->add_option("--fingerprints", c_fp, "Extra injector patterns: label,prefix[,A|AAAA]");
    classify->add_option("--threads", c.threads)->capture_default_str();
    classify->add_option("--tls-rate", c.tls_rate, "Handshakes per second")->capture_default_str();
    classify->add_option("--tls-timeout-ms", c.tls_timeout_ms)->capture_default_str();
    classify->add_option("--out", c.out)->required();

    // analyze
    dnsgap::AnalyzeCmdOptions a;
    std::string a_categories, a_domains;
    std::size_t a_comparisons = 0;
    auto* analyze = app.add_subcommand("analyze", "Rates, significance tests and diversity metrics");
    analyze->add_option("--verdicts", a.verdicts)->required();
    analyze->add_option("--pairs", a.pairs)->required();
    analyze->add_option("--categories", a_categories)->envname("DNSGAP_CATEGORIES");
    analyze->add_option("--domains", a_domains, "Vetted domains carrying categories");
    analyze->add_option("--axis", a.axis)->check(CLI::IsMember({"rrtype", "interface", "both"}))->capture_default_str();
    analyze->add_option("--alpha", a.alpha)->capture_default_str();
    analyze->add_option("--sidak", a.sidak, "standard|literal")->capture_default_str();
    auto* a_comp_opt = analyze->add_option("--comparisons", a_comparisons, "Override the Sidak comparison count");
    analyze->add_option("--epsilon", a.epsilon, "KL smoothing")->capture_default_str();
    analyze->add_flag("--pooled-t", a.pooled, "Student t with pooled variance");
    analyze->add_option("--out", a.out_dir, "Output directory")->required();

    // report
    dnsgap::ReportCmdOptions r;
    std::string r_verdicts, r_pairs, r_findings, r_rates, r_categories, r_domains, r_out;
    auto* report = app.add_subcommand("report", "Render a table");
    report->add_option("--table", r.table)
        ->check(CLI::IsMember({"rates", "diff", "resolvers", "domains", "conn", "v6kind"}))
        ->capture_default_str();
    report->add_option("--format", r.format, "csv|markdown|text")->capture_default_str();
    report->add_option("--verdicts", r_verdicts);
    report->add_option("--pairs", r_pairs);
    report->add_option("--findings", r_findings, "Country findings JSONL");
    report->add_option("--rates", r_rates, "rates.csv written by analyze");
    report->add_option("--categories", r_categories)->envname("DNSGAP_CATEGORIES");
    report->add_option("--domains", r_domains);
    report->add_option("--axis", r.axis)->check(CLI::IsMember({"rrtype", "interface"}))->capture_default_str();
    report->add_option("--alpha", r.alpha)->capture_default_str();
    report->add_option("--sidak", r.sidak)->capture_default_str();
    report->add_option("--epsilon", r.epsilon)->capture_default_str();
    report->add_flag("--include-ns", r.include_ns, "Keep countries without a significant stratum");
    report->add_option("--out", r_out, "Output file (stdout if omitted)");

    // simulate
    dnsgap::SimulateCmdOptions s;
    std::string s_config, s_preset, s_truth, s_pairs, s_domains, s_results, s_dump, s_nslog;
    bool s_no_rd = false;
    auto* simulate = app.add_subcommand("simulate", "Probe and classify a simulated world");
    simulate->add_option("--config", s_config, "World config (JSON)");
    simulate->add_option("--preset", s_preset, "iran|china-aaaa|thailand-central");
    simulate->add_option("--resolvers", s.resolvers, "Preset size override");
    simulate->add_option("--domain-count", s.domains, "Preset size override");
    simulate->add_option("--out", s.out, "Verdicts JSONL")->required();
    simulate->add_option("--truth", s_truth, "Ground-truth JSONL");
    simulate->add_option("--pairs-out", s_pairs);
    simulate->add_option("--domains-out", s_domains);
    simulate->add_option("--results-out", s_results);
    simulate->add_option("--dump-config", s_dump, "Write the resolved world config");
    simulate->add_option("--nslog-out", s_nslog, "Write the name-server log for --zone");
    simulate->add_option("--zone", s.zone)->capture_default_str();
    simulate->add_flag("--no-rd", s_no_rd);
    simulate->add_flag("--loopback", s.loopback, "Run over loopback UDP sockets in real time");
    simulate->add_option("--time-scale", s.time_scale, "Delay multiplier for --loopback")->capture_default_str();
    simulate->add_option("--window-ms", s.window_ms)->capture_default_str();
    simulate->add_option("--rate", s.rate)->capture_default_str();
    simulate->add_option("--rounds", s.rounds)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    spdlog::set_level(spdlog::level::from_str(log_level));
    dnsgap::CommonOptions common;
    common.manifest = opt_path(manifest_path);
    if (*seed_opt) common.seed = seed;

    try {
        if (*discover) {
            d.nslog = opt_path(d_nslog);
            d.pcap = opt_path(d_pcap);
            d.candidates = opt_path(d_cand);
            d.geo = opt_path(d_geo);
            d.asn = opt_path(d_asn);
            d.conn = opt_path(d_conn);
            d.controls = opt_path(d_controls);
            dnsgap::run_discover(d, common);
        } else if (*vet) {
            v.resolvers = opt_path(v_resolvers);
            v.categories = opt_path(v_categories);
            v.rejected_out = opt_path(v_rejected);
            dnsgap::run_vet(v, common);
        } else if (*probe) {
            p.rd = !p_no_rd;
            dnsgap::run_probe(p, common);
        } else if (*classify) {
            c.fingerprints = opt_path(c_fp);
            dnsgap::run_classify(c, common);
        } else if (*analyze) {
            a.categories = opt_path(a_categories);
            a.domains = opt_path(a_domains);
            if (*a_comp_opt) a.comparisons = a_comparisons;
            dnsgap::run_analyze(a, common);
        } else if (*report) {
            r.verdicts = opt_path(r_verdicts);
            r.pairs = opt_path(r_pairs);
            r.findings = opt_path(r_findings);
            r.rates = opt_path(r_rates);
            r.categories = opt_path(r_categories);
            r.domains = opt_path(r_domains);
            r.out = opt_path(r_out);
            dnsgap::run_report(r, common);
        } else if (*simulate) {
            s.config = opt_path(s_config);
            if (!s_preset.empty()) s.preset = s_preset;
            s.truth = opt_path(s_truth);
            s.pairs_out = opt_path(s_pairs);
            s.domains_out = opt_path(s_domains);
            s.results_out = opt_path(s_results);
            s.dump_config = opt_path(s_dump);
            s.nslog_out = opt_path(s_nslog);
            s.rd = !s_no_rd;
            dnsgap::SimulateSummary summary;
            dnsgap::run_simulate(s, common, &summary);
        }
    } catch (const std::invalid_argument& e) {
        // Covers bad addresses, configs and option values.
        spdlog::error("{}", e.what());
        return 2;
    } catch (const dnsgap::RecordFormatError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const dnsgap::PcapFormatError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const dnsgap::DatasetUnreadable& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 0;
}
