#include "dnsgap/report/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "dnsgap/core/records.hpp"
#include "dnsgap/core/util.hpp"
#include "dnsgap/discovery/correlate.hpp"
#include "dnsgap/discovery/health.hpp"
#include "dnsgap/discovery/pcap.hpp"
#include "dnsgap/domainvet/vet.hpp"
#include "dnsgap/probe/engine.hpp"
#include "dnsgap/probe/plan.hpp"
#include "dnsgap/report/findings.hpp"
#include "dnsgap/report/render.hpp"
#include "dnsgap/simnet/campaign.hpp"
#include "dnsgap/simnet/presets.hpp"
#include "dnsgap/stats/rates.hpp"
#include "dnsgap/verdict/openssl_prober.hpp"
#include "dnsgap/verdict/records.hpp"

namespace dnsgap {

namespace {

std::string now_iso() { return iso8601_utc(std::chrono::system_clock::now()); }

void require_file(const Path& p, std::string_view flag) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(p, ec)) {
        throw InvalidInput(fmt::format("{}: cannot read '{}'", flag, p.string()));
    }
}

template <typename T>
const T& require(const std::optional<T>& v, std::string_view flag) {
    if (!v) throw InvalidInput(fmt::format("{} is required", flag));
    return *v;
}

void require_out(const Path& p, std::string_view flag) {
    if (p.empty()) throw InvalidInput(fmt::format("{} is required", flag));
}

void finish(RunManifest& m, const CommonOptions& common, const Path& default_path) {
    m.finished_at = now_iso();
    m.write(common.manifest.value_or(default_path));
}

Path sidecar(const Path& out) { return Path(out.string() + ".manifest.json"); }

std::vector<IpAddress> load_addresses(const Path& path) {
    std::vector<IpAddress> out;
    for (const auto& line : read_lines(path)) out.push_back(IpAddress::parse(line));
    return out;
}

/// "name addr [addr...]" per line.
std::pair<std::vector<std::string>, ControlAnswers> load_controls(const Path& path) {
    std::vector<std::string> names;
    ControlAnswers expected;
    for (const auto& line : read_lines(path)) {
        std::istringstream in(line);
        std::string name, addr;
        in >> name;
        auto& exp = expected[name];
        if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
        while (in >> addr) {
            const auto ip = IpAddress::parse(addr);
            if (ip.is_v4()) exp.a.insert(ip.v4());
            else exp.aaaa.insert(ip.v6());
        }
        if (exp.a.empty() && exp.aaaa.empty()) {
            throw InvalidInput(fmt::format("{}: control '{}' lists no addresses", path.string(), name));
        }
    }
    if (names.empty()) throw InvalidInput(path.string() + ": no controls");
    return {names, expected};
}

CategoryProvider load_categories(const std::optional<Path>& file, const std::optional<Path>& vetted) {
    if (file) {
        require_file(*file, "--categories");
        return CategoryProvider::open(*file);
    }
    std::map<std::string, std::string> m;
    if (vetted) {
        require_file(*vetted, "--domains");
        for (const auto& d : read_vetted(*vetted)) {
            if (d.category) m[d.name] = *d.category;
        }
    }
    return CategoryProvider(std::move(m));
}

std::vector<Axis> parse_axes(const std::string& s) {
    if (s == "both") return {Axis::RrType, Axis::Interface};
    try {
        return {parse_axis(s)};
    } catch (const std::invalid_argument&) {
        throw InvalidInput("--axis must be rrtype, interface or both");
    }
}

std::vector<ProbeResult> read_results(const Path& path) {
    std::vector<ProbeResult> out;
    read_jsonl(path, [&](const json& j) { out.push_back(probe_result_from_json(j)); });
    return out;
}

void add_input(RunManifest& m, const Path& p, std::string_view flag) {
    require_file(p, flag);
    m.add_input(std::string(flag.substr(flag.find_first_not_of('-'))), p);
}

void add_trust(RunManifest& m, const std::string& trust) {
    if (trust == "system") {
        m.add_dataset("trust", "system");
        return;
    }
    require_file(trust, "--trust");
    m.add_dataset("trust", sha256_file(trust));
}

}  // namespace

void write_table_file(const Path& path, const std::string& body, const std::string& checksum, bool markdown) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (markdown) out << "<!-- manifest: " << checksum << " -->\n";
    else out << "# manifest: " << checksum << "\n";
    out << body;
}

RunManifest run_discover(const DiscoverOptions& opts, const CommonOptions& common) {
    if (opts.zone.empty()) throw InvalidInput("--zone is required");
    require_out(opts.out, "--out");
    RunManifest m("discover");
    m.started_at = now_iso();
    m.tunables = {{"zone", opts.zone},           {"max_sharing", opts.max_sharing}, {"window_ms", opts.window_ms},
                  {"rate", opts.rate},           {"seed", common.seed.value_or(0)}, {"send_labels", opts.send_labels},
                  {"health", bool(opts.controls)}};
    const HealthOptions health{std::chrono::milliseconds(opts.window_ms), opts.rate, common.seed.value_or(0)};

    if (opts.send_labels) {
        const auto& cand_path = require(opts.candidates, "--candidates");
        add_input(m, cand_path, "--candidates");
        std::vector<Ipv4Address> cands;
        for (const auto& line : read_lines(cand_path)) cands.push_back(Ipv4Address::parse(line));
        const auto checksum = m.checksum();
        SocketTransport transport;
        const auto results = send_probe_labels(cands, opts.zone, transport, health);
        JsonlWriter w(opts.out, checksum);
        for (const auto& r : results) w.write(to_json(r));
        spdlog::info("sent {} probe labels under {}", results.size(), opts.zone);
        finish(m, common, sidecar(opts.out));
        return m;
    }

    if (bool(opts.nslog) == bool(opts.pcap)) throw InvalidInput("exactly one of --nslog or --pcap is required");
    const auto& geo_path = require(opts.geo, "--geo");
    const Path log_path = opts.nslog ? *opts.nslog : *opts.pcap;
    add_input(m, log_path, opts.nslog ? "--nslog" : "--pcap");

    std::optional<std::set<Ipv4Address>> solicited;
    if (opts.candidates) {
        add_input(m, *opts.candidates, "--candidates");
        solicited.emplace();
        for (const auto& line : read_lines(*opts.candidates)) solicited->insert(Ipv4Address::parse(line));
    }

    require_file(geo_path, "--geo");
    const auto geo = GeoProvider::open(geo_path);
    m.add_dataset("geo", geo.checksum());
    std::optional<AsnProvider> asn;
    std::optional<ConnTypeProvider> conn;
    if (opts.asn) {
        require_file(*opts.asn, "--asn");
        asn.emplace(AsnProvider::open(*opts.asn));
        m.add_dataset("asn", asn->checksum());
    }
    if (opts.conn) {
        require_file(*opts.conn, "--conn");
        conn.emplace(ConnTypeProvider::open(*opts.conn));
        m.add_dataset("conn", conn->checksum());
    }
    std::vector<std::string> controls;
    ControlAnswers expected;
    if (opts.controls) {
        add_input(m, *opts.controls, "--controls");
        std::tie(controls, expected) = load_controls(*opts.controls);
    }
    const auto checksum = m.checksum();

    const auto log = opts.nslog ? read_ns_log(*opts.nslog) : extract_ns_log_from_pcap(*opts.pcap, opts.zone);
    Correlator correlator(opts.zone, solicited);
    for (const auto& e : log) correlator.add(e);
    const auto& cs = correlator.stats();
    spdlog::info("log entries {}, malformed {}, outside zone {}, unsolicited {}, candidates {}", cs.entries,
                 cs.malformed, cs.outside_zone, cs.unsolicited, cs.candidates);

    const auto pruned = prune_infrastructure(correlator.candidates(), opts.max_sharing);
    spdlog::info("{} candidates after removing shared IPv6 addresses", pruned.size());
    GeoFilterStats gs;
    auto pairs = prune_geo_mismatch(pruned, {&geo, asn ? &*asn : nullptr, conn ? &*conn : nullptr}, &gs);
    spdlog::info("geo filter: kept {}, non-routable {}, unknown {}, mismatched {}", gs.kept, gs.non_routable,
                 gs.unknown_geo, gs.mismatched);

    if (opts.controls && !pairs.empty()) {
        SocketTransport transport;
        const auto health_results = verify_pairs_health(pairs, controls, expected, transport, health);
        std::vector<ResolverPair> stable;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            if (health_results[i].stable) stable.push_back(pairs[i]);
            else spdlog::debug("{} unstable: {}", pairs[i].id(), health_results[i].reason);
        }
        spdlog::info("health check: {} of {} stable", stable.size(), pairs.size());
        pairs = std::move(stable);
    }
    write_pairs(opts.out, pairs, checksum);
    spdlog::info("wrote {} resolver pairs to {}", pairs.size(), opts.out.string());
    finish(m, common, sidecar(opts.out));
    return m;
}

RunManifest run_vet(const VetCmdOptions& opts, const CommonOptions& common) {
    require_out(opts.out, "--out");
    RunManifest m("vet");
    m.started_at = now_iso();
    add_input(m, opts.domains, "--domains");
    std::vector<IpAddress> trusted = default_trusted_resolvers();
    if (opts.resolvers) {
        add_input(m, *opts.resolvers, "--resolvers");
        trusted = load_addresses(*opts.resolvers);
        if (trusted.empty()) throw InvalidInput("--resolvers lists no addresses");
    }
    const auto categories = load_categories(opts.categories, std::nullopt);
    if (opts.categories) m.add_dataset("category", categories.checksum());
    add_trust(m, opts.trust);
    m.tunables = {{"window_ms", opts.window_ms},       {"rate", opts.rate},
                  {"tls_threads", opts.tls_threads},   {"tls_timeout_ms", opts.tls_timeout_ms},
                  {"seed", common.seed.value_or(0)}};
    const auto checksum = m.checksum();

    const auto names = read_lines(opts.domains);
    TlsProberOptions tls_opts;
    tls_opts.trust = opts.trust;
    tls_opts.timeout = std::chrono::milliseconds(opts.tls_timeout_ms);
    OpenSslProber tls(tls_opts);
    SocketTransport transport;
    VetOptions vo;
    vo.window = std::chrono::milliseconds(opts.window_ms);
    vo.rate = opts.rate;
    vo.tls_threads = opts.tls_threads;
    vo.seed = common.seed.value_or(0);
    auto report = vet_domains(names, trusted, transport, tls, vo);

    JsonlWriter w(opts.out, checksum);
    for (auto& d : report.vetted) {
        d.category = categories.category(d.name);
        w.write(to_json(d));
    }
    if (opts.rejected_out) {
        JsonlWriter rw(*opts.rejected_out, checksum);
        for (const auto& [name, r] : report.rejected) {
            rw.write({{"domain", name}, {"reason", std::string(to_string(r.reason))}, {"detail", r.detail}});
        }
        for (const auto& name : report.unreachable) {
            rw.write({{"domain", name}, {"reason", "Unreachable"}, {"detail", "no trusted resolver answered"}});
        }
    }
    spdlog::info("vetted {} of {} domains (invalid name {}, no A {}, no AAAA {}, TLS {}, unreachable {})",
                 report.vetted.size(), report.total(), report.count(RejectReason::InvalidName),
                 report.count(RejectReason::NoA), report.count(RejectReason::NoAAAA),
                 report.count(RejectReason::TlsInvalid), report.unreachable.size());
    finish(m, common, sidecar(opts.out));
    return m;
}

RunManifest run_probe(const ProbeCmdOptions& opts, const CommonOptions& common) {
    require_out(opts.out, "--out");
    if (opts.window_ms <= 0) throw InvalidInput("--window-ms must be positive");
    if (opts.rate < 0) throw InvalidInput("--rate must not be negative");
    RunManifest m("probe");
    m.started_at = now_iso();
    add_input(m, opts.pairs, "--pairs");
    add_input(m, opts.domains, "--domains");
    const auto seed = common.seed.value_or(0);
    m.tunables = {{"rate", opts.rate},
                  {"window_ms", opts.window_ms},
                  {"rd", opts.rd},
                  {"max_in_flight", opts.max_in_flight},
                  {"seed", seed},
                  {"timeout_retries", 0}};
    const auto checksum = m.checksum();

    const auto pairs = read_pairs(opts.pairs);
    std::vector<std::string> names;
    for (const auto& d : read_vetted(opts.domains)) names.push_back(d.name);
    if (pairs.empty() || names.empty()) throw InvalidInput("probe needs at least one pair and one domain");

    MatrixPlan plan(pairs, names, seed, opts.rd);
    spdlog::info("probing {} tasks ({} pairs x {} domains x 4)", plan.size(), pairs.size(), names.size());
    SocketTransport transport;
    EngineOptions eo;
    eo.window = std::chrono::milliseconds(opts.window_ms);
    eo.rate = opts.rate;
    eo.max_in_flight = opts.max_in_flight;
    ProbeEngine engine(transport, eo);
    MatrixTaskSource source(plan);
    JsonlWriter w(opts.out, checksum);
    const auto stats = engine.run(source, [&](ProbeResult&& r) { w.write(to_json(r)); });
    spdlog::info("sent {}, responses {}, anomalies {}, timeouts {}, network errors {}", stats.sent, stats.responses,
                 stats.anomalies, stats.timeouts, stats.network_errors);
    finish(m, common, sidecar(opts.out));
    return m;
}

RunManifest run_classify(const ClassifyCmdOptions& opts, const CommonOptions& common) {
    require_out(opts.out, "--out");
    if (opts.rounds < 1) throw InvalidInput("--rounds must be at least 1");
    RunManifest m("classify");
    m.started_at = now_iso();
    add_input(m, opts.results, "--results");
    std::vector<FingerprintRule> rules;
    if (opts.fingerprints) {
        add_input(m, *opts.fingerprints, "--fingerprints");
        rules = load_fingerprint_rules(*opts.fingerprints);
    }
    add_trust(m, opts.trust);
    m.tunables = {{"rounds", opts.rounds},
                  {"threads", opts.threads},
                  {"tls_rate", opts.tls_rate},
                  {"tls_timeout_ms", opts.tls_timeout_ms}};
    const auto checksum = m.checksum();

    const auto results = read_results(opts.results);
    TlsProberOptions tls_opts;
    tls_opts.trust = opts.trust;
    tls_opts.rate = opts.tls_rate;
    tls_opts.timeout = std::chrono::milliseconds(opts.tls_timeout_ms);
    OpenSslProber tls(tls_opts);
    BatchClassifier classifier(tls, {opts.rounds, opts.threads, rules});
    const auto verdicts = classifier.classify(results);

    JsonlWriter w(opts.out, checksum);
    std::array<std::size_t, 3> tally{};
    for (const auto& v : verdicts) {
        ++tally[static_cast<std::size_t>(v.outcome)];
        w.write(to_json(v));
    }
    spdlog::info("{} verdicts: censored {}, accessible {}, inconclusive {}; {} handshakes", verdicts.size(), tally[0],
                 tally[1], tally[2], classifier.handshakes());
    finish(m, common, sidecar(opts.out));
    return m;
}

RunManifest run_analyze(const AnalyzeCmdOptions& opts, const CommonOptions& common) {
    if (opts.out_dir.empty()) throw InvalidInput("--out is required");
    RunManifest m("analyze");
    m.started_at = now_iso();
    add_input(m, opts.verdicts, "--verdicts");
    add_input(m, opts.pairs, "--pairs");
    if (opts.domains) add_input(m, *opts.domains, "--domains");
    const auto categories = load_categories(opts.categories, opts.domains);
    if (opts.categories) m.add_dataset("category", categories.checksum());
    const auto axes = parse_axes(opts.axis);

    AnalysisOptions ao;
    ao.alpha = opts.alpha;
    try {
        ao.sidak = parse_sidak_mode(opts.sidak);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    ao.comparisons = opts.comparisons;
    ao.epsilon = opts.epsilon;
    ao.pooled_t = opts.pooled;
    if (!(ao.alpha > 0 && ao.alpha < 1)) throw InvalidInput("--alpha must lie in (0, 1)");
    if (ao.epsilon < 0) throw InvalidInput("--epsilon must not be negative");
    m.tunables = {{"axis", opts.axis},
                  {"alpha", ao.alpha},
                  {"sidak_mode", std::string(to_string(ao.sidak))},
                  {"comparisons", ao.comparisons ? json(*ao.comparisons) : json(nullptr)},
                  {"epsilon", ao.epsilon},
                  {"pooled_t", ao.pooled_t}};
    const auto checksum = m.checksum();

    const auto verdicts = read_verdicts(opts.verdicts);
    const auto pairs = read_pairs(opts.pairs);
    std::filesystem::create_directories(opts.out_dir);
    const auto& dir = opts.out_dir;

    const auto rates = blocking_rates(verdicts, pairs);
    if (rates.unmatched_verdicts) spdlog::warn("{} verdicts name no known pair", rates.unmatched_verdicts);
    write_table_file(dir / "rates.csv", render_rate_table(rates, TableFormat::Csv), checksum);
    write_table_file(dir / "conn_type.csv", render_rate_rows(rates.by_conn_type, TableFormat::Csv, "country/conn_type"),
                     checksum);
    write_table_file(dir / "v6_kind.csv", render_rate_rows(rates.by_v6_kind, TableFormat::Csv, "country/v6_kind"),
                     checksum);

    for (const auto axis : axes) {
        const std::string tag(to_string(axis));
        const auto country = analyze_country(verdicts, pairs, axis, ao);
        {
            JsonlWriter w(dir / ("country-" + tag + ".jsonl"), checksum);
            for (const auto& f : country.findings) w.write(to_json(f));
            JsonlWriter s(dir / ("skipped-" + tag + ".jsonl"), checksum);
            for (const auto& k : country.skipped) s.write(to_json(k));
        }
        write_table_file(dir / ("diff-" + tag + ".csv"),
                         render_diff_table(country.findings, axis, TableFormat::Csv, true), checksum);
        const auto significant = std::count_if(country.findings.begin(), country.findings.end(),
                                               [](const CountryFinding& f) { return f.significant; });
        spdlog::info("{}: {} country findings, {} significant at {:.3g}", tag, country.findings.size(), significant,
                     country.threshold);

        const auto resolvers = analyze_resolvers(verdicts, pairs, axis, ao);
        {
            JsonlWriter w(dir / ("resolvers-" + tag + ".jsonl"), checksum);
            for (const auto& r : resolvers.resolvers) w.write(to_json(r));
            JsonlWriter d(dir / ("diversity-" + tag + ".jsonl"), checksum);
            for (const auto& r : resolvers.diversity) d.write(to_json(r));
        }
        write_table_file(dir / ("resolvers-" + tag + ".csv"), render_resolver_table(resolvers, TableFormat::Csv),
                         checksum);

        const auto domains = analyze_domains(verdicts, pairs, categories, axis, ao);
        {
            JsonlWriter w(dir / ("domains-" + tag + ".jsonl"), checksum);
            for (const auto& d : domains.domains) w.write(to_json(d));
            JsonlWriter d(dir / ("domain-divergence-" + tag + ".jsonl"), checksum);
            for (const auto& x : domains.divergence) d.write(to_json(x));
        }
        write_table_file(dir / ("domains-" + tag + ".csv"), render_domain_table(domains, TableFormat::Csv), checksum);
    }
    finish(m, common, dir / "manifest.json");
    return m;
}

RunManifest run_report(const ReportCmdOptions& opts, const CommonOptions& common) {
    TableFormat format;
    try {
        format = parse_table_format(opts.format);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    RunManifest m("report");
    m.started_at = now_iso();
    AnalysisOptions ao;
    ao.alpha = opts.alpha;
    ao.epsilon = opts.epsilon;
    try {
        ao.sidak = parse_sidak_mode(opts.sidak);
    } catch (const std::invalid_argument& e) {
        throw InvalidInput(e.what());
    }
    const auto axis_list = parse_axes(opts.axis);
    if (axis_list.size() != 1) throw InvalidInput("report takes a single --axis");
    const Axis axis = axis_list.front();
    m.tunables = {{"table", opts.table},   {"format", opts.format},
                  {"axis", opts.axis},     {"alpha", ao.alpha},
                  {"sidak_mode", std::string(to_string(ao.sidak))},
                  {"epsilon", ao.epsilon}, {"include_ns", opts.include_ns}};

    auto verdict_inputs = [&]() -> std::pair<std::vector<CensorVerdict>, std::vector<ResolverPair>> {
        const auto& v = require(opts.verdicts, "--verdicts");
        const auto& p = require(opts.pairs, "--pairs");
        add_input(m, v, "--verdicts");
        add_input(m, p, "--pairs");
        return {read_verdicts(v), read_pairs(p)};
    };

    std::string body;
    const auto& t = opts.table;
    if (t == "rates" && opts.rates) {
        add_input(m, *opts.rates, "--rates");
        std::ifstream in(*opts.rates);
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            body = render_rate_table(parse_rate_table_csv(ss.str()), format);
        } catch (const std::invalid_argument& e) {
            throw InvalidInput(opts.rates->string() + ": " + e.what());
        }
    } else if (t == "rates" || t == "conn" || t == "v6kind") {
        const auto [verdicts, pairs] = verdict_inputs();
        const auto rates = blocking_rates(verdicts, pairs);
        if (t == "rates") body = render_rate_table(rates, format);
        else if (t == "conn") body = render_rate_rows(rates.by_conn_type, format, "country/conn_type");
        else body = render_rate_rows(rates.by_v6_kind, format, "country/v6_kind");
    } else if (t == "diff") {
        std::vector<CountryFinding> findings;
        if (opts.findings) {
            add_input(m, *opts.findings, "--findings");
            findings = read_country_findings(*opts.findings);
        } else {
            const auto [verdicts, pairs] = verdict_inputs();
            findings = analyze_country(verdicts, pairs, axis, ao).findings;
        }
        body = render_diff_table(findings, axis, format, opts.include_ns);
    } else if (t == "resolvers") {
        const auto [verdicts, pairs] = verdict_inputs();
        body = render_resolver_table(analyze_resolvers(verdicts, pairs, axis, ao), format);
    } else if (t == "domains") {
        const auto [verdicts, pairs] = verdict_inputs();
        if (opts.domains) add_input(m, *opts.domains, "--domains");
        const auto categories = load_categories(opts.categories, opts.domains);
        if (opts.categories) m.add_dataset("category", categories.checksum());
        body = render_domain_table(analyze_domains(verdicts, pairs, categories, axis, ao), format);
    } else {
        throw InvalidInput("--table must be rates, diff, resolvers, domains, conn or v6kind");
    }

    const auto checksum = m.checksum();
    if (opts.out) {
        write_table_file(*opts.out, body, checksum, format == TableFormat::Markdown);
        finish(m, common, sidecar(*opts.out));
    } else {
        std::cout << body << std::flush;
        if (common.manifest) finish(m, common, *common.manifest);
    }
    return m;
}

RunManifest run_simulate(const SimulateCmdOptions& opts, const CommonOptions& common, SimulateSummary* summary) {
    require_out(opts.out, "--out");
    if (bool(opts.config) == bool(opts.preset)) throw InvalidInput("exactly one of --config or --preset is required");
    if (opts.rounds < 1) throw InvalidInput("--rounds must be at least 1");
    RunManifest m("simulate");
    m.started_at = now_iso();

    sim::SimWorldConfig config;
    if (opts.config) {
        add_input(m, *opts.config, "--config");
        config = sim::load_config(*opts.config);
        if (common.seed) config.seed = *common.seed;
    } else {
        sim::PresetOptions po;
        po.seed = common.seed.value_or(po.seed);
        po.resolvers = opts.resolvers;
        po.domains = opts.domains;
        config = sim::make_preset(*opts.preset, po);
    }
    const sim::World world(config);
    m.add_dataset("world", sha256_hex(sim::to_json(config).dump()));
    m.tunables = {{"preset", opts.preset ? json(*opts.preset) : json(nullptr)},
                  {"resolvers", opts.resolvers},
                  {"domains", opts.domains},
                  {"seed", config.seed},
                  {"rd", opts.rd},
                  {"loopback", opts.loopback},
                  {"time_scale", opts.time_scale},
                  {"window_ms", opts.window_ms},
                  {"rate", opts.rate},
                  {"rounds", opts.rounds},
                  {"zone", opts.zone}};
    const auto checksum = m.checksum();
    if (opts.dump_config) sim::save_config(*opts.dump_config, config);

    sim::CampaignOptions co;
    co.seed = config.seed;
    co.rd_flag = opts.rd;
    co.engine.window = std::chrono::milliseconds(opts.window_ms);
    co.engine.rate = opts.rate;
    co.rounds = opts.rounds;
    co.loopback = opts.loopback;
    co.time_scale = opts.time_scale;
    const auto result = sim::run_campaign(world, co);

    {
        JsonlWriter w(opts.out, checksum);
        for (const auto& v : result.verdicts) w.write(to_json(v));
    }
    if (opts.truth) {
        JsonlWriter w(*opts.truth, checksum);
        for (const auto& c : result.truth) w.write(sim::to_json(c));
    }
    if (opts.pairs_out) write_pairs(*opts.pairs_out, result.pairs, checksum);
    if (opts.domains_out) {
        JsonlWriter w(*opts.domains_out, checksum);
        for (const auto& d : result.domains) w.write(to_json(d));
    }
    if (opts.results_out) {
        JsonlWriter w(*opts.results_out, checksum);
        for (const auto& r : result.results) w.write(to_json(r));
    }
    if (opts.nslog_out) {
        JsonlWriter w(*opts.nslog_out, checksum);
        for (const auto& e : world.ns_log(opts.zone)) w.write(to_json(e));
    }

    const auto cmp = sim::compare_with_truth(result.verdicts, result.truth);
    spdlog::info("{} probes over {} pairs x {} domains ({} rejected); truth matched {}, mismatched {}, missing {}",
                 result.verdicts.size(), result.pairs.size(), result.domains.size(), result.rejected.size(),
                 cmp.matched, cmp.mismatched, cmp.missing);
    for (const auto& ex : cmp.examples) spdlog::warn("truth mismatch: {}", ex);
    if (summary) *summary = {result.verdicts.size(), cmp.matched, cmp.mismatched, cmp.missing};
    finish(m, common, sidecar(opts.out));
    return m;
}

}  // namespace dnsgap
