#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dnsgap/report/manifest.hpp"

namespace dnsgap {

/// Bad arguments or unreadable inputs; the CLI maps this to exit code 2.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

using Path = std::filesystem::path;

struct CommonOptions {
    /// Where to write the run manifest; default `<primary output>.manifest.json`.
    std::optional<Path> manifest;
    /// Unset means the stage default (0, or the world's own seed for simulate).
    std::optional<std::uint64_t> seed;
};

struct DiscoverOptions {
    std::string zone;
    std::optional<Path> nslog;
    std::optional<Path> pcap;
    /// Addresses that were sent probe labels; decoded addresses outside the
    /// list are dropped.
    std::optional<Path> candidates;
    std::optional<Path> geo, asn, conn;
    /// Lines "name addr [addr...]"; enables the live health check.
    std::optional<Path> controls;
    std::size_t max_sharing = 1;
    int window_ms = 2000;
    double rate = 1000.0;
    /// Only send probe labels to the candidates and write the probe results.
    bool send_labels = false;
    Path out;
};

struct VetCmdOptions {
    Path domains;
    /// One trusted resolver address per line; built-in public resolvers otherwise.
    std::optional<Path> resolvers;
    std::string trust = "system";
    std::optional<Path> categories;
    int window_ms = 2000;
    double rate = 100.0;
    unsigned tls_threads = 4;
    int tls_timeout_ms = 10000;
    Path out;
    std::optional<Path> rejected_out;
};

struct ProbeCmdOptions {
    Path pairs;
    Path domains;
    double rate = 1000.0;
    int window_ms = 2000;
    bool rd = true;
    std::size_t max_in_flight = 4096;
    Path out;
};

struct ClassifyCmdOptions {
    Path results;
    int rounds = 3;
    std::string trust = "system";
    std::optional<Path> fingerprints;
    unsigned threads = 4;
    double tls_rate = 50.0;
    int tls_timeout_ms = 10000;
    Path out;
};

struct AnalyzeCmdOptions {
    Path verdicts;
    Path pairs;
    std::optional<Path> categories;
    /// Vetted domains whose categories are used when no category file is given.
    std::optional<Path> domains;
    /// "rrtype", "interface" or "both".
    std::string axis = "both";
    double alpha = 0.05;
    std::string sidak = "standard";
    std::optional<std::size_t> comparisons;
    double epsilon = 0.0;
    bool pooled = false;
    Path out_dir;
};

struct ReportCmdOptions {
    /// rates | diff | resolvers | domains | conn | v6kind
    std::string table = "rates";
    std::string format = "text";
    std::optional<Path> verdicts;
    std::optional<Path> pairs;
    /// Country findings JSONL for the diff table.
    std::optional<Path> findings;
    /// A rates CSV written by `analyze`, for the rates table.
    std::optional<Path> rates;
    std::optional<Path> categories;
    std::optional<Path> domains;
    std::string axis = "rrtype";
    double alpha = 0.05;
    std::string sidak = "standard";
    double epsilon = 0.0;
    bool include_ns = false;
    /// stdout when absent.
    std::optional<Path> out;
};

struct SimulateCmdOptions {
    std::optional<Path> config;
    std::optional<std::string> preset;
    std::size_t resolvers = 0;
    std::size_t domains = 0;
    Path out;
    std::optional<Path> truth;
    std::optional<Path> pairs_out;
    std::optional<Path> domains_out;
    std::optional<Path> results_out;
    std::optional<Path> dump_config;
    /// Writes the name-server log a discovery run would see for this zone.
    std::optional<Path> nslog_out;
    std::string zone = "probe.example";
    bool rd = true;
    bool loopback = false;
    double time_scale = 1.0;
    int window_ms = 2000;
    double rate = 1000.0;
    int rounds = 3;
};

struct SimulateSummary {
    std::size_t probes = 0;
    std::size_t matched = 0;
    std::size_t mismatched = 0;
    std::size_t missing = 0;
};

/// Each command validates its inputs (InvalidInput), writes its outputs with
/// the manifest checksum embedded, writes the manifest, and returns it.
RunManifest run_discover(const DiscoverOptions& opts, const CommonOptions& common);
RunManifest run_vet(const VetCmdOptions& opts, const CommonOptions& common);
RunManifest run_probe(const ProbeCmdOptions& opts, const CommonOptions& common);
RunManifest run_classify(const ClassifyCmdOptions& opts, const CommonOptions& common);
RunManifest run_analyze(const AnalyzeCmdOptions& opts, const CommonOptions& common);
RunManifest run_report(const ReportCmdOptions& opts, const CommonOptions& common);
RunManifest run_simulate(const SimulateCmdOptions& opts, const CommonOptions& common,
                         SimulateSummary* summary = nullptr);

/// Writes `body` to `path` preceded by a manifest comment line in the
/// syntax of the format ("# manifest: <sha>" or an HTML comment for markdown).
void write_table_file(const Path& path, const std::string& body, const std::string& checksum,
                      bool markdown = false);

}  // namespace dnsgap
