#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/verdict/fingerprint.hpp"

namespace dnsgap {

enum class TlsOutcome {
    Verified,
    /// Handshake or chain/name verification failed, or the host did not
    /// answer. This is the censorship signal.
    Failed,
    /// The prober itself could not run the check (trust store unreadable,
    /// no local route for the family, ...).
    Error,
};
std::string_view to_string(TlsOutcome o);
TlsOutcome parse_tls_outcome(std::string_view s);

struct TlsCheck {
    TlsOutcome outcome = TlsOutcome::Failed;
    std::string detail;
};

/// Verifies that `ip` serves a certificate chain valid for `sni`.
/// Implementations must be safe to call from several threads.
class TlsProber {
public:
    virtual ~TlsProber() = default;
    virtual TlsCheck verify(const IpAddress& ip, const std::string& sni) = 0;
};

struct TlsAttempt {
    int round = 0;
    IpAddress ip;
    TlsOutcome outcome = TlsOutcome::Failed;
    std::string detail;
};

enum class Outcome { Censored, Accessible, Inconclusive };
std::string_view to_string(Outcome o);
Outcome parse_outcome(std::string_view s);

struct CensorVerdict {
    ProbeTask task;
    Outcome outcome = Outcome::Inconclusive;
    /// "no-answer" or "unverifiable" for Inconclusive; empty otherwise.
    std::string reason;
    std::set<IpAddress> answer_ips;
    std::optional<InjectorFingerprint> fingerprint;
    std::vector<TlsAttempt> tls_attempts;
    ProbeStatus probe_status = ProbeStatus::Timeout;
    std::size_t malformed_rdata = 0;
    std::map<std::uint8_t, std::size_t> rcodes;
};

/// Up to `rounds` rounds over the answer set in address order, stopping at
/// the first verified address. Censored only when every address failed in
/// every round; any prober Error leaves the verdict Inconclusive.
CensorVerdict classify_censorship(const ProbeTask& task, const std::set<IpAddress>& ips, TlsProber& tls,
                                  int rounds = 3);

struct ClassifyOptions {
    int rounds = 3;
    unsigned threads = 4;
    std::vector<FingerprintRule> custom_rules;
};

/// Classifies many probe results. Each (address, domain) pair is checked at
/// most once per round no matter how many probes returned it, and each
/// round's handshakes are interleaved across domains. Per-verdict attempt
/// lists are identical to what classify_censorship would record.
class BatchClassifier {
public:
    BatchClassifier(TlsProber& tls, ClassifyOptions options);

    std::vector<CensorVerdict> classify(const std::vector<ProbeResult>& results);
    std::uint64_t handshakes() const { return handshakes_; }

private:
    TlsProber& tls_;
    ClassifyOptions options_;
    std::uint64_t handshakes_ = 0;
};

/// Extraction, classification and fingerprinting for a single result.
CensorVerdict classify_result(const ProbeResult& result, TlsProber& tls, int rounds = 3,
                              const std::vector<FingerprintRule>& custom = {});

}  // namespace dnsgap
