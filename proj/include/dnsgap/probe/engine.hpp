#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/probe/plan.hpp"
#include "dnsgap/probe/transport.hpp"

namespace dnsgap {

struct EngineOptions {
    std::chrono::milliseconds window{2000};
    /// Queries per second over any one-second window; 0 disables the cap.
    double rate = 1000.0;
    std::size_t max_in_flight = 4096;
    /// Extra attempts after a Timeout. Control queries use 1; measurement
    /// queries must keep 0.
    int timeout_retries = 0;
};

struct EngineStats {
    std::uint64_t sent = 0;
    std::uint64_t responses = 0;
    std::uint64_t anomalies = 0;
    std::uint64_t unmatched = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t network_errors = 0;
    std::uint64_t retries = 0;
};

using ResultSink = std::function<void(ProbeResult&&)>;

/// Drives queries through a transport. Every query is held open for the
/// full window so that late authentic answers behind an injected one are
/// captured. Responses are matched on (server, txid) and then checked
/// against the question; a matching id with a different question, or an
/// unparsable payload, is kept as an anomaly. Results reach the sink in
/// completion order.
class ProbeEngine {
public:
    ProbeEngine(UdpTransport& transport, EngineOptions options);

    EngineStats run(TaskSource& tasks, const ResultSink& sink);
    std::vector<ProbeResult> run(std::vector<ProbeTask> tasks);

private:
    UdpTransport& transport_;
    EngineOptions options_;
};

ProbeResult execute_query(const ProbeTask& task, UdpTransport& transport, std::chrono::milliseconds window);

}  // namespace dnsgap
