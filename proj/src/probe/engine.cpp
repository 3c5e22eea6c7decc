#include "dnsgap/probe/engine.hpp"

#include <deque>
#include <map>
#include <unordered_map>

#include "dnsgap/core/util.hpp"
#include "dnsgap/probe/dns_message.hpp"

namespace dnsgap {

namespace {

using Clock = UdpTransport::Clock;

struct InFlight {
    ProbeResult result;
    dns::Question question;
    Clock::time_point sent_at;
    Clock::time_point expires;
    int attempts = 0;
};

struct Key {
    IpAddress server;
    std::uint16_t txid;
    bool operator==(const Key&) const = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const { return std::hash<IpAddress>{}(k.server) * 31 + k.txid; }
};

double offset_ms(Clock::time_point from, Clock::time_point to) {
    return std::chrono::duration<double, std::milli>(to - from).count();
}

}  // namespace

ProbeEngine::ProbeEngine(UdpTransport& transport, EngineOptions options)
    : transport_(transport), options_(options) {}

EngineStats ProbeEngine::run(TaskSource& tasks, const ResultSink& sink) {
    EngineStats stats;
    SlidingWindowLimiter limiter(options_.rate);
    std::unordered_map<Key, InFlight, KeyHash> in_flight;
    // Expiry order equals send order because the window is constant.
    std::deque<Key> expiry_queue;
    std::deque<std::pair<ProbeTask, int>> retry_queue;
    bool source_done = false;

    auto next_task = [&]() -> std::optional<std::pair<ProbeTask, int>> {
        if (!retry_queue.empty()) {
            auto t = std::move(retry_queue.front());
            retry_queue.pop_front();
            return t;
        }
        if (source_done) return std::nullopt;
        auto t = tasks.next();
        if (!t) {
            source_done = true;
            return std::nullopt;
        }
        return std::make_pair(std::move(*t), 0);
    };

    std::optional<std::pair<ProbeTask, int>> pending = next_task();

    auto finish = [&](InFlight&& f) {
        if (f.result.status != ProbeStatus::NetworkError) {
            if (!f.result.responses.empty()) {
                f.result.status = ProbeStatus::Answered;
            } else if (f.attempts < options_.timeout_retries) {
                ++stats.retries;
                ProbeTask again = f.result.task;
                again.txid = static_cast<std::uint16_t>(hash_combine(again.txid, f.attempts + 1) >> 48);
                retry_queue.emplace_back(std::move(again), f.attempts + 1);
                if (!pending) pending = next_task();
                return;
            } else {
                f.result.status = ProbeStatus::Timeout;
                ++stats.timeouts;
            }
        }
        sink(std::move(f.result));
    };

    auto expire = [&](Clock::time_point now) {
        while (!expiry_queue.empty()) {
            auto it = in_flight.find(expiry_queue.front());
            if (it == in_flight.end()) {
                expiry_queue.pop_front();
                continue;
            }
            if (it->second.expires > now) break;
            InFlight f = std::move(it->second);
            in_flight.erase(it);
            expiry_queue.pop_front();
            finish(std::move(f));
        }
    };

    while (pending || !in_flight.empty()) {
        auto now = transport_.now();
        expire(now);

        // Send as many as the rate cap and in-flight limit allow.
        while (pending && in_flight.size() < options_.max_in_flight && limiter.try_acquire(now)) {
            auto [task, attempts] = std::move(*pending);
            pending = next_task();
            Key key{task.server, task.txid};
            while (in_flight.count(key)) ++key.txid;
            task.txid = key.txid;

            InFlight f;
            f.question = {task.domain, static_cast<std::uint16_t>(task.rrtype), dns::kClassIn};
            f.attempts = attempts;
            f.result.task = std::move(task);
            const auto wire = dns::build_query(key.txid, f.question.name, f.question.qtype, f.result.task.rd_flag);
            try {
                transport_.send(key.server, wire);
            } catch (const NetworkError& e) {
                ++stats.network_errors;
                f.result.status = ProbeStatus::NetworkError;
                f.result.error = e.what();
                finish(std::move(f));
                continue;
            }
            ++stats.sent;
            f.sent_at = transport_.now();
            f.expires = f.sent_at + options_.window;
            in_flight.emplace(key, std::move(f));
            expiry_queue.push_back(key);
        }

        if (!pending && in_flight.empty()) break;

        Clock::time_point deadline = Clock::time_point::max();
        if (!expiry_queue.empty()) {
            if (auto it = in_flight.find(expiry_queue.front()); it != in_flight.end()) deadline = it->second.expires;
            else deadline = now;
        }
        if (pending && in_flight.size() < options_.max_in_flight) {
            deadline = std::min(deadline, limiter.next_allowed(now));
        }

        auto dgram = transport_.receive(deadline);
        if (!dgram) continue;

        std::uint16_t id = 0;
        if (!dns::peek_id(dgram->payload, id)) {
            ++stats.unmatched;
            continue;
        }
        auto it = in_flight.find(Key{dgram->source, id});
        if (it == in_flight.end()) {
            ++stats.unmatched;
            continue;
        }
        InFlight& f = it->second;
        const double at = offset_ms(f.sent_at, transport_.now());
        try {
            const auto msg = dns::parse(dgram->payload);
            if (!msg.qr || msg.questions.size() != 1 || !dns::same_question(msg.questions.front(), f.question)) {
                f.result.anomalies.push_back({dgram->source, at, "question mismatch", std::move(dgram->payload)});
                ++stats.anomalies;
                continue;
            }
            ProbeResponse resp;
            resp.source = dgram->source;
            resp.offset_ms = at;
            resp.rcode = msg.rcode;
            resp.answers = msg.answers;
            resp.raw = std::move(dgram->payload);
            f.result.responses.push_back(std::move(resp));
            ++stats.responses;
        } catch (const dns::DnsParseError& e) {
            f.result.anomalies.push_back({dgram->source, at, std::string("unparsable: ") + e.what(),
                                          std::move(dgram->payload)});
            ++stats.anomalies;
        }
    }
    return stats;
}

std::vector<ProbeResult> ProbeEngine::run(std::vector<ProbeTask> tasks) {
    VectorTaskSource source(std::move(tasks));
    std::vector<ProbeResult> out;
    run(source, [&](ProbeResult&& r) { out.push_back(std::move(r)); });
    return out;
}

ProbeResult execute_query(const ProbeTask& task, UdpTransport& transport, std::chrono::milliseconds window) {
    EngineOptions opts;
    opts.window = window;
    opts.rate = 0;
    ProbeEngine engine(transport, opts);
    auto results = engine.run(std::vector<ProbeTask>{task});
    return std::move(results.front());
}

}  // namespace dnsgap
