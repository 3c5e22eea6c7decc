#pragma once

#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

#include "dnsgap/probe/transport.hpp"
#include "dnsgap/simnet/world.hpp"

namespace dnsgap::sim {

/// In-process transport on a virtual clock. A send schedules the world's
/// replies at their delays; receive() jumps the clock to the next arrival
/// or to the deadline, so a campaign takes no wall time.
class SimTransport : public UdpTransport {
public:
    explicit SimTransport(const World& world);

    void send(const IpAddress& destination, std::span<const std::uint8_t> payload) override;
    std::optional<Datagram> receive(Clock::time_point deadline) override;
    Clock::time_point now() const override { return now_; }

    /// Makes sends to this family fail with NetworkError, as on a host
    /// without a route for it.
    void set_unroutable(std::optional<AddressFamily> family) { unroutable_ = family; }
    std::uint64_t datagrams_sent() const { return sent_; }

private:
    struct Event {
        Clock::time_point at;
        std::uint64_t seq;
        Datagram datagram;
        bool operator>(const Event& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };

    const World& world_;
    Clock::time_point now_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
    std::uint64_t seq_ = 0;
    std::uint64_t sent_ = 0;
    std::optional<AddressFamily> unroutable_;
};

}  // namespace dnsgap::sim
