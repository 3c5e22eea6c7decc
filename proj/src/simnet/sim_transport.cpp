#include "dnsgap/simnet/sim_transport.hpp"

namespace dnsgap::sim {

SimTransport::SimTransport(const World& world) : world_(world), now_(Clock::time_point(std::chrono::hours(1))) {}

void SimTransport::send(const IpAddress& destination, std::span<const std::uint8_t> payload) {
    if (unroutable_ && destination.family() == *unroutable_) {
        throw NetworkError("no route to " + destination.to_string());
    }
    ++sent_;
    for (auto& reply : world_.respond(destination, payload)) {
        const auto delay = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double, std::milli>(reply.delay_ms));
        queue_.push({now_ + delay, seq_++, Datagram{destination, 53, std::move(reply.payload)}});
    }
}

std::optional<Datagram> SimTransport::receive(Clock::time_point deadline) {
    if (!queue_.empty() && queue_.top().at <= deadline) {
        // priority_queue::top is const; the event is copied out before pop.
        Event e = queue_.top();
        queue_.pop();
        now_ = std::max(now_, e.at);
        return std::move(e.datagram);
    }
    if (deadline != Clock::time_point::max()) now_ = std::max(now_, deadline);
    return std::nullopt;
}

}  // namespace dnsgap::sim
