#pragma once

#include <atomic>
#include <map>
#include <thread>
#include <vector>

#include "dnsgap/probe/transport.hpp"
#include "dnsgap/simnet/world.hpp"

namespace dnsgap::sim {

/// Serves a world over real UDP sockets on 127.0.0.1, one socket per
/// simulated address, so the production SocketTransport and probe engine
/// run unmodified. Replies are sent from a single thread after their
/// simulated delay (scaled by `time_scale`), which linearizes all resolvers.
class LoopbackHost {
public:
    explicit LoopbackHost(const World& world, double time_scale = 1.0);
    ~LoopbackHost();
    LoopbackHost(const LoopbackHost&) = delete;
    LoopbackHost& operator=(const LoopbackHost&) = delete;

    /// Routes every simulated address of the world to its loopback socket.
    void install_routes(SocketTransport& transport) const;
    std::uint64_t queries_served() const { return served_.load(); }

private:
    void serve();

    const World& world_;
    double time_scale_;
    std::vector<int> fds_;
    std::vector<IpAddress> logical_;
    std::vector<std::uint16_t> ports_;
    std::atomic<bool> stop_{false};
    std::atomic<std::uint64_t> served_{0};
    std::thread thread_;
};

}  // namespace dnsgap::sim
