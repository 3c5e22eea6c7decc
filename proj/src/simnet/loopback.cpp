#include "dnsgap/simnet/loopback.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <queue>

namespace dnsgap::sim {

namespace {

using Clock = std::chrono::steady_clock;

struct Pending {
    Clock::time_point at;
    std::uint64_t seq;
    int fd;
    sockaddr_storage to;
    socklen_t to_len;
    std::vector<std::uint8_t> payload;
    bool operator>(const Pending& o) const { return at != o.at ? at > o.at : seq > o.seq; }
};

}  // namespace

LoopbackHost::LoopbackHost(const World& world, double time_scale) : world_(world), time_scale_(time_scale) {
    std::vector<IpAddress> addrs;
    for (const auto& r : world.config().resolvers) {
        addrs.emplace_back(r.v4);
        addrs.emplace_back(r.v6);
    }
    for (const auto& t : world.trusted()) addrs.push_back(t);
    for (const auto& a : addrs) {
        const int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0);
        if (fd < 0) throw NetworkError(std::string("socket: ") + std::strerror(errno));
        fds_.push_back(fd);
        sockaddr_in sin{};
        sin.sin_family = AF_INET;
        sin.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        if (::bind(fd, reinterpret_cast<sockaddr*>(&sin), sizeof sin) < 0) {
            throw NetworkError(std::string("bind: ") + std::strerror(errno));
        }
        socklen_t len = sizeof sin;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&sin), &len);
        logical_.push_back(a);
        ports_.push_back(ntohs(sin.sin_port));
    }
    thread_ = std::thread([this] { serve(); });
}

LoopbackHost::~LoopbackHost() {
    stop_ = true;
    if (thread_.joinable()) thread_.join();
    for (int fd : fds_) ::close(fd);
}

void LoopbackHost::install_routes(SocketTransport& transport) const {
    for (std::size_t i = 0; i < logical_.size(); ++i) {
        transport.add_route(logical_[i], {Ipv4Address(127, 0, 0, 1), ports_[i]});
    }
}

void LoopbackHost::serve() {
    std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
    std::uint64_t seq = 0;
    std::vector<pollfd> pfds;
    for (int fd : fds_) pfds.push_back({fd, POLLIN, 0});
    std::vector<std::uint8_t> buf(65535);

    while (!stop_) {
        auto now = Clock::now();
        while (!queue.empty() && queue.top().at <= now) {
            const Pending& p = queue.top();
            ::sendto(p.fd, p.payload.data(), p.payload.size(), 0, reinterpret_cast<const sockaddr*>(&p.to), p.to_len);
            queue.pop();
        }
        int timeout = 20;
        if (!queue.empty()) {
            const auto wait = std::chrono::ceil<std::chrono::milliseconds>(queue.top().at - now).count();
            timeout = static_cast<int>(std::min<long long>(timeout, std::max<long long>(wait, 0)));
        }
        const int rc = ::poll(pfds.data(), pfds.size(), timeout);
        if (rc <= 0) continue;
        for (std::size_t i = 0; i < pfds.size(); ++i) {
            if (!(pfds[i].revents & POLLIN)) continue;
            for (;;) {
                Pending p{};
                p.to_len = sizeof p.to;
                const auto got = ::recvfrom(pfds[i].fd, buf.data(), buf.size(), 0,
                                            reinterpret_cast<sockaddr*>(&p.to), &p.to_len);
                if (got < 0) break;
                ++served_;
                const auto received = Clock::now();
                for (auto& reply : world_.respond(logical_[i], std::span(buf.data(), static_cast<std::size_t>(got)))) {
                    Pending out = p;
                    out.fd = pfds[i].fd;
                    out.seq = seq++;
                    out.at = received + std::chrono::duration_cast<Clock::duration>(
                                            std::chrono::duration<double, std::milli>(reply.delay_ms * time_scale_));
                    out.payload = std::move(reply.payload);
                    queue.push(std::move(out));
                }
            }
        }
    }
}

}  // namespace dnsgap::sim
