#include "dnsgap/verdict/openssl_prober.hpp"

#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <openssl/err.h>
#include <openssl/ssl.h>
#include <openssl/x509_vfy.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

namespace dnsgap {

namespace {

using Clock = std::chrono::steady_clock;

std::string ssl_error_text() {
    const unsigned long e = ERR_get_error();
    if (e == 0) return "unknown TLS error";
    char buf[256];
    ERR_error_string_n(e, buf, sizeof buf);
    ERR_clear_error();
    return buf;
}

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left > 0 ? static_cast<int>(left) : 0;
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const { return fd_; }

private:
    int fd_;
};

}  // namespace

struct OpenSslProber::Ctx {
    SSL_CTX* ctx = nullptr;
    ~Ctx() {
        if (ctx) SSL_CTX_free(ctx);
    }
};

OpenSslProber::OpenSslProber(TlsProberOptions options)
    : options_(std::move(options)), ctx_(std::make_unique<Ctx>()), throttle_(options_.rate, options_.per_host_spacing) {
    ctx_->ctx = SSL_CTX_new(TLS_client_method());
    if (!ctx_->ctx) throw std::runtime_error("SSL_CTX_new: " + ssl_error_text());
    SSL_CTX_set_min_proto_version(ctx_->ctx, TLS1_2_VERSION);
    SSL_CTX_set_verify(ctx_->ctx, SSL_VERIFY_PEER, nullptr);
    const bool ok = options_.trust == "system"
                        ? SSL_CTX_set_default_verify_paths(ctx_->ctx) == 1
                        : SSL_CTX_load_verify_locations(ctx_->ctx, options_.trust.c_str(), nullptr) == 1;
    if (!ok) throw std::runtime_error("cannot load trust store '" + options_.trust + "': " + ssl_error_text());
}

OpenSslProber::~OpenSslProber() = default;

void OpenSslProber::add_route(const IpAddress& logical, const UdpEndpoint& physical) { routes_[logical] = physical; }

TlsCheck OpenSslProber::verify(const IpAddress& ip, const std::string& sni) {
    UdpEndpoint target{ip, options_.port};
    if (auto it = routes_.find(ip); it != routes_.end()) target = it->second;
    throttle_.acquire(ip);
    const auto deadline = Clock::now() + options_.timeout;

    Fd fd(::socket(target.address.is_v4() ? AF_INET : AF_INET6, SOCK_STREAM | SOCK_NONBLOCK | SOCK_CLOEXEC, 0));
    if (fd.get() < 0) return {TlsOutcome::Error, std::string("socket: ") + std::strerror(errno)};

    const SockAddr sa = to_sockaddr(target.address, target.port);
    if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(sa.storage), sa.length) < 0) {
        if (errno == ENETUNREACH || errno == EAFNOSUPPORT || errno == EADDRNOTAVAIL) {
            return {TlsOutcome::Error, std::string("connect: ") + std::strerror(errno)};
        }
        if (errno != EINPROGRESS) return {TlsOutcome::Failed, std::string("connect: ") + std::strerror(errno)};
        pollfd p{fd.get(), POLLOUT, 0};
        const int rc = ::poll(&p, 1, remaining_ms(deadline));
        if (rc == 0) return {TlsOutcome::Failed, "connect timeout"};
        int err = 0;
        socklen_t len = sizeof err;
        ::getsockopt(fd.get(), SOL_SOCKET, SO_ERROR, &err, &len);
        if (rc < 0 || err != 0) {
            if (err == ENETUNREACH) return {TlsOutcome::Error, std::string("connect: ") + std::strerror(err)};
            return {TlsOutcome::Failed, std::string("connect: ") + std::strerror(err ? err : errno)};
        }
    }

    std::unique_ptr<SSL, decltype(&SSL_free)> ssl(SSL_new(ctx_->ctx), &SSL_free);
    if (!ssl) return {TlsOutcome::Error, "SSL_new: " + ssl_error_text()};
    SSL_set_fd(ssl.get(), fd.get());
    SSL_set_tlsext_host_name(ssl.get(), sni.c_str());
    SSL_set1_host(ssl.get(), sni.c_str());

    for (;;) {
        const int rc = SSL_connect(ssl.get());
        if (rc == 1) break;
        const int err = SSL_get_error(ssl.get(), rc);
        short events = 0;
        if (err == SSL_ERROR_WANT_READ) events = POLLIN;
        else if (err == SSL_ERROR_WANT_WRITE) events = POLLOUT;
        if (events == 0) {
            const long vr = SSL_get_verify_result(ssl.get());
            if (vr != X509_V_OK) return {TlsOutcome::Failed, X509_verify_cert_error_string(vr)};
            return {TlsOutcome::Failed, "handshake: " + ssl_error_text()};
        }
        pollfd p{fd.get(), events, 0};
        if (::poll(&p, 1, remaining_ms(deadline)) <= 0) return {TlsOutcome::Failed, "handshake timeout"};
    }
    const long vr = SSL_get_verify_result(ssl.get());
    if (vr != X509_V_OK) return {TlsOutcome::Failed, X509_verify_cert_error_string(vr)};
    SSL_shutdown(ssl.get());
    return {TlsOutcome::Verified, ""};
}

}  // namespace dnsgap
