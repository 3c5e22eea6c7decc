#pragma once

#include <chrono>
#include <functional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "dnsgap/core/types.hpp"
#include "dnsgap/probe/transport.hpp"
#include "dnsgap/verdict/classify.hpp"

namespace dnsgap {

/// None of the trusted resolvers answered any query for the domain.
class ResolverUnreachable : public std::runtime_error {
public:
    explicit ResolverUnreachable(const std::string& what) : std::runtime_error(what) {}
};

enum class RejectReason { InvalidName, NoA, NoAAAA, TlsInvalid };
std::string_view to_string(RejectReason r);

struct Rejection {
    RejectReason reason;
    std::string detail;
};

using VetOutcome = std::variant<VettedDomain, Rejection>;

std::vector<IpAddress> default_trusted_resolvers();

struct VetOptions {
    std::chrono::milliseconds window{2000};
    double rate = 100.0;
    unsigned tls_threads = 4;
    std::uint64_t seed = 0;
    /// Source of `vetted_at`; replaceable for reproducible runs.
    std::function<std::chrono::system_clock::time_point()> clock = [] { return std::chrono::system_clock::now(); };
};

/// Resolves A and AAAA at every trusted resolver and unions the answers,
/// keeping only globally routable unicast addresses of the right family.
/// Rejects with NoA / NoAAAA when a family is left empty, then requires one
/// address per family to pass TLS verification with SNI = name.
VetOutcome vet_domain(const std::string& name, const std::vector<IpAddress>& trusted_resolvers,
                      UdpTransport& transport, TlsProber& tls, const VetOptions& options = {});

struct VetReport {
    std::vector<VettedDomain> vetted;
    std::vector<std::pair<std::string, Rejection>> rejected;
    std::vector<std::string> unreachable;
    std::size_t count(RejectReason r) const;
    std::size_t total() const { return vetted.size() + rejected.size() + unreachable.size(); }
};

/// Batch form: every DNS query goes through one rate-capped engine run and
/// TLS checks run on a small thread pool. Output order follows input order.
VetReport vet_domains(const std::vector<std::string>& names, const std::vector<IpAddress>& trusted_resolvers,
                      UdpTransport& transport, TlsProber& tls, const VetOptions& options = {});

}  // namespace dnsgap
