#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dnsgap/core/ip.hpp"

namespace dnsgap {

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws std::invalid_argument on odd length or non-hex characters.
std::vector<std::uint8_t> from_hex(std::string_view hex);

/// "2022-01-31T12:00:00Z" for a system-clock time.
std::string iso8601_utc(std::chrono::system_clock::time_point tp);

/// Lowercase hex SHA-256 of a byte string or of a file's contents.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

/// Reads non-empty, non-comment ('#') lines with surrounding whitespace removed.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string_view trim(std::string_view s);

/// splitmix64 finalizer; used to derive independent deterministic streams
/// from (seed, key) without shared generator state.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_combine(std::uint64_t seed, std::string_view text);
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

/// Uniform draw in [0, 1) from a 64-bit hash.
inline double unit_from_hash(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// At most `rate` events in any one-second window. Pure bookkeeping: the
/// caller supplies the clock.
class SlidingWindowLimiter {
public:
    using Clock = std::chrono::steady_clock;

    explicit SlidingWindowLimiter(double rate_per_second);

    /// Earliest time at or after `now` at which another event is allowed.
    Clock::time_point next_allowed(Clock::time_point now) const;
    bool try_acquire(Clock::time_point now);
    bool unlimited() const { return capacity_ == 0; }

private:
    std::size_t capacity_;
    std::deque<Clock::time_point> recent_;
};

/// Thread-safe blocking limiter: a global rate plus a minimum spacing
/// between two events for the same host.
class HandshakeThrottle {
public:
    HandshakeThrottle(double rate_per_second, std::chrono::milliseconds per_host_spacing);
    void acquire(const IpAddress& host);

private:
    std::mutex mu_;
    SlidingWindowLimiter global_;
    std::chrono::milliseconds spacing_;
    std::unordered_map<IpAddress, SlidingWindowLimiter::Clock::time_point> last_by_host_;
};

}  // namespace dnsgap
