#include "dnsgap/core/util.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <thread>

namespace dnsgap {

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (auto b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

std::vector<std::uint8_t> from_hex(std::string_view hex) {
    if (hex.size() % 2) throw std::invalid_argument("odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("invalid hex digit");
    };
    std::vector<std::uint8_t> out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    }
    return out;
}

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    return to_hex(std::span<const std::uint8_t>(md, len));
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sha256_hex(data);
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        auto t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        out.emplace_back(t);
    }
    return out;
}

std::uint64_t hash_combine(std::uint64_t seed, std::string_view text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) h = (h ^ c) * 1099511628211ull;
    return mix64(seed ^ mix64(h));
}

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) { return mix64(seed ^ mix64(value + 0x632BE59BD9B4E019ull)); }

SlidingWindowLimiter::SlidingWindowLimiter(double rate_per_second)
    : capacity_(rate_per_second > 0 ? static_cast<std::size_t>(std::floor(rate_per_second)) : 0) {
    if (rate_per_second > 0 && capacity_ == 0) capacity_ = 1;
}

SlidingWindowLimiter::Clock::time_point SlidingWindowLimiter::next_allowed(Clock::time_point now) const {
    if (capacity_ == 0 || recent_.size() < capacity_) return now;
    const auto earliest = recent_[recent_.size() - capacity_] + std::chrono::seconds(1);
    return earliest > now ? earliest : now;
}

bool SlidingWindowLimiter::try_acquire(Clock::time_point now) {
    if (capacity_ == 0) return true;
    if (next_allowed(now) > now) return false;
    recent_.push_back(now);
    while (recent_.size() > capacity_) recent_.pop_front();
    return true;
}

HandshakeThrottle::HandshakeThrottle(double rate_per_second, std::chrono::milliseconds per_host_spacing)
    : global_(rate_per_second), spacing_(per_host_spacing) {}

void HandshakeThrottle::acquire(const IpAddress& host) {
    using Clock = SlidingWindowLimiter::Clock;
    for (;;) {
        Clock::time_point wake;
        {
            std::lock_guard lock(mu_);
            const auto now = Clock::now();
            auto ready = global_.next_allowed(now);
            if (auto it = last_by_host_.find(host); it != last_by_host_.end() && spacing_.count() > 0) {
                ready = std::max(ready, it->second + spacing_);
            }
            if (ready <= now) {
                global_.try_acquire(now);
                last_by_host_[host] = now;
                return;
            }
            wake = ready;
        }
        std::this_thread::sleep_until(wake);
    }
}

}  // namespace dnsgap
