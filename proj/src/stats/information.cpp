#include "dnsgap/stats/information.hpp"

#include <cmath>
#include <set>

namespace dnsgap {

namespace {

double total_of(const Counts& c) {
    double t = 0;
    for (const auto& [k, v] : c) {
        if (v < 0 || !std::isfinite(v)) throw std::invalid_argument("counts must be finite and non-negative");
        t += v;
    }
    return t;
}

}  // namespace

double shannon_entropy(const Counts& counts) {
    const double total = total_of(counts);
    if (!(total > 0)) throw std::invalid_argument("entropy of an empty distribution");
    double h = 0;
    for (const auto& [k, v] : counts) {
        if (v <= 0) continue;
        const double p = v / total;
        h -= p * std::log2(p);
    }
    // Rounding can leave -0 or a hair below 0 for a single key.
    return h < 0 ? 0.0 : h;
}

double kl_divergence(const Counts& p, const Counts& q, double epsilon) {
    if (epsilon < 0) throw std::invalid_argument("epsilon must be non-negative");
    std::set<std::string> keys;
    for (const auto& [k, v] : p) keys.insert(k);
    for (const auto& [k, v] : q) keys.insert(k);
    const double k = static_cast<double>(keys.size());
    const double tp = total_of(p) + epsilon * k;
    const double tq = total_of(q) + epsilon * k;
    if (!(tp > 0) || !(tq > 0)) throw std::invalid_argument("KL divergence of an empty distribution");

    auto mass = [](const Counts& c, const std::string& key) {
        auto it = c.find(key);
        return it == c.end() ? 0.0 : it->second;
    };
    double d = 0;
    for (const auto& key : keys) {
        const double pi = (mass(p, key) + epsilon) / tp;
        if (pi <= 0) continue;
        const double qi = (mass(q, key) + epsilon) / tq;
        if (qi <= 0) throw SupportViolation("key '" + key + "' has mass in p but not in q");
        d += pi * std::log2(pi / qi);
    }
    return d < 0 ? 0.0 : d;
}

}  // namespace dnsgap
