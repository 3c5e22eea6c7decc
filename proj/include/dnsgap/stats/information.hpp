#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace dnsgap {

/// Non-negative weights per category (usually counts).
using Counts = std::map<std::string, double>;

class SupportViolation : public std::domain_error {
public:
    explicit SupportViolation(const std::string& what) : std::domain_error(what) {}
};

/// Shannon entropy in bits over keys with non-zero mass. Throws
/// std::invalid_argument when the total mass is not positive.
double shannon_entropy(const Counts& counts);

/// KL(p || q) in bits. With epsilon = 0 every key with p > 0 must have
/// q > 0 (SupportViolation otherwise). With epsilon > 0 both distributions
/// get `epsilon` added to every key of the union before normalizing.
double kl_divergence(const Counts& p, const Counts& q, double epsilon = 0.0);

}  // namespace dnsgap
