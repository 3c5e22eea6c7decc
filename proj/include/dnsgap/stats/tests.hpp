#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace dnsgap {

enum class SidakMode {
    /// 1 - (1 - alpha)^(1/n)
    Standard,
    /// 1 - alpha^(1/n). Much looser than Standard; kept for comparison.
    Literal,
};
std::string_view to_string(SidakMode m);
SidakMode parse_sidak_mode(std::string_view s);

/// Per-test threshold for n comparisons. Throws std::invalid_argument
/// unless 0 < alpha < 1 and n >= 1.
double sidak_alpha(double alpha, std::size_t n, SidakMode mode = SidakMode::Standard);

struct TTestResult {
    double t = 0;
    double p = 1;
    double df = 0;
    /// Both groups have zero variance. With equal means the result is
    /// (0, 1); otherwise t is infinite and p is 0.
    bool degenerate = false;
};

/// Welch's unequal-variance t-test, two-sided, Welch-Satterthwaite df.
/// Throws std::invalid_argument when either group has fewer than 2 values.
TTestResult t_test_two_sample(std::span<const double> xs, std::span<const double> ys);

/// Student's pooled-variance t-test, for sensitivity checks.
TTestResult t_test_pooled(std::span<const double> xs, std::span<const double> ys);

/// The pooled proportion is 0 or 1, so the z statistic has zero variance.
class NotApplicable : public std::domain_error {
public:
    explicit NotApplicable(const std::string& what) : std::domain_error(what) {}
};

struct ZTestResult {
    double z = 0;
    double p = 1;
};

/// Pooled two-proportion z-test of x1/n1 against x2/n2, two-sided. The
/// statistic is (x1/n1 - x2/n2) / se. Throws std::invalid_argument on bad
/// counts and NotApplicable for zero variance.
ZTestResult z_test_two_proportion(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2, std::uint64_t n2);

/// Two-sided p-values from the reference distributions.
double two_sided_t_p(double t, double df);
double two_sided_normal_p(double z);

}  // namespace dnsgap
