#include <algorithm>
#include "dnsgap/stats/tests.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>
#include <limits>

namespace dnsgap {

std::string_view to_string(SidakMode m) { return m == SidakMode::Standard ? "standard" : "literal"; }

SidakMode parse_sidak_mode(std::string_view s) {
    if (s == "standard") return SidakMode::Standard;
    if (s == "literal" || s == "alpha-root") return SidakMode::Literal;
    throw std::invalid_argument("unknown Sidak mode '" + std::string(s) + "' (standard|literal)");
}

double sidak_alpha(double alpha, std::size_t n, SidakMode mode) {
    if (!(alpha > 0 && alpha < 1)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    const double inv = 1.0 / static_cast<double>(n);
    // expm1/log1p keep precision when the threshold is tiny.
    if (mode == SidakMode::Standard) return -std::expm1(std::log1p(-alpha) * inv);
    return -std::expm1(std::log(alpha) * inv);
}

double two_sided_t_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

double two_sided_normal_p(double z) {
    if (std::isinf(z)) return 0.0;
    boost::math::normal dist;
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z)));
}

namespace {

struct Moments {
    double n, mean, var;
};

Moments moments(std::span<const double> v) {
    // Rounding would leave a spurious variance on constant samples.
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
        return {static_cast<double>(v.size()), v.front(), 0.0};
    }
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {static_cast<double>(v.size()), mean, ss / static_cast<double>(v.size() - 1)};
}

void check_sizes(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() < 2 || ys.size() < 2) throw std::invalid_argument("t-test needs at least 2 values per group");
}

TTestResult degenerate(double mx, double my, double df) {
    TTestResult r;
    r.degenerate = true;
    r.df = df;
    if (mx == my) return r;
    r.t = mx > my ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    return r;
}

}  // namespace

TTestResult t_test_two_sample(std::span<const double> xs, std::span<const double> ys) {
    check_sizes(xs, ys);
    const auto x = moments(xs), y = moments(ys);
    const double vx = x.var / x.n, vy = y.var / y.n;
    const double se2 = vx + vy;
    if (se2 == 0) return degenerate(x.mean, y.mean, x.n + y.n - 2);
    TTestResult r;
    r.t = (x.mean - y.mean) / std::sqrt(se2);
    r.df = se2 * se2 / (vx * vx / (x.n - 1) + vy * vy / (y.n - 1));
    r.p = two_sided_t_p(r.t, r.df);
    return r;
}

TTestResult t_test_pooled(std::span<const double> xs, std::span<const double> ys) {
    check_sizes(xs, ys);
    const auto x = moments(xs), y = moments(ys);
    const double df = x.n + y.n - 2;
    const double sp2 = ((x.n - 1) * x.var + (y.n - 1) * y.var) / df;
    if (sp2 == 0) return degenerate(x.mean, y.mean, df);
    TTestResult r;
    r.df = df;
    r.t = (x.mean - y.mean) / std::sqrt(sp2 * (1 / x.n + 1 / y.n));
    r.p = two_sided_t_p(r.t, r.df);
    return r;
}

ZTestResult z_test_two_proportion(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2, std::uint64_t n2) {
    if (n1 == 0 || n2 == 0 || x1 > n1 || x2 > n2) throw std::invalid_argument("z-test needs 0 <= x <= n and n >= 1");
    const double p1 = static_cast<double>(x1) / static_cast<double>(n1);
    const double p2 = static_cast<double>(x2) / static_cast<double>(n2);
    const double pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    if (x1 + x2 == 0 || x1 + x2 == n1 + n2) {
        throw NotApplicable("pooled proportion is " + std::string(x1 + x2 == 0 ? "0" : "1"));
    }
    const double se = std::sqrt(pooled * (1 - pooled) * (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    ZTestResult r;
    r.z = (p1 - p2) / se;
    r.p = two_sided_normal_p(r.z);
    return r;
}

}  // namespace dnsgap
