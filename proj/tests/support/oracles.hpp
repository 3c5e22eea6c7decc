#pragma once

// Reference evaluations written independently of the library: plain
// numerical integration and bisection, no special-function libraries.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

/// Adaptive Simpson quadrature.
inline double simpson(const std::function<double(double)>& f, double a, double b, double eps = 1e-13,
                      int depth = 50) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = (lo + hi) / 2;
            const double lm = (lo + mid) / 2, rm = (mid + hi) / 2;
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
            const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
            const double err = std::fabs(left + right - whole);
            if (d <= 0 || !std::isfinite(err) || err <= 15 * eps) return left + right + (left + right - whole) / 15;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth);
}

inline double t_density(double x, double df) {
    const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    return c * std::pow(1 + x * x / df, -(df + 1) / 2);
}

/// Two-sided tail probability. Integrates the tail directly after mapping
/// [|t|, inf) onto (0, 1] with x = |t| / u, so small p-values keep their
/// relative accuracy.
inline double two_sided_t_p(double t, double df) {
    if (std::isinf(t)) return 0.0;
    const double a = std::fabs(t);
    if (a == 0) return 1.0;
    // t_density(a / u) * a / u^2 rearranged so that u = 0 is finite for
    // df = 1, evaluated in logs so large df does not overflow.
    const double log_c = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
    auto g = [&](double u) {
        if (u == 0 && df > 1) return 0.0;
        const double pow_u = df == 1 ? 0.0 : (df - 1) * std::log(u);
        return std::exp(log_c + std::log(a) + pow_u + (df + 1) / 2 * (std::log(df) - std::log(u * u * df + a * a)));
    };
    return 2 * simpson(g, 0.0, 1.0, 1e-14);
}

inline double normal_density(double x) { return std::exp(-x * x / 2) / std::sqrt(2 * M_PI); }

inline double two_sided_normal_p(double z) {
    if (std::isinf(z)) return 0.0;
    const double a = std::fabs(z);
    if (a == 0) return 1.0;
    auto g = [&](double u) { return u <= 0 ? 0.0 : normal_density(a / u) * a / (u * u); };
    return 2 * simpson(g, 0.0, 1.0, 1e-15);
}

struct TRef {
    double t, df, p;
};

inline TRef welch(const std::vector<double>& x, const std::vector<double>& y) {
    auto mean = [](const std::vector<double>& v) {
        double s = 0;
        for (double e : v) s += e;
        return s / v.size();
    };
    auto var = [&](const std::vector<double>& v) {
        const double m = mean(v);
        double s = 0;
        for (double e : v) s += (e - m) * (e - m);
        return s / (v.size() - 1);
    };
    const double nx = x.size(), ny = y.size();
    const double vx = var(x) / nx, vy = var(y) / ny;
    const double t = (mean(x) - mean(y)) / std::sqrt(vx + vy);
    const double df = (vx + vy) * (vx + vy) / (vx * vx / (nx - 1) + vy * vy / (ny - 1));
    return {t, df, two_sided_t_p(t, df)};
}

struct ZRef {
    double z, p;
};

inline ZRef two_proportion(std::uint64_t x1, std::uint64_t n1, std::uint64_t x2, std::uint64_t n2) {
    const double p1 = double(x1) / n1, p2 = double(x2) / n2;
    const double pool = double(x1 + x2) / double(n1 + n2);
    const double se = std::sqrt(pool * (1 - pool) * (1.0 / n1 + 1.0 / n2));
    const double z = (p1 - p2) / se;
    return {z, two_sided_normal_p(z)};
}

/// Solves family_error(a) = alpha for a on [0, 1] by bisection, where
/// family_error is increasing in a.
inline double bisect(const std::function<double(double)>& family_error, double alpha) {
    double lo = 0, hi = 1;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (family_error(mid) < alpha ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

/// Per-test threshold keeping the family-wise error of n independent tests at alpha.
inline double sidak_standard(double alpha, int n) {
    return bisect([n](double a) { return 1 - std::pow(1 - a, n); }, alpha);
}

/// The printed variant 1 - alpha^(1/n): the a with (1 - a)^n = alpha.
inline double sidak_literal(double alpha, int n) {
    return bisect([n](double a) { return 1 - std::pow(1 - a, n); }, 1 - alpha);
}

inline double entropy_bits(const std::map<std::string, double>& c) {
    double total = 0;
    for (const auto& [k, v] : c) total += v;
    double h = 0;
    for (const auto& [k, v] : c) {
        if (v > 0) h -= v / total * std::log2(v / total);
    }
    return h;
}

inline double kl_bits(const std::map<std::string, double>& p, const std::map<std::string, double>& q) {
    double tp = 0, tq = 0;
    for (const auto& [k, v] : p) tp += v;
    for (const auto& [k, v] : q) tq += v;
    double d = 0;
    for (const auto& [k, v] : p) {
        if (v > 0) d += v / tp * std::log2((v / tp) / (q.at(k) / tq));
    }
    return d;
}

}  // namespace oracle
