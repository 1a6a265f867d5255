#include "pointint/special_functions.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

#include "pointint/errors.hpp"
#include "pointint/numeric.hpp"

namespace pointint {

namespace {

GaussLegendre build_gauss_legendre(std::size_t n) {
    GaussLegendre gl;
    gl.nodes.resize(n);
    gl.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                const double jd = static_cast<double>(j);
                p1 = ((2.0 * jd - 1.0) * z * p2 - (jd - 1.0) * p3) / jd;
            }
            dp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / dp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        gl.nodes[i] = -z;
        gl.nodes[n - 1 - i] = z;
        gl.weights[i] = w;
        gl.weights[n - 1 - i] = w;
    }
    return gl;
}

// Continued fraction for E_nu(x), x > 0 (fast for x >~ 1).
double expint_cf(double nu, double x) {
    constexpr double tiny = 1e-300;
    double b = x + nu;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (nu - 1.0 + static_cast<double>(i));
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x);
}

bool is_half_integer(double nu) {
    return std::abs(nu - std::floor(nu) - 0.5) < 1e-12;
}

// E_nu(x) for small x by forward recurrence from E_1 or E_{1/2}.
double expint_small(double nu, double x) {
    const double ex = std::exp(-x);
    double base_nu;
    double e;
    if (is_half_integer(nu)) {
        base_nu = 0.5;
        e = std::sqrt(pi / x) * std::erfc(std::sqrt(x));
    } else {
        base_nu = 1.0;
        e = -std::expint(-x);
    }
    for (double v = base_nu; v < nu - 0.25; v += 1.0) e = (ex - x * e) / v;
    return e;
}

}  // namespace

const GaussLegendre& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, GaussLegendre> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

double expint_e(double nu, double x) {
    if (x < 0.0) throw DomainError("expint_e: negative argument");
    if (x == 0.0) {
        if (nu <= 1.0) return std::numeric_limits<double>::infinity();
        return 1.0 / (nu - 1.0);
    }
    if (x > 1.0) return expint_cf(nu, x);
    if (nu < 0.5) throw DomainError("expint_e: order below 1/2 needs x > 1");
    return expint_small(nu, x);
}

void expint_e_table(double nu0, double x, std::span<double> out) {
    const std::size_t n = out.size();
    if (n == 0) return;
    if (x < 0.0) throw DomainError("expint_e_table: negative argument");
    if (x == 0.0) {
        for (std::size_t j = 0; j < n; ++j) out[j] = expint_e(nu0 + static_cast<double>(j), 0.0);
        return;
    }
    const double ex = std::exp(-x);
    if (x <= 1.0) {
        if (nu0 < 0.5) throw DomainError("expint_e_table: order below 1/2 needs x > 1");
        out[0] = expint_small(nu0, x);
        for (std::size_t j = 1; j < n; ++j) {
            const double nu = nu0 + static_cast<double>(j - 1);
            out[j] = (ex - x * out[j - 1]) / nu;
        }
        return;
    }
    // Seed where nu ~ x; forward recurrence is stable for nu > x, backward for nu < x.
    double js = std::ceil(x - nu0);
    if (js < 0.0) js = 0.0;
    std::size_t seed = static_cast<std::size_t>(js);
    if (seed >= n) seed = n - 1;
    out[seed] = expint_cf(nu0 + static_cast<double>(seed), x);
    for (std::size_t j = seed + 1; j < n; ++j) {
        const double nu = nu0 + static_cast<double>(j - 1);
        out[j] = (ex - x * out[j - 1]) / nu;
    }
    for (std::size_t j = seed; j-- > 0;) {
        const double nu = nu0 + static_cast<double>(j);
        out[j] = (ex - nu * out[j + 1]) / x;
    }
}

}  // namespace pointint
