#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "pointint/errors.hpp"
#include "pointint/quadrature.hpp"
#include "pointint/special_functions.hpp"

using namespace pointint;
using Catch::Matchers::WithinAbs;

namespace {

// int_0^X int_0^Y log(x^2 + y^2) dy dx
double log_rect(double x, double y) {
    return x * y * (std::log(x * x + y * y) - 3.0) + x * x * std::atan(y / x) + y * y * std::atan(x / y);
}

double total_weight(const QuadratureRule& r) { return ordered_sum(r.weights); }

}  // namespace

TEST_CASE("weights sum to the volume and never touch the center", "[quadrature]") {
    const std::vector<std::pair<SpectralModel, Point>> cases = {
        {SpectralModel::interval(pi), Point(1.0)},
        {SpectralModel::rectangle(1.0, std::sqrt(2.0)), Point(0.37, 0.61)},
        {SpectralModel::torus2d(1.0, 1.3), Point(0.05, 1.2)},
        {SpectralModel::box(1.0, 1.2, 0.9), Point(0.3, 0.5, 0.4)},
    };
    for (const auto& [m, a] : cases) {
        const auto q = OffsetQuadrature::build(m, a, GridSpec::for_model(m, m.dim() == 3 ? 16 : 64));
        CHECK_THAT(total_weight(q.fine), WithinAbs(m.volume(), 1e-12));
        CHECK_THAT(total_weight(q.coarse), WithinAbs(m.volume(), 1e-12));
        CHECK_THAT(total_weight(q.coarsest), WithinAbs(m.volume(), 1e-12));
        const bool ok = std::all_of(q.fine.points.begin(), q.fine.points.end(),
                                    [&](const Point& p) { return m.contains(p) && distance_sq(p, a) > 0.0; });
        CHECK(ok);
    }
}

TEST_CASE("mode orthonormality under the reference quadrature", "[quadrature]") {
    const SpectralModel m = SpectralModel::rectangle(1.0, std::sqrt(2.0));
    const auto q = OffsetQuadrature::build(m, Point(0.37, 0.61), GridSpec::for_model(m, 512));
    const auto modes = m.enumerate_modes(400.0, 1000);
    REQUIRE(modes.size() >= 20);
    std::vector<Sampled> s;
    for (std::size_t i = 0; i < 20; ++i) s.push_back(sample(q, [&](const Point& x) { return m.mode_value(modes[i], x); }));
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = i; j < 20; ++j) {
            const double g = integrate_product(q, s[i], s[j]).value;
            if (i == j)
                diag = std::max(diag, std::abs(g - 1.0));
            else
                off = std::max(off, std::abs(g));
        }
    CHECK(off < 1e-8);
    CHECK(diag < 1e-8);
}

TEST_CASE("1D interval modes are orthonormal on a split grid", "[quadrature]") {
    const SpectralModel m = SpectralModel::interval(pi);
    const auto q = OffsetQuadrature::build(m, Point(1.0), GridSpec::for_model(m, 4096));
    const auto modes = m.enumerate_modes(500.0, 100);
    std::vector<Sampled> s;
    for (std::size_t i = 0; i < 20; ++i) s.push_back(sample(q, [&](const Point& x) { return m.mode_value(modes[i], x); }));
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 20; ++j)
            CHECK_THAT(integrate_product(q, s[i], s[j]).value, WithinAbs(i == j ? 1.0 : 0.0, 1e-10));
}

TEST_CASE("log singularity at the center is integrated by the patch", "[quadrature]") {
    const double l2 = std::sqrt(2.0);
    const SpectralModel m = SpectralModel::rectangle(1.0, l2);
    const Point a(0.37, 0.61);
    const double ref = log_rect(0.37, 0.61) + log_rect(0.63, 0.61) + log_rect(0.37, l2 - 0.61) + log_rect(0.63, l2 - 0.61);
    const auto q = OffsetQuadrature::build(m, a, GridSpec::for_model(m, 256));
    const auto f = sample(q, [&](const Point& x) { return std::log(distance_sq(x, a)); });
    const auto r = integrate(q, f);
    CHECK_THAT(r.value, WithinAbs(ref, 1e-7));
    CHECK(std::abs(r.value - ref) <= 10.0 * r.error + 1e-12);
}

TEST_CASE("inverse square singularity in 3D is integrable on the patch", "[quadrature]") {
    // int over the cube [-1,1]^3 of 1/r^2 around its center; the cube sits in a torus of side 2.
    const SpectralModel m = SpectralModel::torus3d(2.0, 2.0, 2.0);
    const Point a(1.0, 1.0, 1.0);
    GridSpec spec = GridSpec::for_model(m, 32);
    const auto q = OffsetQuadrature::build(m, a, spec);
    const auto f = sample(q, [&](const Point& x) { return 1.0 / distance_sq(x, a); });
    // 8 octants, 3 pyramids each; the radial factor cancels: 24 * int_[0,1]^2 dv dw / (1 + v^2 + w^2).
    double ref = 0.0;
    const auto& gl = gauss_legendre(200);
    for (std::size_t i = 0; i < 200; ++i)
        for (std::size_t j = 0; j < 200; ++j) {
            const double v = 0.5 * (1.0 + gl.nodes[i]), w = 0.5 * (1.0 + gl.nodes[j]);
            ref += 0.25 * gl.weights[i] * gl.weights[j] / (1.0 + v * v + w * w);
        }
    ref *= 24.0;
    CHECK_THAT(integrate(q, f).value, WithinAbs(ref, 2e-3));
}

TEST_CASE("permuting points leaves weighted sums unchanged", "[quadrature]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> w(5000), f(5000), g(5000);
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::abs(u(rng));
        f[i] = u(rng) * 1e3;
        g[i] = u(rng);
    }
    const double base = weighted_dot(w, f, g);
    std::vector<std::size_t> perm(w.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> w2, f2, g2;
    for (auto i : perm) {
        w2.push_back(w[i]);
        f2.push_back(f[i]);
        g2.push_back(g[i]);
    }
    CHECK(weighted_dot(w2, f2, g2) == base);
}

TEST_CASE("invalid grids are rejected", "[quadrature]") {
    const SpectralModel m = SpectralModel::rectangle(1.0, 1.0);
    GridSpec s = GridSpec::for_model(m, 64);
    s.patch_cells = 3;
    CHECK_THROWS_AS(OffsetQuadrature::build(m, Point(0.5, 0.5), s), DomainError);
    s.patch_cells = 6;
    CHECK_THROWS_AS(OffsetQuadrature::build(m, Point(0.5, 0.5), s), DomainError);
    s.patch_cells = 8;
    s.cells = 66;
    CHECK_THROWS_AS(OffsetQuadrature::build(m, Point(0.5, 0.5), s), DomainError);
    s.cells = 64;
    s.patch_cells = 0;
    CHECK_THROWS_AS(OffsetQuadrature::build(m, Point(0.5, 0.5), s), DomainError);
    CHECK_THROWS_AS(OffsetQuadrature::build(m, Point(0.0, 0.5), GridSpec::for_model(m, 64)), DomainError);
}
