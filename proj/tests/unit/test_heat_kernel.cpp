#include <catch_amalgamated.hpp>

#include <cmath>

#include "pointint/heat_kernel.hpp"
#include "pointint/special_functions.hpp"

using namespace pointint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Gauss-Legendre on [0, tau] after t = tau s^4 (smooths the t -> 0 behaviour).
template <class F>
double integrate_short(F&& f, double tau) {
    const auto& gl = gauss_legendre(200);
    double s = 0.0;
    for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
        const double u = 0.5 * (gl.nodes[i] + 1.0);
        const double t = tau * std::pow(u, 4);
        s += 0.5 * gl.weights[i] * f(t) * 4.0 * tau * std::pow(u, 3);
    }
    return s;
}

}  // namespace

TEST_CASE("image and theta forms of the heat kernel agree", "[heat]") {
    const std::vector<SpectralModel> models = {
        SpectralModel::interval(pi), SpectralModel::rectangle(1.0, std::sqrt(2.0)),
        SpectralModel::torus2d(2.0, 3.0), SpectralModel::box(1.0, 1.2, 0.8), SpectralModel::torus3d(1.0, 1.0, 1.5)};
    for (const auto& m : models) {
        Point x, y;
        x.dim = y.dim = m.dim();
        for (std::size_t i = 0; i < m.dim(); ++i) {
            x[i] = 0.31 * m.length(i);
            y[i] = 0.77 * m.length(i);
        }
        for (double t : {0.003, 0.05, 0.4, 2.0}) {
            INFO(to_string(m.kind()) << " t = " << t);
            const double ref = heat_kernel_theta(m, x, y, t);
            CHECK_THAT(heat_kernel_images(m, x, y, t), WithinAbs(ref, 1e-12 * std::max(1.0, std::abs(ref))));
            const double scale = 1.0 / m.volume() + std::pow(4.0 * pi * t, -0.5 * static_cast<double>(m.dim()));
            CHECK_THAT(heat_kernel_images(m, x, x, t), WithinAbs(heat_kernel_theta(m, x, x, t), 1e-12 * scale));
        }
    }
}

TEST_CASE("torus mode sum equals theta product", "[heat]") {
    const auto m = SpectralModel::torus2d(2.0 * pi, 3.0);
    const auto modes = m.enumerate_modes(5000.0, 1'000'000);
    const Point a(1.0, 0.4);
    for (double t : {0.05, 0.5, 5.0})
        CHECK_THAT(heat_kernel_mode_sum(m, modes, a, a, t), WithinRel(heat_kernel_theta(m, a, a, t), 1e-12));
    CHECK_THAT(heat_kernel_theta(m, a, a, 200.0), WithinRel(1.0 / m.volume(), 1e-10));
}

TEST_CASE("short-time green integral matches quadrature", "[heat]") {
    const auto m = SpectralModel::rectangle(1.0, std::sqrt(2.0));
    const Point x(0.3, 0.5), y(0.45, 0.62);
    for (double e : {-30.0, 10.0, 150.0}) {
        const double tau = split_tau(m, e);
        const auto b = short_time_green(m, x, y, e, tau);
        const double ref = integrate_short([&](double t) { return std::exp(t * e) * heat_kernel_images(m, x, y, t); }, tau);
        CHECK_THAT(b.value, WithinAbs(ref, 1e-12));
        CHECK(b.error < 1e-13);
    }
}

TEST_CASE("short-time phi and derivative integrals match quadrature", "[heat]") {
    for (const auto& m : {SpectralModel::rectangle(1.0, std::sqrt(2.0)), SpectralModel::torus3d(1.0, 1.3, 0.9),
                          SpectralModel::interval(pi)}) {
        Point a;
        a.dim = m.dim();
        for (std::size_t i = 0; i < m.dim(); ++i) a[i] = 0.37 * m.length(i);
        for (double e : {-20.0, 3.0, 60.0}) {
            INFO(to_string(m.kind()) << " E = " << e);
            const double mu = 1.7;
            const double tau = split_tau(m, std::max(std::abs(e), mu));
            const auto p = short_time_phi(m, a, e, mu, tau);
            const double ref = integrate_short(
                [&](double t) { return (std::expm1(t * e) - std::expm1(-t * mu)) * heat_kernel_images(m, a, a, t); }, tau);
            CHECK_THAT(p.value, WithinAbs(ref, 1e-10 * std::max(1.0, std::abs(ref))));
            const auto d = short_time_derivative(m, a, e, tau);
            const double refd =
                integrate_short([&](double t) { return t * std::exp(t * e) * heat_kernel_images(m, a, a, t); }, tau);
            CHECK_THAT(d.value, WithinAbs(refd, 1e-10 * std::max(1.0, std::abs(refd))));
        }
    }
}

TEST_CASE("split mode tail bounds the true remainder", "[heat]") {
    const auto m = SpectralModel::torus2d(2.0, 3.0);
    const double tau = 0.01, e = 5.0, cap = 1000.0;
    const auto modes = m.enumerate_modes(8000.0, 10'000'000);
    const Point a(0.2, 0.9);
    double s = 0.0;
    for (const auto& md : modes)
        if (md.energy > cap) s += std::pow(m.mode_value(md, a), 2) * std::exp(-tau * (md.energy - e)) / (md.energy - e);
    const double bound = split_mode_tail(m, e, tau, cap, 1);
    CHECK(s <= bound);
    CHECK(bound < 50.0 * s);
}
