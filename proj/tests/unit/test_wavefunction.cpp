#include <catch_amalgamated.hpp>

#include <cmath>

#include "pointint/errors.hpp"
#include "pointint/wavefunction.hpp"

using namespace pointint;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const SpectralModel interval = SpectralModel::interval(pi);
const Scheme unit{1.0, 1.0};

struct Solved {
    LevelTable table;
    std::vector<PerturbedLevel> levels;
};

Solved solve(const SpectralModel& m, const Point& a, const Scheme& s, std::size_t k_max) {
    auto t = prepare_levels(m, a, s, k_max + 1);
    auto l = solve_spectrum(t, s, k_max);
    return {std::move(t), std::move(l)};
}

}  // namespace

TEST_CASE("1D eigenfunctions match the closed-form Green function", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 3);
    for (const auto& l : sv.levels) {
        const EigenfunctionEvaluator psi(sv.table, unit, l);
        for (double x : {0.2, 1.0, 1.7, 3.0}) {
            const double ref = green0_interval_closed_form(pi, x, 1.0, l.energy_star) * psi.scale();
            const auto v = psi(Point(x));
            CHECK_THAT(v.value, WithinAbs(ref, 1e-9));
            CHECK(v.bound <= 1e-9);
        }
    }
}

TEST_CASE("1D eigenfunction norms certify to one", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 5);
    const auto q = OffsetQuadrature::build(interval, Point(1.0), GridSpec::for_model(interval, 4096));
    for (const auto& l : sv.levels) {
        const EigenfunctionEvaluator psi(sv.table, unit, l);
        const auto c = norm_certificate(q, sample_eigenfunction(psi, q));
        CHECK(c.deviation < 1e-9);
        CHECK(c.quadrature_error < 1e-6);
    }
}

TEST_CASE("nodal levels keep the base eigenfunction", "[wavefunction]") {
    const auto sv = solve(interval, Point(pi / 2), unit, 3);
    for (const auto& l : sv.levels) {
        if (l.status != LevelStatus::unchanged_nodal) continue;
        const EigenfunctionEvaluator psi(sv.table, unit, l);
        for (double x : {0.3, 1.1, 2.9}) {
            const double ref = eigenfunction_value(interval, std::array<int, 3>{int(l.index) + 1, 0, 0}, Point(x));
            CHECK(psi(Point(x)).value == ref);
        }
    }
}

TEST_CASE("2D ground state is normalized, positive, and singular at a", "[wavefunction]") {
    const SpectralModel rect = SpectralModel::rectangle(1.0, std::sqrt(2.0));
    const Point a(0.37, 0.61);
    const auto sv = solve(rect, a, unit, 0);
    const auto& g = sv.levels[0];
    const auto grid = uniform_grid(rect, 21);
    const auto ef = eigenfunction(g, grid, sv.table, unit, GridSpec::for_model(rect, 128));
    CHECK(ef.certificate.deviation < 1e-4);
    std::size_t negative = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool boundary = grid[i][0] == 0.0 || grid[i][1] == 0.0 || grid[i][0] == 1.0 ||
                              grid[i][1] == std::sqrt(2.0);
        if (!boundary && ef.values[i] <= 0.0) ++negative;
    }
    CHECK(negative == 0);
    const EigenfunctionEvaluator psi(sv.table, unit, g);
    double prev = 0.0;
    for (double r : {1e-1, 1e-2, 1e-3, 1e-4}) {
        const double v = psi(Point(a[0] + r, a[1])).value;
        CHECK(v > prev);
        prev = v;
    }
    CHECK(psi(a).excluded);
}

TEST_CASE("Krein resolvent is symmetric and reduces at E = -mu2", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 2);
    const Point x(0.4), y(2.2);
    const auto g1 = krein_resolvent(x, y, 2.0, sv.table, unit);
    const auto g2 = krein_resolvent(y, x, 2.0, sv.table, unit);
    CHECK_THAT(g1.value, WithinAbs(g2.value, g1.bound + g2.bound + 1e-15));
    const Scheme weak{1e-3, 1.0};
    const auto w = krein_resolvent(x, y, -1.0, sv.table, weak);
    CHECK_THAT(w.phi, WithinRel(1e3, 1e-12));
    const double gx = green0_interval_closed_form(pi, 0.4, 1.0, -1.0);
    const double gy = green0_interval_closed_form(pi, 2.2, 1.0, -1.0);
    CHECK(std::abs(w.value - w.free_part) <= std::abs(gx * gy) * 1e-3 * (1.0 + 1e-9));
}

TEST_CASE("Krein resolvent refuses perturbed eigenvalues", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 1);
    CHECK_THROWS_AS(krein_resolvent(Point(0.4), Point(2.2), sv.levels[0].energy_star, sv.table, unit),
                    PoleProximityError);
}

TEST_CASE("residue at each root reproduces psi psi", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 3);
    for (const auto& l : sv.levels) {
        const auto r = residue_check(Point(0.5), Point(2.4), l, sv.table, unit);
        CHECK(r.deviation < 1e-6);
    }
    const SpectralModel rect = SpectralModel::rectangle(1.0, std::sqrt(2.0));
    const auto sr = solve(rect, Point(0.37, 0.61), unit, 2);
    for (const auto& l : sr.levels) {
        const auto r = residue_check(Point(0.2, 0.3), Point(0.8, 1.1), l, sr.table, unit);
        CHECK(r.deviation < 1e-6);
    }
}

TEST_CASE("renormalized kernel is symmetric and acts as the Hamiltonian", "[wavefunction]") {
    const auto sv = solve(interval, Point(1.0), unit, 7);
    const RenormalizedKernel k(sv.table, unit, sv.levels);
    CHECK_THAT(k(Point(0.3), Point(2.0)).value, WithinRel(k(Point(2.0), Point(0.3)).value, 1e-13));

    const auto q = OffsetQuadrature::build(interval, Point(1.0), GridSpec::for_model(interval, 512));
    const EigenfunctionEvaluator psi3(sv.table, unit, sv.levels[3]);
    const auto p3 = sample_eigenfunction(psi3, q);
    for (double x : {0.5, 2.0}) {
        const auto kx = sample(q, [&](const Point& y) { return k(Point(x), y).value; });
        const double applied = integrate_product(q, kx, p3).value;
        CHECK_THAT(applied, WithinAbs(sv.levels[3].energy_star * psi3(Point(x)).value, 1e-6));
    }
}

TEST_CASE("kernel returns E_k phi_k on nodal levels", "[wavefunction]") {
    const auto sv = solve(interval, Point(pi / 2), unit, 5);
    const RenormalizedKernel k(sv.table, unit, sv.levels);
    const auto q = OffsetQuadrature::build(interval, Point(pi / 2), GridSpec::for_model(interval, 512));
    const auto phi1 = sample(q, [](const Point& y) { return std::sqrt(2.0 / pi) * std::sin(2.0 * y[0]); });
    const double x = 0.7;
    const auto kx = sample(q, [&](const Point& y) { return k(Point(x), y).value; });
    CHECK_THAT(integrate_product(q, kx, phi1).value, WithinAbs(4.0 * std::sqrt(2.0 / pi) * std::sin(2.0 * x), 1e-8));
}

TEST_CASE("domain vector partial sums are Cauchy", "[wavefunction]") {
    const auto small = solve(interval, Point(1.0), unit, 1);
    const auto big = LevelTable::build(interval, Point(1.0), std::pow(65536.0, 2));
    const auto zero = domain_vector_norms(small.levels[0], small.levels[0], big);
    for (double s : zero.partial) CHECK(s == 0.0);
    const auto d = domain_vector_norms(small.levels[0], small.levels[1], big);
    REQUIRE(d.n.size() >= 12);
    for (std::size_t i = 0; i + 1 < d.n.size(); ++i) {
        CHECK(d.partial[i + 1] >= d.partial[i]);
        if (d.n[i] >= 1000 && d.n[i + 1] == 2 * d.n[i]) CHECK(d.partial[i + 1] - d.partial[i] <= d.tail[i]);
    }
    CHECK(d.tail.back() < 1e-4 * d.partial.back());
    // Regression constant from a direct 10^6-term sum at the reference roots; the
    // table stops at 65536 levels and the solved roots carry ~1e-10 error.
    CHECK(std::abs(d.partial.back() - 57.74935241900336) <= d.tail.back() + 1e-9);
}
