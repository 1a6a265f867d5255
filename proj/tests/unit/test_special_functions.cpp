#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "pointint/errors.hpp"
#include "pointint/special_functions.hpp"

using pointint::expint_e;
using pointint::expint_e_table;
using Catch::Matchers::WithinRel;

TEST_CASE("Gauss-Legendre integrates polynomials exactly", "[special]") {
    for (std::size_t n : {1u, 2u, 5u, 16u, 24u}) {
        const auto& gl = pointint::gauss_legendre(n);
        REQUIRE(gl.nodes.size() == n);
        for (std::size_t deg = 0; deg < 2 * n; ++deg) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += gl.weights[i] * std::pow(gl.nodes[i], deg);
            const double exact = (deg % 2 == 1) ? 0.0 : 2.0 / static_cast<double>(deg + 1);
            CHECK(std::abs(s - exact) < 1e-14);
        }
    }
}

TEST_CASE("E_nu matches high precision references", "[special]") {
    struct Ref {
        double nu, x, value;
    };
    // 30-digit references.
    const std::vector<Ref> refs = {
        {1.0, 0.5, 0.55977359477616081175},    {0.5, 0.3, 1.4192574335273310726},
        {2.5, 0.01, 0.64893004941255625242},   {3.0, 2.0, 0.030133379797815893187},
        {1.5, 7.5, 6.2436307158899219222e-5},  {0.5, 40.0, 1.0492816475897854267e-19},
        {12.5, 3.0, 0.0033834243304886857271}, {-0.5, 2.0, 0.081924172616529358016},
        {4.0, 30.0, 2.7613332813973074731e-15}, {1.0, 1e-8, 17.843465089050832566},
    };
    for (const auto& r : refs) {
        INFO("nu = " << r.nu << ", x = " << r.x);
        CHECK_THAT(expint_e(r.nu, r.x), WithinRel(r.value, 1e-13));
    }
}

TEST_CASE("E_nu at zero argument", "[special]") {
    CHECK(expint_e(2.5, 0.0) == 1.0 / 1.5);
    CHECK(std::isinf(expint_e(1.0, 0.0)));
    CHECK_THROWS_AS(expint_e(1.0, -1.0), pointint::DomainError);
}

TEST_CASE("E_nu table agrees with pointwise evaluation", "[special]") {
    for (double nu0 : {0.5, 1.0, 1.5, 2.0}) {
        for (double x : {0.0, 1e-6, 0.3, 1.0, 1.7, 6.0, 25.0, 61.0}) {
            std::vector<double> t(30);
            expint_e_table(nu0, x, t);
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double nu = nu0 + static_cast<double>(j);
                if (x == 0.0 && nu <= 1.0) continue;
                INFO("nu = " << nu << ", x = " << x);
                CHECK_THAT(t[j], WithinRel(expint_e(nu, x), 1e-12));
            }
        }
    }
}
