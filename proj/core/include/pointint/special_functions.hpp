#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pointint {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1, 1], ascending
    std::vector<double> weights;
};

// n-point Gauss-Legendre rule (Newton iteration on P_n).
const GaussLegendre& gauss_legendre(std::size_t n);

// Generalized exponential integral E_nu(x) = int_1^inf exp(-x u) u^{-nu} du
// for x >= 0. At x = 0 it equals 1/(nu - 1) and requires nu > 1.
double expint_e(double nu, double x);

// Fills out[j] = E_{nu0 + j}(x), j = 0..out.size()-1, with nu0 an integer or
// half integer >= 1/2. Uses a continued fraction seed near nu ~ x and
// recurrences in the stable direction on each side of it.
void expint_e_table(double nu0, double x, std::span<double> out);

}  // namespace pointint
