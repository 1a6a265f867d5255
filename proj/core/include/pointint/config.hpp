#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pointint/phi_engine.hpp"
#include "pointint/spectral_models.hpp"
#include "pointint/spectrum_solver.hpp"

namespace pointint {

// Numeric fields accept arithmetic expressions: + - * / ^, parentheses,
// the constant pi and the functions sqrt, sin, cos, exp, log.
// Throws DomainError on malformed input.
double evaluate_expression(const std::string& text);

enum class Check { gram, completeness, oracle, scheme, krein, heat, domain };
std::string to_string(Check c);
Check check_from_string(const std::string& s);

struct EigfunBlock {
    std::size_t level = 0;
    std::size_t grid_points = 33;  // per axis
    std::size_t norm_cells = 0;    // 0: 4096 / 256 / 32 cells in 1D / 2D / 3D
};

struct VerifyBlock {
    std::vector<Check> checks{Check::gram, Check::completeness, Check::oracle};
    std::size_t gram_levels = 8;
    double gram_tol = 1e-6;
    double mode_gram_tol = 1e-8;
    std::size_t quadrature_cells = 0;  // 0: 4096 / 512 / 32 cells in 1D / 2D / 3D
    std::size_t completeness_k = 64;
    double completeness_tol = 1e-3;
    std::vector<std::size_t> oracle_sizes{512, 1024, 2048, 4096};
    double oracle_tol = 1e-10;
    double new_mu_sq = 4.0;
    std::size_t scheme_points = 100;
    std::size_t resolvent_samples = 10;
    std::size_t resolvent_levels = 64;
    double resolvent_tol = 1e-12;
    double residue_tol = 1e-6;
    double t_min = 1e-2;
    double t_max = 10.0;
    std::size_t t_points = 13;
    std::size_t domain_levels = 65536;
    std::uint64_t seed = 1;
};

struct OutputBlock {
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
    SpectralModel model = SpectralModel::interval(pi);
    std::vector<Point> centers;
    std::vector<Scheme> schemes;  // one per center
    std::size_t k_max = 8;
    SolverOptions solver;
    EigfunBlock eigfun;
    VerifyBlock verify;
    OutputBlock output;
    std::string source;
};

// Parses and validates a YAML run configuration. Every failure is a
// ConfigError carrying the field path and, when known, the line number.
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);

}  // namespace pointint
