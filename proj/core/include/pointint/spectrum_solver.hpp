#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pointint/phi_engine.hpp"
#include "pointint/spectral_models.hpp"

namespace pointint {

enum class LevelStatus { shifted, unchanged_nodal, absent };
std::string to_string(LevelStatus status);
LevelStatus level_status_from_string(const std::string& s);

struct SolverOptions {
    double tol = 1e-10;               // residual |Phi(E*)| plus its error bound
    double ground_floor = 1e6;        // ground search stops at -ground_floor * max(1, mu2)
    double bisect_fraction = 1e-3;    // bisection until the bracket is this fraction of the gap
    std::size_t max_iterations = 400;
    double max_cutoff = 1e12;         // largest level-table energy cap prepare_levels may build
};

struct PerturbedLevel {
    std::size_t index = 0;      // 0-based level index in the collapsed table
    double base_energy = 0.0;   // E_k
    double energy_star = 0.0;   // E_k*
    LevelStatus status = LevelStatus::shifted;
    double bracket_lo = 0.0;    // interlacing interval searched
    double bracket_hi = 0.0;
    double root_lo = 0.0;       // sign-certified enclosure of the root
    double root_hi = 0.0;
    double residual = 0.0;      // |Phi(E*)| + tail bound
    double phi_derivative = 0.0;
    std::size_t iterations = 0;
};

// Level table large enough for solving levels 0..k_max with the given options.
// Throws ResourceError when that needs a cap above options.max_cutoff.
LevelTable prepare_levels(const SpectralModel& model, const Point& center, const Scheme& scheme,
                          std::size_t k_max, const SolverOptions& options = {});

// Smallest table (cap grown in steps of 1.25) holding at least n levels;
// ResourceError beyond max_cutoff.
LevelTable table_with_levels(const SpectralModel& model, const Point& center, std::size_t n,
                             double max_cutoff = 1e12);

// Root of Phi associated with level k (0-based). Nodal levels return unchanged.
// Level k's root lies between the previous coupled level and E_k; when no
// coupled level lies below k this is the ground-state search.
PerturbedLevel solve_level(std::size_t k, const LevelTable& table, const Scheme& scheme,
                           const SolverOptions& options = {});

// Root below the lowest coupled level. In 1D it may not exist; then status is absent.
PerturbedLevel solve_ground(const LevelTable& table, const Scheme& scheme, const SolverOptions& options = {});

// Levels 0..k_max sorted by energy_star. Absent ground states are kept in the list.
std::vector<PerturbedLevel> solve_spectrum(const LevelTable& table, const Scheme& scheme, std::size_t k_max,
                                           const SolverOptions& options = {});

// Root of the rank-N truncated secular function in the bracket of level k.
PerturbedLevel solve_level_truncated(std::size_t k, std::size_t n_levels, const LevelTable& table,
                                     const Scheme& scheme, const SolverOptions& options = {});

// Multi-center problem -------------------------------------------------------

struct MultiCenterProblem {
    SpectralModel model;
    std::vector<Point> centers;
    std::vector<Scheme> schemes;

    void validate() const;
};

struct MultiLevel {
    double energy_star = 0.0;
    std::vector<double> coefficients;  // unit null vector, first nonzero entry positive
    double root_lo = 0.0;
    double root_hi = 0.0;
    std::size_t multiplicity = 1;      // zero eigenvalues of Phi(E*) at this root
    double smallest_eigenvalue = 0.0;  // |lambda| of the null direction at E*
    double separation = 0.0;           // distance to the next eigenvalue (conditioning)
    double max_offdiag = 0.0;          // max |G0(a_i, a_j | E*)|
};

// Phi_ij(E) = delta_ij Phi_i(E) - (1 - delta_ij) G0(a_i, a_j | E).
std::vector<double> phi_matrix(const MultiCenterProblem& problem, const std::vector<LevelTable>& tables,
                               double energy, double precision_target);

// All roots below the (k_max+1)-th coupled pole, ascending.
std::vector<MultiLevel> solve_spectrum_multi(const MultiCenterProblem& problem, std::size_t k_max,
                                             const SolverOptions& options = {});

}  // namespace pointint
