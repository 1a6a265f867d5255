#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "pointint/phi_engine.hpp"
#include "pointint/quadrature.hpp"
#include "pointint/spectrum_solver.hpp"
#include "pointint/wavefunction.hpp"

namespace pointint {

enum class GramMethod { mode_space, quadrature };
std::string to_string(GramMethod m);

struct GramReport {
    std::size_t size = 0;
    double max_offdiag = 0.0;
    double max_diag_dev = 0.0;
    GramMethod method = GramMethod::mode_space;
    double tolerance = 0.0;
    bool pass = false;
    std::vector<double> matrix;   // row-major size x size
    double certificate = 0.0;     // mode space: largest certified off-diagonal bound; quadrature: largest Richardson error
};

// <psi_n, psi_m> from the partial-fraction identity
// sum_k w_k / ((E_k - E_n*)(E_k - E_m*)) = (Phi(E_m*) - Phi(E_n*)) / (E_n* - E_m*),
// with Phi evaluated to `precision` and the certificate built from |Phi| + bounds.
// Rows of nodal levels couple to nothing; the nodal block is the identity.
GramReport gram_mode_space(const std::vector<PerturbedLevel>& levels, const LevelTable& table, const Scheme& scheme,
                           double tolerance = 1e-8, double precision = default_phi_precision);

// Same Gram matrix as an explicit sum over the first m_levels levels plus a
// certified tail; throws PrecisionError when the tail exceeds tolerance / 10.
GramReport gram_mode_sum(const std::vector<PerturbedLevel>& levels, const LevelTable& table, const Scheme& scheme,
                         std::size_t m_levels, double tolerance = 1e-8);

// Position-space Gram on a shared offset quadrature. Throws PrecisionError if
// the Richardson estimate of any entry exceeds the tolerance.
GramReport gram_quadrature(const std::vector<EigenfunctionEvaluator>& psi, const OffsetQuadrature& q,
                           double tolerance = 1e-6);

// Completeness by reconstruction: residual of the expansion over k = 0..K.
enum class TestFunction { base_mode, bump, synthesized_psi };
std::string to_string(TestFunction f);

struct CompletenessPoint {
    std::size_t K = 0;
    double psi_residual = 0.0;  // relative L2
    double phi_residual = 0.0;  // same K in the unperturbed basis
    double floor = 0.0;         // quadrature floor of psi_residual: coefficient errors plus the norm error
};
struct CompletenessReport {
    TestFunction function = TestFunction::base_mode;
    std::size_t synthesized_index = 0;
    std::vector<CompletenessPoint> points;
    double quadrature_floor = 0.0;  // floor at the largest K
    bool monotone = false;          // psi_residual nonincreasing up to the floor
};

// Basis samples on both rules; inner products and residual norms are Richardson extrapolated.
struct CompletenessInput {
    const OffsetQuadrature* quadrature = nullptr;
    std::vector<Sampled> psi;  // psi_k, k = 0..
    std::vector<Sampled> phi;  // base modes in table order
};
CompletenessInput completeness_input(const LevelTable& table, const Scheme& scheme,
                                     const std::vector<PerturbedLevel>& levels, const OffsetQuadrature& q);

// Stock test function samples (fine and coarse rules).
Sampled stock_function(TestFunction f, const LevelTable& table, const Scheme& scheme,
                       const std::vector<PerturbedLevel>& levels, const OffsetQuadrature& q,
                       std::size_t synthesized_index = 3);

CompletenessReport completeness_reconstruct(TestFunction id, const Sampled& f, const CompletenessInput& basis,
                                            const std::vector<std::size_t>& ks, std::size_t synthesized_index = 3);

// Rank-N oracle H_N = diag(E_0..E_{N-1}) - alpha(N) v v^T with v_k = sqrt(w_k)
// in the collapsed-level basis. Eigenvalues come from a dense eigensolve of
// (H_N - sigma)^{-1}, which keeps the low end accurate to relative precision;
// nodal levels are deflated and returned exactly.
struct OracleResult {
    std::size_t N = 0;
    double inv_alpha = 0.0;
    bool infinite_coupling = false;
    double sigma = 0.0;
    std::vector<double> eigenvalues;     // ascending
    std::vector<bool> from_nodal;        // eigenvalue is an untouched nodal level
    std::vector<double> deviations;      // |E* - oracle| for the compared levels
    std::vector<double> deviation_bounds;
    std::vector<double> matched;         // oracle eigenvalue paired with each compared level
    bool pattern_matches = false;        // nodal levels of the solver are exactly the nodal oracle values
};

OracleResult oracle_diagonalize(std::size_t n_levels, const LevelTable& table, const Scheme& scheme);

// Fills deviations (and certified truncation bounds) against solved levels;
// absent levels are skipped, the rest are matched by energy order.
void compare_oracle(OracleResult& oracle, const std::vector<PerturbedLevel>& levels, const LevelTable& table,
                    const Scheme& scheme);

// Resolvent of H_N in the mode basis by a dense LU solve with refinement.
double oracle_resolvent(const Point& x, const Point& y, double energy, std::size_t n_levels, const LevelTable& table,
                        const Scheme& scheme);

struct HeatKernelRow {
    double t = 0.0;
    double partial_sum = 0.0;  // sum over the table's modes
    double tail = 0.0;         // bound on the omitted modes
    double theta = 0.0;        // closed-form (image/theta) value
    double bound = 0.0;        // 1/V + C t^{-D/2}
    bool holds = false;        // partial_sum + tail <= bound
};
std::vector<HeatKernelRow> heat_kernel_check(const LevelTable& table, const std::vector<double>& ts);

struct LaplaceMoment {
    double direct = 0.0;
    double direct_bound = 0.0;
    double laplace = 0.0;
    double laplace_error = 0.0;
    double difference = 0.0;
};
// sum_n w_n / (E_n + s)^k against int_0^inf t^{k-1} e^{-ts} K_t(a, a) dt / (k-1)!.
// Needs k > D/2 (the sum diverges otherwise).
LaplaceMoment laplace_moment(int k, double e_shift, const LevelTable& table);

struct SchemeInvarianceReport {
    Scheme original;
    Scheme mapped;
    std::vector<double> level_differences;
    double max_level_difference = 0.0;
    double level_tolerance = 0.0;
    std::size_t energies_checked = 0;
    double max_phi_excess = 0.0;  // max(|Phi - Phi'| - combined bound), <= 0 when consistent
    bool pass = false;
};
SchemeInvarianceReport scheme_invariance(const SpectralModel& model, const Point& a, const Scheme& scheme,
                                         double new_mu_sq, std::size_t k_max, const SolverOptions& options = {},
                                         std::size_t energy_points = 100);

}  // namespace pointint
