#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pointint/green.hpp"
#include "pointint/phi_engine.hpp"
#include "pointint/quadrature.hpp"
#include "pointint/spectrum_solver.hpp"

namespace pointint {

struct NormCertificate {
    double norm = 0.0;              // quadrature value of the squared L2 norm
    double quadrature_error = 0.0;  // Richardson estimate
    double deviation = 0.0;         // |norm - 1|
};

// psi_k(x) = G0(x, a | E_k*) / sqrt(Phi'(E_k*)) for shifted levels,
// phi_k(x) (the level's first mode) for unchanged nodal levels.
class EigenfunctionEvaluator {
public:
    EigenfunctionEvaluator(const LevelTable& table, const Scheme& scheme, const PerturbedLevel& level,
                           double precision_target = default_green_precision);

    struct Value {
        double value = 0.0;
        double bound = 0.0;
        bool excluded = false;  // x == a in 2D/3D: psi is singular there
    };
    Value operator()(const Point& x) const;

    const PerturbedLevel& level() const { return level_; }
    double scale() const { return scale_; }  // 1 / sqrt(Phi'(E*)), 1 for nodal levels
    double phi_derivative() const { return phi_derivative_; }

private:
    const LevelTable* table_;
    PerturbedLevel level_;
    double scale_ = 1.0;
    double phi_derivative_ = 0.0;
    std::optional<Green0Evaluator> green_;
};

struct Eigenfunction {
    PerturbedLevel level;
    std::vector<Point> grid;
    std::vector<double> values;
    std::vector<bool> excluded;
    double max_bound = 0.0;  // largest pointwise truncation bound
    NormCertificate certificate;
};

// Samples psi_k on arbitrary points and certifies its norm on an offset quadrature.
Eigenfunction eigenfunction(const PerturbedLevel& level, const std::vector<Point>& grid, const LevelTable& table,
                            const Scheme& scheme, const GridSpec& norm_grid,
                            double precision_target = default_green_precision);

Sampled sample_eigenfunction(const EigenfunctionEvaluator& psi, const OffsetQuadrature& q);
NormCertificate norm_certificate(const OffsetQuadrature& q, const Sampled& psi);

// Uniform node grid (boundaries included on Dirichlet axes, one period on tori).
std::vector<Point> uniform_grid(const SpectralModel& model, std::size_t points_per_axis);

// Krein resolvent G(x, y | E) = G0(x, y) + G0(x, a) G0(a, y) / Phi(E).
struct KreinValue {
    double value = 0.0;
    double free_part = 0.0;
    double correction = 0.0;
    double phi = 0.0;
    double bound = 0.0;
};
inline constexpr double krein_phi_guard = 1e-10;

KreinValue krein_resolvent(const Point& x, const Point& y, double energy, const LevelTable& table, const Scheme& scheme,
                           double precision_target = default_green_precision);

// Same formula with every sum restricted to the first n_levels levels and the
// bare coupling alpha(N); exact for the rank-N model.
KreinValue krein_resolvent_truncated(const Point& x, const Point& y, double energy, std::size_t n_levels,
                                     const LevelTable& table, const Scheme& scheme);

// Symmetric-difference residue estimate of psi_k(x) psi_k(y) from
// ((E_k* - E) G)(x, y | E) at E = E_k* -/+ offset * gap; the average cancels
// the linear term.
struct ResidueCheck {
    double estimate = 0.0;
    double expected = 0.0;
    double deviation = 0.0;
};
ResidueCheck residue_check(const Point& x, const Point& y, const PerturbedLevel& level, const LevelTable& table,
                           const Scheme& scheme, double relative_offset = 1e-4);

// Kernel of the renormalized Hamiltonian truncated to levels 0..k_max:
// sum over shifted k of E_k* psi_k(x) psi_k(y) plus E_k times the projector
// onto the uncoupled part of every level.
struct KernelValue {
    double value = 0.0;
    std::size_t levels_used = 0;
};
class RenormalizedKernel {
public:
    RenormalizedKernel(const LevelTable& table, const Scheme& scheme, const std::vector<PerturbedLevel>& levels,
                       double precision_target = default_green_precision);
    KernelValue operator()(const Point& x, const Point& y) const;
    std::size_t size() const { return psi_.size(); }

private:
    const LevelTable* table_;
    std::vector<EigenfunctionEvaluator> psi_;
    std::vector<double> energies_;
    std::vector<double> weights_;
    std::size_t max_level_ = 0;
};

// Partial sums S_N of |H0 xi|^2 = (E_k* - E_l*)^2 sum_n E_n^2 w_n / ((E_n - E_k*)^2 (E_n - E_l*)^2)
// for N = 1, 2, 4, ... up to the table's level count. tail[i] bounds S_inf - S_{n[i]}
// (infinite when the table cap is too low for the bound).
struct DomainNormSeries {
    std::vector<std::size_t> n;
    std::vector<double> partial;
    std::vector<double> tail;
};
DomainNormSeries domain_vector_norms(const PerturbedLevel& k, const PerturbedLevel& l, const LevelTable& table);

}  // namespace pointint
