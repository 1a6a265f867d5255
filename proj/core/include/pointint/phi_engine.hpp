#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pointint/spectral_models.hpp"

namespace pointint {

struct Scheme {
    double alpha_R = 1.0;
    double mu_sq = 1.0;

    double inv_alpha() const { return 1.0 / alpha_R; }
    void validate() const;
};

enum class PhiMethod { automatic, direct, split };

// Phi(E) = 1/alpha_R - sum_n w_n (E + mu2) / ((E_n - E)(E_n + mu2)).
// `derivative` holds sum_n w_n / (E_n - E)^2, which is -dPhi/dE: Phi decreases
// between consecutive poles.
struct PhiValue {
    double energy = 0.0;
    double value = 0.0;
    double derivative = 0.0;
    std::size_t cutoff = 0;        // levels summed explicitly
    double tail_bound = 0.0;       // certified |error| of value
    double derivative_bound = 0.0; // certified |error| of derivative
    PhiMethod method = PhiMethod::direct;
};

struct TailBound {
    double phi = 0.0;
    double derivative = 0.0;
};

inline constexpr double default_phi_precision = 1e-12;
inline constexpr double pole_guard = 1e-12;
inline constexpr double nodal_threshold = 1e-14;

// Bound on sum over modes with E_n > lambda of E_n^{-2}, given the exact
// number of modes with E_n <= lambda.
double inverse_square_tail(double lambda, std::size_t n_below, const SpectralModel& model);

// Certified bound on the Phi and Phi' sums over all modes with energy above
// `lambda`, given that exactly `modes_up_to_lambda` modes have energy <= lambda.
// Needs lambda > 3 max(|E|, mu2).
TailBound tail_bound(double energy, double lambda, std::size_t modes_up_to_lambda,
                     const SpectralModel& model, double mu_sq);

// Per-level weights with nodal levels (weight below nodal_threshold times the
// mean weight of up to two neighbours on each side) set to exactly zero.
std::vector<double> effective_weights(const LevelTable& table);
std::vector<bool> nodal_flags(const LevelTable& table);

// Throws PoleProximityError if E lies within pole_guard * (local gap) of a
// level with nonzero effective weight.
void check_pole_distance(double energy, const LevelTable& table, const std::vector<double>& weights);

// Level cap a table needs so that phi() certifies `target` for every energy in [e_lo, e_hi].
double required_cap(const SpectralModel& model, double e_lo, double e_hi, double mu_sq,
                    double target = default_phi_precision);

PhiValue phi(double energy, const LevelTable& table, const Scheme& scheme,
             double precision_target = default_phi_precision, PhiMethod method = PhiMethod::automatic);

// Same evaluation with precomputed effective weights (hot loops).
PhiValue phi(double energy, const LevelTable& table, const std::vector<double>& weights,
             const Scheme& scheme, double precision_target, PhiMethod method);

// Bare coupling of the rank-N truncation: 1/alpha(N) = 1/alpha_R + sum_{k<N} w_k / (E_k + mu2).
struct BareCoupling {
    double inv_alpha = 0.0;
    bool infinite = false;  // 1/alpha(N) vanishes within roundoff
    double alpha() const { return infinite ? 0.0 : 1.0 / inv_alpha; }
};
BareCoupling bare_coupling(std::size_t n_levels, const LevelTable& table, const Scheme& scheme);

// Phi_N(E) = 1/alpha(N) - sum_{k<N} w_k / (E_k - E), exact for the rank-N model.
PhiValue phi_truncated(double energy, std::size_t n_levels, const LevelTable& table, const Scheme& scheme);

struct SchemeMapping {
    Scheme scheme;
    double inv_alpha_error = 0.0;  // certified error of 1/alpha_R'
};

// Scheme with subtraction scale new_mu_sq describing the same Phi:
// 1/alpha_R' = 1/alpha_R + sum w [1/(E_n + mu2) - 1/(E_n + mu2')] = Phi(-mu2').
SchemeMapping change_scheme(const Scheme& scheme, double new_mu_sq, const LevelTable& table,
                            double precision_target = default_phi_precision);

// Scheme at subtraction scale mu_sq whose ground state sits at ground_energy
// (must lie below the lowest nonzero-weight level).
SchemeMapping scheme_from_ground_energy(double ground_energy, double mu_sq, const LevelTable& table,
                                        double precision_target = default_phi_precision);

std::string to_string(PhiMethod method);

}  // namespace pointint
