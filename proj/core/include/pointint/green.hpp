#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pointint/spectral_models.hpp"

namespace pointint {

struct GreenValue {
    Point x;
    Point y;
    double energy = 0.0;
    double value = 0.0;
    std::size_t cutoff = 0;  // modes summed explicitly
    double tail_bound = 0.0;
};

inline constexpr double default_green_precision = 1e-10;

// G0(x, y | E) = sum_n phi_n(x) phi_n(y) / (E_n - E), evaluated by the heat
// kernel split: short-time image integral plus the damped mode sum over the
// table, with a certified remainder. In D >= 2, x == y throws DivergenceError.
GreenValue green0(const LevelTable& table, const Point& x, const Point& y, double energy,
                  double precision_target = default_green_precision);

// Many x against a fixed y and E. Precomputes the damped mode coefficients
// once; evaluation is thread safe.
class Green0Evaluator {
public:
    Green0Evaluator(const LevelTable& table, const Point& y, double energy,
                    double precision_target = default_green_precision);

    GreenValue operator()(const Point& x) const;
    double energy() const { return energy_; }
    const Point& source() const { return y_; }

private:
    const SpectralModel* model_;
    Point y_;
    double energy_;
    double tau_;
    double modal_tail_;
    std::vector<Mode> modes_;
    std::vector<double> coef_;  // phi_m(y) exp(-tau (E_m - E)) / (E_m - E)
    std::array<int, 3> qmax_{0, 0, 0};
};

// Plain truncated mode sum over the given modes (the rank-N model's kernel).
// tail_bound is +inf: the remainder of this sum is not certified in general.
GreenValue green0_mode_sum(const SpectralModel& model, std::span<const Mode> modes, const Point& x,
                           const Point& y, double energy);

// Dirichlet interval [0, L]: closed form from the two boundary solutions.
double green0_interval_closed_form(double length, double x, double y, double energy);

// Dirichlet interval mode sum with an Abel-summation certificate on the
// oscillating remainder; the cutoff grows until the bound meets the target
// or max_terms is reached.
GreenValue green0_interval_mode_sum(double length, double x, double y, double energy, double precision_target,
                                    std::size_t max_terms = 8'000'000);

}  // namespace pointint
