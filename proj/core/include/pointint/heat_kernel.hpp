#pragma once

#include <span>
#include <vector>

#include "pointint/spectral_models.hpp"

namespace pointint {

// K_t(x, y) as a product of one-dimensional image sums (method of images for
// Dirichlet axes, periodic images for torus axes). Accurate for small t.
double heat_kernel_images(const SpectralModel& model, const Point& x, const Point& y, double t);

// K_t(x, y) as a product of one-dimensional eigenfunction (theta) series.
// Accurate for large t.
double heat_kernel_theta(const SpectralModel& model, const Point& x, const Point& y, double t);

// Truncated mode sum  sum_n exp(-t E_n) phi_n(x) phi_n(y)  over the given modes.
double heat_kernel_mode_sum(const SpectralModel& model, std::span<const Mode> modes, const Point& x,
                            const Point& y, double t);

// A value together with a rigorous bound on its absolute error.
struct Bounded {
    double value = 0.0;
    double error = 0.0;
};

// Short-time pieces of the heat-kernel split of resolvent sums. With
// 0 < tau <= split_tau(...), they are computed from the image expansion:
//   green:      int_0^tau exp(tE) K_t(x, y) dt               (x != y when D >= 2)
//   phi:        int_0^tau (exp(tE) - exp(-t mu2)) K_t(a, a) dt
//   derivative: int_0^tau t exp(tE) K_t(a, a) dt
Bounded short_time_green(const SpectralModel& model, const Point& x, const Point& y, double energy,
                         double tau);
Bounded short_time_phi(const SpectralModel& model, const Point& a, double energy, double mu_sq,
                       double tau);
Bounded short_time_derivative(const SpectralModel& model, const Point& a, double energy, double tau);

// Split time for energies up to max(|E|, mu2) in magnitude.
double split_tau(const SpectralModel& model, double energy_scale);

// Energy cap that makes the damped mode remainder exp(-tau (E_n - E)) negligible.
double split_cap(double energy, double tau);

// Bound on  sum_{E_n > cap} W exp(-tau (E_n - shift)) * g(E_n)  where
// g(E) = E_n - shift raised to -power (power = 1 or 2, or tau/(E-shift) + 1/(E-shift)^2
// when power == 3). Requires cap > shift and tau*(cap-shift) > D/2.
double split_mode_tail(const SpectralModel& model, double shift, double tau, double cap, int power);

}  // namespace pointint
