#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pointint/numeric.hpp"

namespace pointint {

// Units: hbar^2 / 2m = 1, so H0 = -Laplacian and energies are dimensionless.
enum class ModelKind { interval, rectangle, box, torus2d, torus3d };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

// Tori use the real trigonometric basis: 1/sqrt(V), sqrt(2/V) cos(k.x),
// sqrt(2/V) sin(k.x), one cos/sin pair per wave vector pair {k, -k}.
enum class ModeParity : std::uint8_t { none, cos, sin };

struct Mode {
    double energy = 0.0;
    std::array<int, 3> q{0, 0, 0};
    ModeParity parity = ModeParity::none;
};

// Upper bound N(t) <= A t^{D/2} (1 + c / sqrt(t))^D on the number of modes with
// energy <= t. Exact for no model; valid for every t > 0.
struct CountingBound {
    double A = 0.0;
    double c = 0.0;
    int dim = 1;

    double operator()(double t) const;
};

class SpectralModel {
public:
    SpectralModel(ModelKind kind, std::vector<double> lengths);

    static SpectralModel interval(double length);
    static SpectralModel rectangle(double l1, double l2);
    static SpectralModel box(double l1, double l2, double l3);
    static SpectralModel torus2d(double l1, double l2);
    static SpectralModel torus3d(double l1, double l2, double l3);

    ModelKind kind() const { return kind_; }
    std::size_t dim() const { return lengths_.size(); }
    const std::vector<double>& lengths() const { return lengths_; }
    double length(std::size_t axis) const { return lengths_.at(axis); }
    double volume() const { return volume_; }
    bool periodic() const { return kind_ == ModelKind::torus2d || kind_ == ModelKind::torus3d; }

    bool contains(const Point& x) const;
    void require_inside(const Point& x, const char* what) const;

    // All modes with energy <= energy_cap, sorted by energy then quantum numbers.
    std::vector<Mode> enumerate_modes(double energy_cap, std::size_t max_modes) const;

    // L2-normalized eigenfunction of the given mode. No domain check.
    double mode_value(const Mode& mode, const Point& x) const;
    double mode_energy(const std::array<int, 3>& q) const;

    CountingBound counting_bound() const;
    // sup_x |phi_n(x)|^2 over all modes.
    double max_mode_weight() const;
    // Constant C with K_t(x,x) <= 1/V + C t^{-D/2} for all x and 0 < t <= t_max.
    double heat_kernel_constant(double t_max) const;

private:
    ModelKind kind_;
    std::vector<double> lengths_;
    double volume_ = 1.0;
};

// Spectral operations -------------------------------------------------------

// Raw (possibly degenerate) eigenvalue list up to energy_cap.
std::vector<Mode> enumerate_levels(const SpectralModel& model, double energy_cap,
                                   std::size_t max_modes = 20'000'000);

// phi_n(x) with a domain check. For Dirichlet models q holds the positive
// quantum numbers; tori additionally need the parity.
double eigenfunction_value(const SpectralModel& model, const Mode& mode, const Point& x);
double eigenfunction_value(const SpectralModel& model, const std::array<int, 3>& q, const Point& x);

// Degeneracy-collapsed level. weight = sum over the eigenspace of |phi(a)|^2,
// which is the squared value at a of the single eigenspace vector that does
// not vanish there.
struct Level {
    std::size_t index = 0;
    double energy = 0.0;
    std::size_t multiplicity = 1;
    double weight = 0.0;
    std::size_t first_mode = 0;
};

inline constexpr double default_degeneracy_tol = 1e-9;

// Merges consecutive modes whose energies agree within rel_tol * max(1, E).
std::vector<Level> collapse_degenerate(const SpectralModel& model, std::span<const Mode> modes,
                                       const Point& a, double rel_tol = default_degeneracy_tol);

// The spectral data every downstream module works from: sorted modes up to a
// cap, their values at the interaction center, and the collapsed levels.
class LevelTable {
public:
    static LevelTable build(const SpectralModel& model, const Point& center, double energy_cap,
                            std::size_t max_modes = 20'000'000,
                            double rel_tol = default_degeneracy_tol);

    const SpectralModel& model() const { return model_; }
    const Point& center() const { return center_; }
    double energy_cap() const { return cap_; }
    const std::vector<Mode>& modes() const { return modes_; }
    const std::vector<Level>& levels() const { return levels_; }
    // phi_m(center) for every mode m.
    const std::vector<double>& center_values() const { return center_values_; }

    std::size_t level_count() const { return levels_.size(); }
    // Number of modes contained in levels [0, n_levels).
    std::size_t modes_in_levels(std::size_t n_levels) const;
    // Number of levels with energy <= e.
    std::size_t levels_below(double e) const;

private:
    LevelTable(SpectralModel model, Point center, double cap)
        : model_(std::move(model)), center_(center), cap_(cap) {}

    SpectralModel model_;
    Point center_;
    double cap_;
    std::vector<Mode> modes_;
    std::vector<Level> levels_;
    std::vector<double> center_values_;
};

}  // namespace pointint
