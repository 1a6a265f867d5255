#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pointint/spectral_models.hpp"

namespace pointint {

// Point/weight rule over the whole domain. The center a is never a node.
struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;

    std::size_t size() const { return points.size(); }
};

struct GridSpec {
    std::size_t cells = 4096;       // fine cells per axis (multiple of 4)
    std::size_t patch_cells = 0;    // fine cells per side of a replaced by the singular patch (multiple of 4)
    std::size_t patch_order = 24;   // Gauss-Legendre points per Duffy direction

    // 1D: no patch. 2D/3D: an 8-cell patch, 24-point rules.
    static GridSpec for_model(const SpectralModel& model, std::size_t cells);
};

// Nested midpoint rules at spacing h, 2h and 4h. Each axis is split at a so
// that a lies on a cell face; with patch_cells > 0 the cells within the
// patch around a are replaced in every rule by the same Duffy-mapped
// Gauss-Legendre rule, which absorbs the r^{-(D-2)} / log r singularity.
struct OffsetQuadrature {
    QuadratureRule fine;
    QuadratureRule coarse;
    QuadratureRule coarsest;
    GridSpec spec;
    Point center;

    static OffsetQuadrature build(const SpectralModel& model, const Point& a, const GridSpec& spec);
};

// Richardson extrapolant R_h = I_h + (I_h - I_2h)/3; the error estimate is
// |R_h - R_2h|, the change from the next coarser extrapolant.
struct Certified {
    double value = 0.0;
    double error = 0.0;
};

// Order-independent weighted sums: the terms are sorted before compensated
// summation, so any permutation of (weights, f, g) gives the same bits.
double ordered_sum(std::span<const double> terms);
double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g);
double weighted_sum(std::span<const double> w, std::span<const double> f);

Certified richardson(double fine, double coarse, double coarsest);

// Samples fn on all three rules (in parallel) and returns them.
struct Sampled {
    std::vector<double> fine;
    std::vector<double> coarse;
    std::vector<double> coarsest;
};
Sampled sample(const OffsetQuadrature& q, const std::function<double(const Point&)>& fn);

Certified integrate_product(const OffsetQuadrature& q, const Sampled& f, const Sampled& g);
Certified integrate(const OffsetQuadrature& q, const Sampled& f);

}  // namespace pointint
