#include "pointint/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/numeric.hpp"
#include "pointint/special_functions.hpp"

namespace pointint {

GridSpec GridSpec::for_model(const SpectralModel& model, std::size_t cells) {
    GridSpec g;
    g.cells = cells;
    g.patch_cells = model.dim() == 1 ? 0 : 8;
    g.patch_order = 24;
    return g;
}

namespace {

struct AxisCells {
    std::vector<double> center;
    std::vector<double> width;
    std::vector<long> offset;  // signed cell index from a: 0, 1, ... right; -1, -2, ... left
    double left_h = 0.0;
    double right_h = 0.0;
};

double wrap(double x, double length) {
    double y = std::fmod(x, length);
    if (y < 0.0) y += length;
    return y;
}

// Cells along one axis at scale s (1 = fine, 2 = coarse, 4 = coarsest).
AxisCells axis_cells(const SpectralModel& model, std::size_t axis, double a, std::size_t fine_left,
                     std::size_t fine_right, std::size_t s) {
    AxisCells c;
    const double len = model.length(axis);
    const std::size_t nl = fine_left / s, nr = fine_right / s;
    if (model.periodic()) {
        const std::size_t m = nl + nr;
        const double h = len / static_cast<double>(m);
        c.left_h = c.right_h = h;
        for (std::size_t j = 0; j < m; ++j) {
            c.center.push_back(wrap(a + (static_cast<double>(j) + 0.5) * h, len));
            c.width.push_back(h);
            c.offset.push_back(j < nr ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(m));
        }
        return c;
    }
    c.left_h = a / static_cast<double>(nl);
    c.right_h = (len - a) / static_cast<double>(nr);
    for (std::size_t j = nl; j-- > 0;) {
        c.center.push_back(a - (static_cast<double>(j) + 0.5) * c.left_h);
        c.width.push_back(c.left_h);
        c.offset.push_back(-static_cast<long>(j) - 1);
    }
    for (std::size_t j = 0; j < nr; ++j) {
        c.center.push_back(std::min(len, a + (static_cast<double>(j) + 0.5) * c.right_h));
        c.width.push_back(c.right_h);
        c.offset.push_back(static_cast<long>(j));
    }
    return c;
}

void add_patch(QuadratureRule& rule, const SpectralModel& model, const Point& a, const std::array<double, 3>& left,
               const std::array<double, 3>& right, std::size_t order) {
    const std::size_t d = model.dim();
    const GaussLegendre& gl = gauss_legendre(order);
    std::vector<double> t(order), tw(order);
    for (std::size_t i = 0; i < order; ++i) {
        t[i] = 0.5 * (1.0 + gl.nodes[i]);
        tw[i] = 0.5 * gl.weights[i];
    }
    const std::size_t quadrants = std::size_t{1} << d;
    for (std::size_t q = 0; q < quadrants; ++q) {
        std::array<double, 3> ext{}, sign{};
        double vol = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const bool neg = (q >> i) & 1u;
            sign[i] = neg ? -1.0 : 1.0;
            ext[i] = neg ? left[i] : right[i];
            vol *= ext[i];
        }
        // One pyramid per face opposite a: x_f = u X_f, x_j = u v_j X_j.
        for (std::size_t f = 0; f < d; ++f) {
            const std::size_t inner = d == 1 ? 1 : (d == 2 ? order : order * order);
            for (std::size_t iu = 0; iu < order; ++iu) {
                const double u = t[iu];
                const double jac = std::pow(u, static_cast<double>(d - 1)) * vol;
                for (std::size_t iv = 0; iv < inner; ++iv) {
                    Point p = a;
                    double w = tw[iu] * jac;
                    std::size_t rest = iv;
                    for (std::size_t j = 0; j < d; ++j) {
                        double r;
                        if (j == f) {
                            r = u;
                        } else {
                            const std::size_t k = rest % order;
                            rest /= order;
                            r = u * t[k];
                            w *= tw[k];
                        }
                        double x = a[j] + sign[j] * r * ext[j];
                        if (model.periodic()) x = wrap(x, model.length(j));
                        p[j] = x;
                    }
                    rule.points.push_back(p);
                    rule.weights.push_back(w);
                }
            }
        }
    }
}

QuadratureRule build_rule(const SpectralModel& model, const Point& a, const std::array<std::size_t, 3>& fl,
                          const std::array<std::size_t, 3>& fr, std::size_t patch, std::size_t order, std::size_t s) {
    const std::size_t d = model.dim();
    std::array<AxisCells, 3> ax;
    std::array<double, 3> left{}, right{};
    for (std::size_t i = 0; i < d; ++i) {
        ax[i] = axis_cells(model, i, a[i], fl[i], fr[i], s);
        left[i] = ax[i].left_h * static_cast<double>(patch / s);
        right[i] = ax[i].right_h * static_cast<double>(patch / s);
    }
    const long p = static_cast<long>(patch / s);
    QuadratureRule rule;
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= ax[i].center.size();
    rule.points.reserve(total);
    rule.weights.reserve(total);
    std::array<std::size_t, 3> idx{0, 0, 0};
    for (std::size_t n = 0; n < total; ++n) {
        std::size_t rest = n;
        for (std::size_t i = d; i-- > 0;) {
            idx[i] = rest % ax[i].center.size();
            rest /= ax[i].center.size();
        }
        bool near = p > 0;
        Point pt = a;
        double w = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            const long off = ax[i].offset[idx[i]];
            near = near && off >= -p && off < p;
            pt[i] = ax[i].center[idx[i]];
            w *= ax[i].width[idx[i]];
        }
        if (near) continue;
        rule.points.push_back(pt);
        rule.weights.push_back(w);
    }
    if (p > 0) add_patch(rule, model, a, left, right, order);
    return rule;
}

}  // namespace

OffsetQuadrature OffsetQuadrature::build(const SpectralModel& model, const Point& a, const GridSpec& spec) {
    model.require_inside(a, "quadrature center");
    const std::size_t d = model.dim();
    if (spec.cells < 8 || spec.cells % 4 != 0)
        throw DomainError("quadrature needs a multiple of 4 cells per axis, at least 8");
    if (spec.patch_cells % 4 != 0) throw DomainError("patch_cells must be a multiple of 4");
    if (d > 1 && spec.patch_cells == 0)
        throw DomainError("2D/3D quadrature needs a singular patch around the center");
    if (spec.patch_cells > 0 && spec.patch_order < 2) throw DomainError("patch_order must be at least 2");
    std::array<std::size_t, 3> fl{}, fr{};
    // Split each axis at a on the coarsest (4h) grid so all three rules nest.
    const std::size_t coarse = spec.cells / 4;
    const std::size_t min_side = std::max<std::size_t>(1, spec.patch_cells / 4);
    for (std::size_t i = 0; i < d; ++i) {
        const double len = model.length(i);
        std::size_t cl, cr;
        if (model.periodic()) {
            cr = coarse - coarse / 2;
            cl = coarse / 2;
        } else {
            if (!(a[i] > 0.0 && a[i] < len)) throw DomainError("quadrature center must be interior");
            cl = static_cast<std::size_t>(std::llround(static_cast<double>(coarse) * a[i] / len));
            cl = std::clamp<std::size_t>(cl, min_side, coarse - min_side);
            cr = coarse - cl;
        }
        if (cl < min_side || cr < min_side) throw DomainError("grid too coarse for the singular patch");
        fl[i] = 4 * cl;
        fr[i] = 4 * cr;
    }
    OffsetQuadrature q;
    q.spec = spec;
    q.center = a;
    q.fine = build_rule(model, a, fl, fr, spec.patch_cells, spec.patch_order, 1);
    q.coarse = build_rule(model, a, fl, fr, spec.patch_cells, spec.patch_order, 2);
    q.coarsest = build_rule(model, a, fl, fr, spec.patch_cells, spec.patch_order, 4);
    return q;
}

double ordered_sum(std::span<const double> terms) {
    std::vector<double> v(terms.begin(), terms.end());
    std::sort(v.begin(), v.end());
    CompensatedSum s;
    for (double x : v) s.add(x);
    return s.value();
}

double weighted_dot(std::span<const double> w, std::span<const double> f, std::span<const double> g) {
    if (w.size() != f.size() || w.size() != g.size()) throw DomainError("weighted_dot: size mismatch");
    std::vector<double> t(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) t[i] = w[i] * f[i] * g[i];
    return ordered_sum(t);
}

double weighted_sum(std::span<const double> w, std::span<const double> f) {
    if (w.size() != f.size()) throw DomainError("weighted_sum: size mismatch");
    std::vector<double> t(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) t[i] = w[i] * f[i];
    return ordered_sum(t);
}

Certified richardson(double fine, double coarse, double coarsest) {
    const double r1 = fine + (fine - coarse) / 3.0;
    const double r2 = coarse + (coarse - coarsest) / 3.0;
    return {r1, std::abs(r1 - r2)};
}

Sampled sample(const OffsetQuadrature& q, const std::function<double(const Point&)>& fn) {
    Sampled s;
    s.fine.resize(q.fine.size());
    s.coarse.resize(q.coarse.size());
    s.coarsest.resize(q.coarsest.size());
    parallel_for(q.fine.size(), thread_count(), [&](std::size_t i) { s.fine[i] = fn(q.fine.points[i]); });
    parallel_for(q.coarse.size(), thread_count(), [&](std::size_t i) { s.coarse[i] = fn(q.coarse.points[i]); });
    parallel_for(q.coarsest.size(), thread_count(), [&](std::size_t i) { s.coarsest[i] = fn(q.coarsest.points[i]); });
    return s;
}

Certified integrate_product(const OffsetQuadrature& q, const Sampled& f, const Sampled& g) {
    return richardson(weighted_dot(q.fine.weights, f.fine, g.fine), weighted_dot(q.coarse.weights, f.coarse, g.coarse),
                      weighted_dot(q.coarsest.weights, f.coarsest, g.coarsest));
}

Certified integrate(const OffsetQuadrature& q, const Sampled& f) {
    return richardson(weighted_sum(q.fine.weights, f.fine), weighted_sum(q.coarse.weights, f.coarse),
                      weighted_sum(q.coarsest.weights, f.coarsest));
}

}  // namespace pointint
