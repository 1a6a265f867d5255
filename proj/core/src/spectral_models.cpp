#include "pointint/spectral_models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>

#include "pointint/errors.hpp"

namespace pointint {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::interval: return "interval";
        case ModelKind::rectangle: return "rectangle";
        case ModelKind::box: return "box";
        case ModelKind::torus2d: return "torus2d";
        case ModelKind::torus3d: return "torus3d";
    }
    return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
    for (ModelKind k : {ModelKind::interval, ModelKind::rectangle, ModelKind::box,
                        ModelKind::torus2d, ModelKind::torus3d})
        if (to_string(k) == name) return k;
    throw DomainError("unknown model '" + name + "'");
}

double CountingBound::operator()(double t) const {
    if (t <= 0.0) return 0.0;
    const double s = std::sqrt(t);
    return A * std::pow(s, dim) * std::pow(1.0 + c / s, dim);
}

namespace {

std::size_t expected_dim(ModelKind kind) {
    switch (kind) {
        case ModelKind::interval: return 1;
        case ModelKind::rectangle:
        case ModelKind::torus2d: return 2;
        case ModelKind::box:
        case ModelKind::torus3d: return 3;
    }
    return 0;
}

bool mode_less(const Mode& a, const Mode& b) {
    return std::tie(a.energy, a.q, a.parity) < std::tie(b.energy, b.q, b.parity);
}

}  // namespace

SpectralModel::SpectralModel(ModelKind kind, std::vector<double> lengths)
    : kind_(kind), lengths_(std::move(lengths)) {
    if (lengths_.size() != expected_dim(kind_))
        throw DomainError(to_string(kind_) + " needs " + std::to_string(expected_dim(kind_)) +
                          " side lengths");
    for (double l : lengths_) {
        if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("side lengths must be positive");
        volume_ *= l;
    }
}

SpectralModel SpectralModel::interval(double length) { return {ModelKind::interval, {length}}; }
SpectralModel SpectralModel::rectangle(double l1, double l2) { return {ModelKind::rectangle, {l1, l2}}; }
SpectralModel SpectralModel::box(double l1, double l2, double l3) { return {ModelKind::box, {l1, l2, l3}}; }
SpectralModel SpectralModel::torus2d(double l1, double l2) { return {ModelKind::torus2d, {l1, l2}}; }
SpectralModel SpectralModel::torus3d(double l1, double l2, double l3) {
    return {ModelKind::torus3d, {l1, l2, l3}};
}

bool SpectralModel::contains(const Point& x) const {
    if (x.dim != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i) {
        if (!std::isfinite(x[i])) return false;
        if (x[i] < 0.0 || x[i] > lengths_[i]) return false;
    }
    return true;
}

void SpectralModel::require_inside(const Point& x, const char* what) const {
    if (contains(x)) return;
    std::ostringstream os;
    os << what << ": point (";
    for (std::size_t i = 0; i < x.dim; ++i) os << (i ? ", " : "") << x[i];
    os << ") is outside the " << to_string(kind_);
    throw DomainError(os.str());
}

double SpectralModel::mode_energy(const std::array<int, 3>& q) const {
    const double scale = periodic() ? 2.0 * pi : pi;
    double e = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
        const double k = scale * q[i] / lengths_[i];
        e += k * k;
    }
    return e;
}

std::vector<Mode> SpectralModel::enumerate_modes(double energy_cap, std::size_t max_modes) const {
    if (!std::isfinite(energy_cap)) throw DomainError("energy cap must be finite");
    std::vector<Mode> out;
    if (energy_cap < 0.0) return out;

    // Cheap a priori guard before allocating anything.
    const double estimate = counting_bound()(energy_cap);
    if (estimate > 4.0 * static_cast<double>(max_modes) + 64.0)
        throw ResourceError("enumeration up to E = " + std::to_string(energy_cap) + " needs about " +
                            std::to_string(static_cast<long long>(estimate)) + " modes (limit " +
                            std::to_string(max_modes) + ")");

    const std::size_t d = dim();
    const double scale = periodic() ? 2.0 * pi : pi;
    std::array<int, 3> qmax{0, 0, 0};
    for (std::size_t i = 0; i < d; ++i)
        qmax[i] = static_cast<int>(std::floor(lengths_[i] * std::sqrt(energy_cap) / scale)) + 1;
    const int qmin = periodic() ? 0 : 1;

    auto push = [&](const Mode& m) {
        if (out.size() >= max_modes)
            throw ResourceError("enumeration exceeds the limit of " + std::to_string(max_modes) +
                                " modes");
        out.push_back(m);
    };

    std::array<int, 3> q{0, 0, 0};
    // Dirichlet: q_i >= 1. Torus: canonical representative of {k, -k}, i.e. the
    // first nonzero component is positive.
    const int lo0 = qmin;
    for (q[0] = lo0; q[0] <= qmax[0]; ++q[0]) {
        const int lo1 = (d < 2) ? 0 : (periodic() ? (q[0] > 0 ? -qmax[1] : 0) : 1);
        const int hi1 = (d < 2) ? 0 : qmax[1];
        for (q[1] = lo1; q[1] <= hi1; ++q[1]) {
            const bool lead_zero = q[0] == 0 && q[1] == 0;
            const int lo2 = (d < 3) ? 0 : (periodic() ? (lead_zero ? 0 : -qmax[2]) : 1);
            const int hi2 = (d < 3) ? 0 : qmax[2];
            for (q[2] = lo2; q[2] <= hi2; ++q[2]) {
                const double e = mode_energy(q);
                if (e > energy_cap) continue;
                if (!periodic()) {
                    push({e, q, ModeParity::none});
                } else if (q == std::array<int, 3>{0, 0, 0}) {
                    push({e, q, ModeParity::none});
                } else {
                    push({e, q, ModeParity::cos});
                    push({e, q, ModeParity::sin});
                }
            }
        }
    }
    std::sort(out.begin(), out.end(), mode_less);
    return out;
}

double SpectralModel::mode_value(const Mode& mode, const Point& x) const {
    if (!periodic()) {
        double v = 1.0;
        for (std::size_t i = 0; i < dim(); ++i)
            v *= std::sqrt(2.0 / lengths_[i]) * std::sin(pi * mode.q[i] * x[i] / lengths_[i]);
        return v;
    }
    if (mode.parity == ModeParity::none) return 1.0 / std::sqrt(volume_);
    double phase = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) phase += 2.0 * pi * mode.q[i] * x[i] / lengths_[i];
    const double amp = std::sqrt(2.0 / volume_);
    return mode.parity == ModeParity::cos ? amp * std::cos(phase) : amp * std::sin(phase);
}

CountingBound SpectralModel::counting_bound() const {
    CountingBound b;
    b.dim = static_cast<int>(dim());
    switch (kind_) {
        case ModelKind::interval: b.A = lengths_[0] / pi; break;
        case ModelKind::rectangle: b.A = volume_ / (4.0 * pi); break;
        case ModelKind::box: b.A = volume_ / (6.0 * pi * pi); break;
        case ModelKind::torus2d:
        case ModelKind::torus3d: {
            b.A = dim() == 2 ? volume_ / (4.0 * pi) : volume_ / (6.0 * pi * pi);
            double s = 0.0;
            for (double l : lengths_) s += 1.0 / (l * l);
            b.c = pi * std::sqrt(s);
            break;
        }
    }
    return b;
}

double SpectralModel::max_mode_weight() const {
    if (periodic()) return 2.0 / volume_;
    return std::pow(2.0, static_cast<double>(dim())) / volume_;
}

double SpectralModel::heat_kernel_constant(double t_max) const {
    const double d = static_cast<double>(dim());
    if (!periodic()) return std::pow(4.0 * pi, -d / 2.0);
    // Product of per-axis bounds 1/sqrt(4 pi t) + 1/L, expanded; every term with
    // at least one singular factor is bounded by its value at t_max.
    double c = 0.0;
    const std::size_t n = dim();
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        double term = 1.0;
        int singular = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                term *= 1.0 / std::sqrt(4.0 * pi);
                ++singular;
            } else {
                term /= lengths_[i];
            }
        }
        term *= std::pow(t_max, (d - singular) / 2.0);
        c += term;
    }
    return c;
}

std::vector<Mode> enumerate_levels(const SpectralModel& model, double energy_cap,
                                   std::size_t max_modes) {
    return model.enumerate_modes(energy_cap, max_modes);
}

double eigenfunction_value(const SpectralModel& model, const Mode& mode, const Point& x) {
    model.require_inside(x, "eigenfunction_value");
    if (!model.periodic()) {
        for (std::size_t i = 0; i < model.dim(); ++i)
            if (mode.q[i] < 1) throw DomainError("Dirichlet quantum numbers start at 1");
    }
    return model.mode_value(mode, x);
}

double eigenfunction_value(const SpectralModel& model, const std::array<int, 3>& q, const Point& x) {
    if (model.periodic() && q != std::array<int, 3>{0, 0, 0})
        throw DomainError("torus modes need a parity");
    return eigenfunction_value(model, Mode{model.mode_energy(q), q, ModeParity::none}, x);
}

std::vector<Level> collapse_degenerate(const SpectralModel& model, std::span<const Mode> modes,
                                       const Point& a, double rel_tol) {
    std::vector<Level> levels;
    std::size_t i = 0;
    while (i < modes.size()) {
        const double e0 = modes[i].energy;
        const double tol = rel_tol * std::max(1.0, std::abs(e0));
        std::size_t j = i;
        CompensatedSum w;
        while (j < modes.size() && modes[j].energy - e0 <= tol) {
            const double v = model.mode_value(modes[j], a);
            w.add(v * v);
            ++j;
        }
        Level lv;
        lv.index = levels.size();
        lv.energy = e0;
        lv.multiplicity = j - i;
        lv.weight = w.value();
        lv.first_mode = i;
        levels.push_back(lv);
        i = j;
    }
    return levels;
}

LevelTable LevelTable::build(const SpectralModel& model, const Point& center, double energy_cap,
                             std::size_t max_modes, double rel_tol) {
    model.require_inside(center, "LevelTable");
    LevelTable t(model, center, energy_cap);
    t.modes_ = model.enumerate_modes(energy_cap, max_modes);
    t.center_values_.resize(t.modes_.size());
    for (std::size_t m = 0; m < t.modes_.size(); ++m)
        t.center_values_[m] = model.mode_value(t.modes_[m], center);
    t.levels_ = collapse_degenerate(model, t.modes_, center, rel_tol);
    return t;
}

std::size_t LevelTable::modes_in_levels(std::size_t n_levels) const {
    if (n_levels == 0) return 0;
    if (n_levels > levels_.size()) throw DomainError("level count exceeds table");
    const Level& last = levels_[n_levels - 1];
    return last.first_mode + last.multiplicity;
}

std::size_t LevelTable::levels_below(double e) const {
    auto it = std::upper_bound(levels_.begin(), levels_.end(), e,
                               [](double v, const Level& l) { return v < l.energy; });
    return static_cast<std::size_t>(it - levels_.begin());
}

}  // namespace pointint
