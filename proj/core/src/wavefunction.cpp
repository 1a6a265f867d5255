#include "pointint/wavefunction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/numeric.hpp"

namespace pointint {

EigenfunctionEvaluator::EigenfunctionEvaluator(const LevelTable& table, const Scheme& scheme,
                                               const PerturbedLevel& level, double precision_target)
    : table_(&table), level_(level) {
    switch (level.status) {
        case LevelStatus::absent:
            throw DomainError("no eigenfunction for an absent level");
        case LevelStatus::unchanged_nodal:
            if (level.index >= table.level_count()) throw DomainError("nodal level beyond the table");
            return;
        case LevelStatus::shifted:
            break;
    }
    const PhiValue p = phi(level.energy_star, table, scheme, precision_target / 10.0);
    if (!(p.derivative > 0.0)) throw ConsistencyError("Phi' must be positive at a root");
    phi_derivative_ = p.derivative;
    scale_ = 1.0 / std::sqrt(p.derivative);
    green_.emplace(table, table.center(), level.energy_star, precision_target);
}

EigenfunctionEvaluator::Value EigenfunctionEvaluator::operator()(const Point& x) const {
    const SpectralModel& m = table_->model();
    if (!green_) {
        const Mode& md = table_->modes()[table_->levels()[level_.index].first_mode];
        return {eigenfunction_value(m, md, x), 0.0, false};
    }
    if (m.dim() > 1 && distance_sq(x, table_->center()) == 0.0)
        return {std::numeric_limits<double>::quiet_NaN(), 0.0, true};
    const GreenValue g = (*green_)(x);
    return {scale_ * g.value, scale_ * g.tail_bound, false};
}

Sampled sample_eigenfunction(const EigenfunctionEvaluator& psi, const OffsetQuadrature& q) {
    return sample(q, [&](const Point& x) { return psi(x).value; });
}

NormCertificate norm_certificate(const OffsetQuadrature& q, const Sampled& psi) {
    const Certified c = integrate_product(q, psi, psi);
    return {c.value, c.error, std::abs(c.value - 1.0)};
}

Eigenfunction eigenfunction(const PerturbedLevel& level, const std::vector<Point>& grid, const LevelTable& table,
                            const Scheme& scheme, const GridSpec& norm_grid, double precision_target) {
    const EigenfunctionEvaluator psi(table, scheme, level, precision_target);
    Eigenfunction out;
    out.level = level;
    out.grid = grid;
    out.values.resize(grid.size());
    std::vector<double> bounds(grid.size());
    std::vector<char> excl(grid.size());
    parallel_for(grid.size(), thread_count(), [&](std::size_t i) {
        table.model().require_inside(grid[i], "eigenfunction grid");
        const auto v = psi(grid[i]);
        out.values[i] = v.value;
        bounds[i] = v.bound;
        excl[i] = v.excluded;
    });
    out.excluded.assign(excl.begin(), excl.end());
    for (double b : bounds) out.max_bound = std::max(out.max_bound, b);
    const auto q = OffsetQuadrature::build(table.model(), table.center(), norm_grid);
    out.certificate = norm_certificate(q, sample_eigenfunction(psi, q));
    return out;
}

std::vector<Point> uniform_grid(const SpectralModel& model, std::size_t n) {
    if (n < 2) throw DomainError("uniform grid needs at least 2 points per axis");
    const std::size_t d = model.dim();
    std::array<std::vector<double>, 3> ax;
    for (std::size_t i = 0; i < d; ++i) {
        const double len = model.length(i);
        const double h = model.periodic() ? len / static_cast<double>(n) : len / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) ax[i].push_back(std::min(len, h * static_cast<double>(j)));
    }
    std::size_t total = 1;
    for (std::size_t i = 0; i < d; ++i) total *= n;
    std::vector<Point> pts;
    pts.reserve(total);
    for (std::size_t k = 0; k < total; ++k) {
        Point p;
        p.dim = d;
        std::size_t rest = k;
        for (std::size_t i = d; i-- > 0;) {
            p[i] = ax[i][rest % n];
            rest /= n;
        }
        pts.push_back(p);
    }
    return pts;
}

namespace {

void guard_phi(double phi_value, double phi_error, const Scheme& scheme, double energy) {
    if (std::abs(phi_value) <= krein_phi_guard * std::max(1.0, std::abs(scheme.inv_alpha())) ||
        std::abs(phi_value) <= phi_error) {
        std::ostringstream os;
        os.precision(17);
        os << "Krein resolvent at E = " << energy << " is at a perturbed eigenvalue (Phi = " << phi_value << ")";
        throw PoleProximityError(os.str());
    }
}

}  // namespace

KreinValue krein_resolvent(const Point& x, const Point& y, double energy, const LevelTable& table,
                           const Scheme& scheme, double precision_target) {
    const PhiValue p = phi(energy, table, scheme, precision_target / 10.0);
    guard_phi(p.value, p.tail_bound, scheme, energy);
    const GreenValue gxy = green0(table, x, y, energy, precision_target);
    const Green0Evaluator ga(table, table.center(), energy, precision_target);
    const GreenValue gx = ga(x);
    const GreenValue gy = ga(y);
    KreinValue k;
    k.phi = p.value;
    k.free_part = gxy.value;
    k.correction = gx.value * gy.value / p.value;
    k.value = k.free_part + k.correction;
    const double rel = gx.tail_bound / std::max(std::abs(gx.value), 1e-300) +
                       gy.tail_bound / std::max(std::abs(gy.value), 1e-300) + p.tail_bound / std::abs(p.value);
    k.bound = gxy.tail_bound + std::abs(k.correction) * rel;
    return k;
}

KreinValue krein_resolvent_truncated(const Point& x, const Point& y, double energy, std::size_t n_levels,
                                     const LevelTable& table, const Scheme& scheme) {
    const PhiValue p = phi_truncated(energy, n_levels, table, scheme);
    guard_phi(p.value, 0.0, scheme, energy);
    const std::size_t nm = table.modes_in_levels(n_levels);
    const SpectralModel& m = table.model();
    CompensatedSum sxy, sx, sy;
    for (std::size_t i = 0; i < nm; ++i) {
        const Mode& md = table.modes()[i];
        const double d = md.energy - energy;
        const double px = m.mode_value(md, x), py = m.mode_value(md, y), pa = table.center_values()[i];
        sxy.add(px * py / d);
        sx.add(px * pa / d);
        sy.add(pa * py / d);
    }
    KreinValue k;
    k.phi = p.value;
    k.free_part = sxy.value();
    k.correction = sx.value() * sy.value() / p.value;
    k.value = k.free_part + k.correction;
    k.bound = 4e-16 * (sxy.magnitude() + std::abs(k.correction) * 3.0);
    return k;
}

ResidueCheck residue_check(const Point& x, const Point& y, const PerturbedLevel& level, const LevelTable& table,
                           const Scheme& scheme, double relative_offset) {
    if (level.status != LevelStatus::shifted) throw DomainError("residue check needs a shifted level");
    const double e = level.energy_star;
    double gap = level.base_energy - e;
    if (std::isfinite(level.bracket_lo)) gap = std::min(gap, e - level.bracket_lo);
    const double delta = relative_offset * gap;
    const double gm = krein_resolvent(x, y, e - delta, table, scheme).value;
    const double gp = krein_resolvent(x, y, e + delta, table, scheme).value;
    const EigenfunctionEvaluator psi(table, scheme, level);
    ResidueCheck r;
    r.estimate = 0.5 * (delta * gm - delta * gp);
    r.expected = psi(x).value * psi(y).value;
    r.deviation = std::abs(r.estimate - r.expected);
    return r;
}

RenormalizedKernel::RenormalizedKernel(const LevelTable& table, const Scheme& scheme,
                                       const std::vector<PerturbedLevel>& levels, double precision_target)
    : table_(&table), weights_(effective_weights(table)) {
    for (const auto& l : levels) {
        if (l.status == LevelStatus::absent) continue;
        max_level_ = std::max(max_level_, l.index + 1);
        if (l.status != LevelStatus::shifted) continue;
        psi_.emplace_back(table, scheme, l, precision_target);
        energies_.push_back(l.energy_star);
    }
    if (max_level_ > table.level_count()) throw DomainError("kernel levels beyond the table");
}

KernelValue RenormalizedKernel::operator()(const Point& x, const Point& y) const {
    CompensatedSum s;
    for (std::size_t i = 0; i < psi_.size(); ++i) s.add(energies_[i] * psi_[i](x).value * psi_[i](y).value);
    const SpectralModel& m = table_->model();
    const auto& w = weights_;
    const auto& lv = table_->levels();
    for (std::size_t j = 0; j < max_level_; ++j) {
        const std::size_t first = lv[j].first_mode;
        const std::size_t last = first + lv[j].multiplicity;
        double proj = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t i = first; i < last; ++i) {
            const Mode& md = table_->modes()[i];
            const double px = m.mode_value(md, x), py = m.mode_value(md, y);
            proj += px * py;
            cx += table_->center_values()[i] * px;
            cy += table_->center_values()[i] * py;
        }
        // Remove the direction that couples to a; it is carried by psi.
        if (w[j] != 0.0) proj -= cx * cy / lv[j].weight;
        s.add(lv[j].energy * proj);
    }
    return {s.value(), psi_.size()};
}

DomainNormSeries domain_vector_norms(const PerturbedLevel& k, const PerturbedLevel& l, const LevelTable& table) {
    for (const auto* p : {&k, &l})
        if (p->status != LevelStatus::shifted) throw DomainError("domain vector needs two shifted levels");
    DomainNormSeries out;
    const auto w = effective_weights(table);
    const auto& lv = table.levels();
    const double ek = k.energy_star, el = l.energy_star;
    const double pref = (ek - el) * (ek - el);
    const double wmax = table.model().max_mode_weight();
    CompensatedSum s;
    std::size_t next = 1;
    for (std::size_t n = 0; n < lv.size(); ++n) {
        if (w[n] != 0.0) {
            const double e = lv[n].energy;
            const double dk = e - ek, dl = e - el;
            s.add(pref * e * e * w[n] / (dk * dk * dl * dl));
        }
        if (n + 1 == next || n + 1 == lv.size()) {
            out.n.push_back(n + 1);
            out.partial.push_back(s.value());
            const double lambda = lv[n].energy;
            double tail = std::numeric_limits<double>::infinity();
            if (pref == 0.0)
                tail = 0.0;
            else if (lambda > 3.0 * std::max(std::abs(ek), std::abs(el)))
                tail = pref * (81.0 / 16.0) * wmax *
                       inverse_square_tail(lambda, table.modes_in_levels(n + 1), table.model());
            out.tail.push_back(tail);
            if (n + 1 == next) next *= 2;
        }
    }
    return out;
}

}  // namespace pointint
