#include "pointint/spectrum_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "pointint/errors.hpp"
#include "pointint/green.hpp"
#include "pointint/heat_kernel.hpp"

namespace pointint {

std::string to_string(LevelStatus status) {
    switch (status) {
        case LevelStatus::shifted: return "shifted";
        case LevelStatus::unchanged_nodal: return "unchanged_nodal";
        case LevelStatus::absent: return "absent";
    }
    return "unknown";
}

LevelStatus level_status_from_string(const std::string& s) {
    for (LevelStatus st : {LevelStatus::shifted, LevelStatus::unchanged_nodal, LevelStatus::absent})
        if (to_string(st) == s) return st;
    throw DomainError("unknown level status '" + s + "'");
}

namespace {

struct Sample {
    double e = 0.0;
    double v = 0.0;
    double err = 0.0;
    double der = 0.0;
};

using PhiFn = std::function<Sample(double)>;

struct Root {
    Sample best;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t iterations = 0;
};

// Root of a decreasing function with f(lo) > 0 > f(hi): bisection down to a
// fraction of the gap, then Illinois-guarded secant steps.
Root refine(const PhiFn& f, Sample lo, Sample hi, double gap, const SolverOptions& opt) {
    Root r;
    r.best = std::abs(lo.v) < std::abs(hi.v) ? lo : hi;
    auto done = [&](const Sample& s) { return std::abs(s.v) + s.err <= opt.tol; };
    auto consider = [&](const Sample& s) {
        if (std::abs(s.v) + s.err < std::abs(r.best.v) + r.best.err) r.best = s;
    };
    std::size_t it = 0;
    auto narrow = [&](const Sample& s) {
        if (s.v > 0.0)
            lo = s;
        else
            hi = s;
    };
    while (hi.e - lo.e > opt.bisect_fraction * gap && it < opt.max_iterations) {
        const Sample m = f(0.5 * (lo.e + hi.e));
        ++it;
        consider(m);
        if (done(m)) {
            r.lo = lo.e;
            r.hi = hi.e;
            r.iterations = it;
            narrow(m);
            r.lo = lo.e;
            r.hi = hi.e;
            return r;
        }
        narrow(m);
    }
    double flo = lo.v, fhi = hi.v;
    int side = 0;
    while (it < opt.max_iterations) {
        if (done(r.best)) break;
        const double width = hi.e - lo.e;
        if (width <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo.e), std::abs(hi.e)))
            break;
        double x = hi.e - fhi * (hi.e - lo.e) / (fhi - flo);
        const double pad = 1e-3 * width;
        if (!(x > lo.e + pad && x < hi.e - pad)) x = 0.5 * (lo.e + hi.e);
        const Sample s = f(x);
        ++it;
        consider(s);
        if (s.v > 0.0) {
            lo = s;
            flo = s.v;
            if (side == -1) fhi *= 0.5;
            side = -1;
        } else {
            hi = s;
            fhi = s.v;
            if (side == 1) flo *= 0.5;
            side = 1;
        }
    }
    r.lo = lo.e;
    r.hi = hi.e;
    r.iterations = it;
    return r;
}

PerturbedLevel finish(std::size_t k, double base, double blo, double bhi, const Root& r) {
    PerturbedLevel p;
    p.index = k;
    p.base_energy = base;
    p.energy_star = r.best.e;
    p.status = LevelStatus::shifted;
    p.bracket_lo = blo;
    p.bracket_hi = bhi;
    p.root_lo = r.lo;
    p.root_hi = r.hi;
    p.residual = std::abs(r.best.v) + r.best.err;
    p.phi_derivative = r.best.der;
    p.iterations = r.iterations;
    return p;
}

std::ptrdiff_t previous_coupled(const std::vector<double>& w, std::size_t k) {
    for (std::size_t j = k; j-- > 0;)
        if (w[j] != 0.0) return static_cast<std::ptrdiff_t>(j);
    return -1;
}

std::ptrdiff_t next_coupled(const std::vector<double>& w, std::size_t k) {
    for (std::size_t j = k + 1; j < w.size(); ++j)
        if (w[j] != 0.0) return static_cast<std::ptrdiff_t>(j);
    return -1;
}

std::ptrdiff_t first_coupled(const std::vector<double>& w) {
    for (std::size_t j = 0; j < w.size(); ++j)
        if (w[j] != 0.0) return static_cast<std::ptrdiff_t>(j);
    return -1;
}

constexpr double edge_fraction = 1e-11;

PerturbedLevel ground_search(const PhiFn& f, const LevelTable& table, const std::vector<double>& w, double floor,
                             const SolverOptions& opt) {
    const std::ptrdiff_t fc = first_coupled(w);
    if (fc < 0) throw DomainError("the center is a node of every level; nothing couples");
    const auto& lv = table.levels();
    const std::size_t k = static_cast<std::size_t>(fc);
    const double top = lv[k].energy;
    const std::ptrdiff_t nx = next_coupled(w, k);
    double gap = nx >= 0 ? lv[static_cast<std::size_t>(nx)].energy - top : std::max(1.0, std::abs(top));
    if (k > 0) gap = std::min(gap, std::max(top - lv[k - 1].energy, 1e-3 * gap));
    Sample hi = f(top - edge_fraction * gap);
    if (!(hi.v < 0.0)) {
        std::ostringstream os;
        os << "Phi does not diverge to -inf below the lowest coupled level E = " << top;
        throw ConsistencyError(os.str());
    }
    double d = gap;
    Sample lo = f(top - d);
    std::size_t it = 2;
    while (!(lo.v > 0.0)) {
        hi = lo;
        d *= 2.0;
        if (top - d < floor) {
            PerturbedLevel p;
            p.index = k;
            p.base_energy = top;
            p.energy_star = std::numeric_limits<double>::quiet_NaN();
            p.status = LevelStatus::absent;
            p.bracket_lo = floor;
            p.bracket_hi = top;
            p.root_lo = p.root_hi = std::numeric_limits<double>::quiet_NaN();
            p.iterations = it;
            return p;
        }
        lo = f(top - d);
        ++it;
    }
    Root r = refine(f, lo, hi, hi.e - lo.e, opt);
    r.iterations += it;
    return finish(k, top, -std::numeric_limits<double>::infinity(), top, r);
}

PerturbedLevel level_search(std::size_t k, const PhiFn& f, const LevelTable& table, const std::vector<double>& w,
                            double floor, const SolverOptions& opt) {
    if (k >= table.level_count()) throw DomainError("level index beyond the level table");
    const auto& lv = table.levels();
    if (w[k] == 0.0) {
        PerturbedLevel p;
        p.index = k;
        p.base_energy = lv[k].energy;
        p.energy_star = lv[k].energy;
        p.status = LevelStatus::unchanged_nodal;
        p.bracket_lo = p.bracket_hi = p.root_lo = p.root_hi = lv[k].energy;
        return p;
    }
    const std::ptrdiff_t pc = previous_coupled(w, k);
    if (pc < 0) return ground_search(f, table, w, floor, opt);
    const double lo_e = lv[static_cast<std::size_t>(pc)].energy;
    const double hi_e = lv[k].energy;
    const double gap = hi_e - lo_e;
    const Sample lo = f(lo_e + edge_fraction * gap);
    const Sample hi = f(hi_e - edge_fraction * gap);
    if (!(lo.v > 0.0) || !(hi.v < 0.0)) {
        std::ostringstream os;
        os.precision(17);
        os << "no sign change of Phi in (" << lo_e << ", " << hi_e << "): Phi(lo) = " << lo.v
           << ", Phi(hi) = " << hi.v;
        throw ConsistencyError(os.str());
    }
    Root r = refine(f, lo, hi, gap, opt);
    r.iterations += 2;
    return finish(k, hi_e, lo_e, hi_e, r);
}

double floor_energy(const Scheme& s, const SolverOptions& opt) { return -opt.ground_floor * std::max(1.0, s.mu_sq); }

// Lower end of the ground search window for alpha_R < 0. In D >= 2 the
// small-distance behaviour of G0 gives the scale of the deep root.
double deep_ground_estimate(const SpectralModel& model, const Scheme& s, const SolverOptions& opt) {
    const double scale = std::max(1.0, s.mu_sq);
    const double floor = floor_energy(s, opt);
    if (model.dim() == 1) return floor;
    const double g = 4.0 * pi / std::abs(s.alpha_R);
    double est;
    if (model.dim() == 2)
        est = scale * std::exp(std::min(g, 50.0));
    else
        est = std::pow(std::sqrt(scale) + g, 2);
    return std::max(floor, -(20.0 * est + 10.0 * scale));
}

PhiFn renormalized_fn(const LevelTable& table, const std::vector<double>& w, const Scheme& s, const SolverOptions& opt) {
    return [&table, &w, s, target = opt.tol / 10.0](double e) {
        const PhiValue p = phi(e, table, w, s, target, PhiMethod::automatic);
        return Sample{e, p.value, p.tail_bound, p.derivative};
    };
}

}  // namespace

LevelTable prepare_levels(const SpectralModel& model, const Point& center, const Scheme& scheme, std::size_t k_max,
                          const SolverOptions& options) {
    scheme.validate();
    double cap = 10.0;
    const CountingBound nb = model.counting_bound();
    while (nb(cap) < static_cast<double>(k_max + 2)) cap *= 2.0;
    std::vector<Level> levels;
    for (;;) {
        const auto modes = model.enumerate_modes(cap, 50'000'000);
        levels = collapse_degenerate(model, modes, center);
        if (levels.size() > k_max + 1) break;
        cap *= 2.0;
    }
    const double e_hi = levels[k_max + 1].energy;
    double e_lo = -scheme.mu_sq;
    if (scheme.alpha_R < 0.0) e_lo = deep_ground_estimate(model, scheme, options);
    const double need = required_cap(model, e_lo, e_hi, scheme.mu_sq, options.tol / 10.0);
    if (std::max(need, cap) > options.max_cutoff) {
        std::ostringstream msg;
        msg << "level table needs energy cap " << std::max(need, cap) << " above max_cutoff " << options.max_cutoff;
        throw ResourceError(msg.str());
    }
    return LevelTable::build(model, center, std::max(need, cap), 50'000'000);
}

LevelTable table_with_levels(const SpectralModel& model, const Point& center, std::size_t n, double max_cutoff) {
    const CountingBound nb = model.counting_bound();
    double cap = 10.0;
    while (nb(cap) < static_cast<double>(n)) cap *= 1.25;
    for (;;) {
        if (cap > max_cutoff) throw ResourceError("table of " + std::to_string(n) + " levels exceeds max_cutoff");
        auto t = LevelTable::build(model, center, cap, 50'000'000);
        if (t.level_count() >= n) return t;
        cap *= 1.25;
    }
}

PerturbedLevel solve_level(std::size_t k, const LevelTable& table, const Scheme& scheme, const SolverOptions& options) {
    scheme.validate();
    const auto w = effective_weights(table);
    return level_search(k, renormalized_fn(table, w, scheme, options), table, w, floor_energy(scheme, options), options);
}

PerturbedLevel solve_ground(const LevelTable& table, const Scheme& scheme, const SolverOptions& options) {
    scheme.validate();
    const auto w = effective_weights(table);
    return ground_search(renormalized_fn(table, w, scheme, options), table, w, floor_energy(scheme, options), options);
}

std::vector<PerturbedLevel> solve_spectrum(const LevelTable& table, const Scheme& scheme, std::size_t k_max,
                                           const SolverOptions& options) {
    scheme.validate();
    if (k_max + 1 > table.level_count()) throw DomainError("k_max beyond the level table");
    const auto w = effective_weights(table);
    const PhiFn f = renormalized_fn(table, w, scheme, options);
    const double floor = floor_energy(scheme, options);
    std::vector<PerturbedLevel> out(k_max + 1);
    for (std::size_t k = 0; k <= k_max; ++k) out[k] = level_search(k, f, table, w, floor, options);
    std::stable_sort(out.begin(), out.end(), [](const PerturbedLevel& a, const PerturbedLevel& b) {
        if (a.status == LevelStatus::absent || b.status == LevelStatus::absent)
            return a.status == LevelStatus::absent && b.status != LevelStatus::absent;
        return a.energy_star < b.energy_star;
    });
    return out;
}

PerturbedLevel solve_level_truncated(std::size_t k, std::size_t n_levels, const LevelTable& table, const Scheme& scheme,
                                     const SolverOptions& options) {
    scheme.validate();
    if (k >= n_levels) throw DomainError("level index beyond the truncation");
    auto w = effective_weights(table);
    w.resize(n_levels);
    const PhiFn f = [&table, n_levels, &scheme](double e) {
        const PhiValue p = phi_truncated(e, n_levels, table, scheme);
        return Sample{e, p.value, 0.0, p.derivative};
    };
    SolverOptions opt = options;
    opt.ground_floor = 1e12;
    return level_search(k, f, table, w, floor_energy(scheme, opt), opt);
}

// Multi-center ----------------------------------------------------------------

void MultiCenterProblem::validate() const {
    if (centers.empty()) throw DomainError("multi-center problem needs at least one center");
    if (schemes.size() != centers.size()) throw DomainError("one scheme per center is required");
    for (const auto& s : schemes) s.validate();
    for (const auto& c : centers) model.require_inside(c, "multi-center");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (centers[i] == centers[j])
                throw DomainError("coincident centers: G0 diverges on the diagonal");
}

std::vector<double> phi_matrix(const MultiCenterProblem& problem, const std::vector<LevelTable>& tables, double energy,
                               double precision_target) {
    const std::size_t n = problem.centers.size();
    std::vector<double> m(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        m[i * n + i] = phi(energy, tables[i], problem.schemes[i], precision_target).value;
        if (i + 1 < n) {
            const Green0Evaluator g(tables[i], problem.centers[i], energy, precision_target);
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = -g(problem.centers[j]).value;
                m[i * n + j] = v;
                m[j * n + i] = v;
            }
        }
    }
    return m;
}

namespace {

struct MultiSample {
    double e;
    Eigen::VectorXd lambda;
    Eigen::MatrixXd vectors;
    std::size_t negative;
    double max_offdiag;
};

MultiSample multi_eval(const MultiCenterProblem& p, const std::vector<LevelTable>& tables, double e, double target) {
    const std::size_t n = p.centers.size();
    const auto m = phi_matrix(p, tables, e, target);
    Eigen::MatrixXd a(n, n);
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = m[i * n + j];
            if (i != j) off = std::max(off, std::abs(m[i * n + j]));
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    std::size_t neg = 0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) < 0.0) ++neg;
    return {e, es.eigenvalues(), es.eigenvectors(), neg, off};
}

}  // namespace

std::vector<MultiLevel> solve_spectrum_multi(const MultiCenterProblem& problem, std::size_t k_max,
                                             const SolverOptions& options) {
    problem.validate();
    const std::size_t n = problem.centers.size();
    const double target = options.tol / 10.0;

    // Shared pole list: levels coupled to at least one center.
    double min_inv = std::numeric_limits<double>::infinity();
    double mu_max = 0.0;
    for (const auto& s : problem.schemes) {
        mu_max = std::max(mu_max, s.mu_sq);
        min_inv = std::min(min_inv, s.inv_alpha());
    }
    std::vector<LevelTable> tables;
    tables.reserve(n);
    // Find enough levels first, then size the tables for the energy window.
    const LevelTable probe = prepare_levels(problem.model, problem.centers[0], problem.schemes[0], k_max + n + 1, options);
    std::vector<double> coupled_energy;
    {
        std::vector<std::vector<double>> ws;
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = LevelTable::build(problem.model, problem.centers[i], probe.levels()[k_max + n + 1].energy);
            ws.push_back(effective_weights(t));
            if (i == 0) {
                for (std::size_t k = 0; k < t.level_count(); ++k) coupled_energy.push_back(t.levels()[k].energy);
            }
        }
        std::vector<double> poles;
        for (std::size_t k = 0; k < coupled_energy.size(); ++k) {
            bool any = false;
            for (const auto& w : ws) any = any || (k < w.size() && w[k] != 0.0);
            if (any) poles.push_back(coupled_energy[k]);
        }
        coupled_energy = poles;
    }
    if (coupled_energy.size() < k_max + 1) throw DomainError("not enough coupled levels for k_max");
    coupled_energy.resize(k_max + 1);
    const double e_hi = coupled_energy.back();
    const double e_lo = min_inv > 0.0 ? -mu_max : -1e3 * std::max(1.0, mu_max);
    double cap = std::max(probe.energy_cap(), required_cap(problem.model, e_lo, e_hi, mu_max, target));
    for (double e : {e_lo, e_hi}) cap = std::max(cap, split_cap(e, split_tau(problem.model, e)));
    for (std::size_t i = 0; i < n; ++i) tables.push_back(LevelTable::build(problem.model, problem.centers[i], cap, 50'000'000));

    auto eval = [&](double e) {
        double need = std::max(required_cap(problem.model, e, e, mu_max, target),
                               split_cap(e, split_tau(problem.model, e)));
        if (need > cap) {
            cap = 1.5 * need;
            tables.clear();
            for (std::size_t i = 0; i < n; ++i)
                tables.push_back(LevelTable::build(problem.model, problem.centers[i], cap, 50'000'000));
        }
        return multi_eval(problem, tables, e, target);
    };
    std::vector<MultiLevel> out;

    auto isolate = [&](MultiSample lo, MultiSample hi) {
        // Split on the inertia count until each piece holds one crossing, or a
        // cluster that no longer separates.
        std::vector<std::pair<MultiSample, MultiSample>> work{{lo, hi}};
        std::vector<std::pair<MultiSample, MultiSample>> pieces;
        while (!work.empty()) {
            auto [a, b] = work.back();
            work.pop_back();
            if (b.negative == a.negative) continue;
            const bool tight = b.e - a.e <= std::max(options.tol, 4e-16 * std::max(1.0, std::abs(b.e)));
            if (b.negative - a.negative == 1 || tight) {
                pieces.push_back({a, b});
                continue;
            }
            const MultiSample m = eval(0.5 * (a.e + b.e));
            work.push_back({m, b});
            work.push_back({a, m});
        }
        std::sort(pieces.begin(), pieces.end(), [](const auto& x, const auto& y) { return x.first.e < y.first.e; });
        const double lambda_err = static_cast<double>(n) * target;
        for (const auto& [a, b] : pieces) {
            const std::size_t mult = b.negative - a.negative;
            const auto idx = static_cast<Eigen::Index>(a.negative);
            double e_star = 0.5 * (a.e + b.e);
            double r_lo = a.e, r_hi = b.e;
            if (mult == 1) {
                const PhiFn g = [&](double e) {
                    const MultiSample s = eval(e);
                    return Sample{e, s.lambda(idx), lambda_err, 0.0};
                };
                const Root r = refine(g, Sample{a.e, a.lambda(idx), lambda_err, 0.0},
                                      Sample{b.e, b.lambda(idx), lambda_err, 0.0}, b.e - a.e, options);
                e_star = r.best.e;
                r_lo = r.lo;
                r_hi = r.hi;
            }
            const MultiSample s = eval(e_star);
            for (std::size_t j = 0; j < mult; ++j) {
                const Eigen::Index col = idx + static_cast<Eigen::Index>(j);
                MultiLevel ml;
                ml.energy_star = e_star;
                ml.root_lo = r_lo;
                ml.root_hi = r_hi;
                ml.multiplicity = mult;
                ml.smallest_eigenvalue = std::abs(s.lambda(col));
                double sep = std::numeric_limits<double>::infinity();
                if (idx > 0) sep = std::min(sep, std::abs(s.lambda(idx - 1)));
                if (idx + static_cast<Eigen::Index>(mult) < s.lambda.size())
                    sep = std::min(sep, std::abs(s.lambda(idx + static_cast<Eigen::Index>(mult))));
                ml.separation = sep;
                ml.max_offdiag = s.max_offdiag;
                Eigen::VectorXd v = s.vectors.col(col);
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    if (std::abs(v(i)) > 1e-12) {
                        if (v(i) < 0.0) v = -v;
                        break;
                    }
                ml.coefficients.assign(v.data(), v.data() + v.size());
                out.push_back(std::move(ml));
            }
        }
    };
    // Below the lowest pole: walk left until every eigenvalue is positive.
    {
        const double top = coupled_energy[0];
        const double gap = coupled_energy.size() > 1 ? coupled_energy[1] - top : std::max(1.0, std::abs(top));
        MultiSample hi = eval(top - edge_fraction * gap);
        double d = gap;
        MultiSample lo = eval(top - d);
        const double floor = -options.ground_floor * std::max(1.0, mu_max);
        while (lo.negative > 0 && top - 2.0 * d >= floor) {
            d *= 2.0;
            lo = eval(top - d);
        }
        isolate(lo, hi);
    }
    for (std::size_t k = 1; k < coupled_energy.size(); ++k) {
        const double a = coupled_energy[k - 1], b = coupled_energy[k];
        const double gap = b - a;
        isolate(eval(a + edge_fraction * gap), eval(b - edge_fraction * gap));
    }
    return out;
}

}  // namespace pointint
