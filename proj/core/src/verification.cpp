#include "pointint/verification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/heat_kernel.hpp"
#include "pointint/numeric.hpp"
#include "pointint/special_functions.hpp"

namespace pointint {

std::string to_string(GramMethod m) { return m == GramMethod::mode_space ? "mode-space" : "quadrature"; }

std::string to_string(TestFunction f) {
    switch (f) {
        case TestFunction::base_mode: return "base_mode";
        case TestFunction::bump: return "bump";
        case TestFunction::synthesized_psi: return "synthesized_psi";
    }
    return "unknown";
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

std::vector<PerturbedLevel> present(const std::vector<PerturbedLevel>& levels) {
    std::vector<PerturbedLevel> out;
    for (const auto& l : levels)
        if (l.status != LevelStatus::absent) out.push_back(l);
    return out;
}

void finish(GramReport& g) {
    const std::size_t n = g.size;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double v = g.matrix[i * n + j];
            if (i == j)
                g.max_diag_dev = std::max(g.max_diag_dev, std::abs(v - 1.0));
            else
                g.max_offdiag = std::max(g.max_offdiag, std::abs(v));
        }
    g.pass = g.max_offdiag <= g.tolerance && g.max_diag_dev <= g.tolerance;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Upper incomplete gamma for s in {1/2, 1, 3/2, 2, 5/2, ...}.
double upper_gamma(double s, double x) {
    double g, a;
    if (std::abs(s - std::round(s)) < 1e-12) {
        g = std::exp(-x);
        a = 1.0;
    } else {
        g = std::sqrt(pi) * std::erfc(std::sqrt(x));
        a = 0.5;
    }
    for (; a + 0.5 < s; a += 1.0) g = a * g + std::pow(x, a) * std::exp(-x);
    return g;
}

// Sum over modes above lambda of E^{-p}, via the counting bound; needs p > D/2.
double inverse_power_tail(double p, double lambda, std::size_t n_below, const SpectralModel& model) {
    const CountingBound nb = model.counting_bound();
    const int d = nb.dim;
    double s = -static_cast<double>(n_below) * std::pow(lambda, -p);
    double binom = 1.0;
    for (int j = 0; j <= d; ++j) {
        const double sigma = (d - j) / 2.0;
        s += binom * std::pow(nb.c, j) * p * nb.A * std::pow(lambda, sigma - p) / (p - sigma);
        binom = binom * (d - j) / (j + 1);
    }
    return std::max(s, 0.0);
}

// Sum over modes above lambda of exp(-t E).
double heat_tail(double t, double lambda, std::size_t n_below, const SpectralModel& model) {
    const CountingBound nb = model.counting_bound();
    const int d = nb.dim;
    double s = -static_cast<double>(n_below) * std::exp(-t * lambda);
    double binom = 1.0;
    for (int j = 0; j <= d; ++j) {
        const double sigma = (d - j) / 2.0;
        s += binom * std::pow(nb.c, j) * nb.A * std::pow(t, -sigma) * upper_gamma(sigma + 1.0, t * lambda);
        binom = binom * (d - j) / (j + 1);
    }
    return std::max(s, 0.0);
}

}  // namespace

// Gram matrices ---------------------------------------------------------------

GramReport gram_mode_space(const std::vector<PerturbedLevel>& levels, const LevelTable& table, const Scheme& scheme,
                           double tolerance, double precision) {
    const auto lv = present(levels);
    const std::size_t n = lv.size();
    GramReport g;
    g.size = n;
    g.method = GramMethod::mode_space;
    g.tolerance = tolerance;
    g.matrix.assign(n * n, 0.0);
    std::vector<PhiValue> p(n);
    for (std::size_t i = 0; i < n; ++i)
        if (lv[i].status == LevelStatus::shifted) p[i] = phi(lv[i].energy_star, table, scheme, precision);
    for (std::size_t i = 0; i < n; ++i) {
        g.matrix[i * n + i] = 1.0;
        if (lv[i].status == LevelStatus::shifted)
            g.certificate = std::max(g.certificate, p[i].derivative_bound / p[i].derivative);
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j || lv[i].status != LevelStatus::shifted || lv[j].status != LevelStatus::shifted) continue;
            const double de = lv[i].energy_star - lv[j].energy_star;
            const double norm = std::sqrt(p[i].derivative * p[j].derivative);
            g.matrix[i * n + j] = (p[j].value - p[i].value) / (de * norm);
            const double cert = (std::abs(p[i].value) + p[i].tail_bound + std::abs(p[j].value) + p[j].tail_bound) /
                                (std::abs(de) * norm);
            g.certificate = std::max(g.certificate, cert);
        }
    }
    finish(g);
    return g;
}

GramReport gram_mode_sum(const std::vector<PerturbedLevel>& levels, const LevelTable& table, const Scheme& scheme,
                         std::size_t m_levels, double tolerance) {
    if (m_levels == 0 || m_levels > table.level_count()) throw DomainError("mode count outside the level table");
    const auto lv = present(levels);
    const std::size_t n = lv.size();
    const auto w = effective_weights(table);
    const auto& tl = table.levels();
    double emax = 0.0;
    for (const auto& l : lv) emax = std::max(emax, std::abs(l.energy_star));
    const double lambda = tl[m_levels - 1].energy;
    if (!(lambda > 3.0 * emax))
        throw PrecisionError("mode sum needs the cutoff above 3 max|E*| (cutoff " + fmt(lambda) + ")");
    const double tail_sum =
        (9.0 / 4.0) * table.model().max_mode_weight() * inverse_square_tail(lambda, table.modes_in_levels(m_levels),
                                                                           table.model());
    GramReport g;
    g.size = n;
    g.method = GramMethod::mode_space;
    g.tolerance = tolerance;
    g.matrix.assign(n * n, 0.0);
    // Normalized with the full certified derivative so the diagonal sees the tail.
    std::vector<double> der(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (lv[i].status == LevelStatus::shifted) der[i] = phi(lv[i].energy_star, table, scheme).derivative;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (lv[i].status != LevelStatus::shifted || lv[j].status != LevelStatus::shifted) {
                g.matrix[i * n + j] = i == j ? 1.0 : 0.0;
                continue;
            }
            CompensatedSum s;
            for (std::size_t k = 0; k < m_levels; ++k)
                if (w[k] != 0.0) s.add(w[k] / ((tl[k].energy - lv[i].energy_star) * (tl[k].energy - lv[j].energy_star)));
            g.matrix[i * n + j] = s.value() / std::sqrt(der[i] * der[j]);
            g.certificate = std::max(g.certificate, tail_sum / std::sqrt(der[i] * der[j]));
        }
    if (g.certificate > tolerance / 10.0)
        throw PrecisionError("mode-sum Gram tail " + fmt(g.certificate) + " exceeds tolerance/10; raise the level count");
    finish(g);
    return g;
}

GramReport gram_quadrature(const std::vector<EigenfunctionEvaluator>& psi, const OffsetQuadrature& q,
                           double tolerance) {
    const std::size_t n = psi.size();
    std::vector<Sampled> s;
    s.reserve(n);
    for (const auto& p : psi) s.push_back(sample_eigenfunction(p, q));
    GramReport g;
    g.size = n;
    g.method = GramMethod::quadrature;
    g.tolerance = tolerance;
    g.matrix.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const Certified c = integrate_product(q, s[i], s[j]);
            g.matrix[i * n + j] = g.matrix[j * n + i] = c.value;
            g.certificate = std::max(g.certificate, c.error);
        }
    if (g.certificate > tolerance)
        throw PrecisionError("quadrature Gram error estimate " + fmt(g.certificate) + " exceeds " + fmt(tolerance) +
                             "; refine the grid");
    finish(g);
    return g;
}

// Completeness ----------------------------------------------------------------

CompletenessInput completeness_input(const LevelTable& table, const Scheme& scheme,
                                     const std::vector<PerturbedLevel>& levels, const OffsetQuadrature& q) {
    CompletenessInput in;
    in.quadrature = &q;
    const auto lv = present(levels);
    for (const auto& l : lv) in.psi.push_back(sample_eigenfunction(EigenfunctionEvaluator(table, scheme, l), q));
    const std::size_t nm = std::min(lv.size(), table.modes().size());
    const SpectralModel& m = table.model();
    for (std::size_t k = 0; k < nm; ++k) {
        const Mode& md = table.modes()[k];
        in.phi.push_back(sample(q, [&](const Point& x) { return m.mode_value(md, x); }));
    }
    return in;
}

Sampled stock_function(TestFunction f, const LevelTable& table, const Scheme& scheme,
                       const std::vector<PerturbedLevel>& levels, const OffsetQuadrature& q,
                       std::size_t synthesized_index) {
    const SpectralModel& m = table.model();
    switch (f) {
        case TestFunction::base_mode: {
            const Mode md = table.modes().front();
            return sample(q, [&](const Point& x) { return m.mode_value(md, x); });
        }
        case TestFunction::bump: {
            // Centered on the far side of each axis from a.
            const Point& a = table.center();
            std::array<double, 3> c{};
            for (std::size_t i = 0; i < m.dim(); ++i) {
                const double l = m.length(i);
                c[i] = m.periodic() ? std::fmod(a[i] + 0.5 * l, l) : (a[i] < 0.5 * l ? 0.5 * (a[i] + l) : 0.5 * a[i]);
            }
            return sample(q, [&](const Point& x) {
                double v = 1.0;
                for (std::size_t i = 0; i < m.dim(); ++i) {
                    const double l = m.length(i);
                    if (m.periodic()) {
                        v *= std::exp(4.0 * (std::cos(2.0 * pi * (x[i] - c[i]) / l) - 1.0));
                    } else {
                        const double s = 0.15 * l, u = x[i] * (l - x[i]) / (l * l);
                        v *= 16.0 * u * u * std::exp(-0.5 * (x[i] - c[i]) * (x[i] - c[i]) / (s * s));
                    }
                }
                return v;
            });
        }
        case TestFunction::synthesized_psi: {
            const auto lv = present(levels);
            if (synthesized_index >= lv.size()) throw DomainError("synthesized index beyond the solved levels");
            const EigenfunctionEvaluator e(table, scheme, lv[synthesized_index]);
            return sample_eigenfunction(e, q);
        }
    }
    throw DomainError("unknown test function");
}

CompletenessReport completeness_reconstruct(TestFunction id, const Sampled& f, const CompletenessInput& basis,
                                            const std::vector<std::size_t>& ks, std::size_t synthesized_index) {
    if (basis.quadrature == nullptr) throw DomainError("completeness input without quadrature");
    const OffsetQuadrature& q = *basis.quadrature;
    CompletenessReport rep;
    rep.function = id;
    rep.synthesized_index = synthesized_index;
    const Certified ff = integrate_product(q, f, f);
    if (!(ff.value > 0.0)) throw DomainError("test function has zero norm");
    const double fnorm = std::sqrt(ff.value);
    std::size_t kmax = 0;
    for (auto k : ks) kmax = std::max(kmax, k);
    if (kmax >= basis.psi.size()) throw DomainError("K beyond the solved levels");

    auto coefficients = [&](const std::vector<Sampled>& b, std::size_t count) {
        std::vector<Certified> c(count);
        parallel_for(count, thread_count(), [&](std::size_t k) { c[k] = integrate_product(q, b[k], f); });
        return c;
    };
    const auto cpsi = coefficients(basis.psi, kmax + 1);
    const auto cphi = coefficients(basis.phi, std::min(kmax + 1, basis.phi.size()));

    // Residual and its floor: each coefficient error moves the residual by at
    // most |dc_k| (unit basis vectors), the norm itself carries its own error.
    auto residual = [&](const std::vector<Sampled>& b, const std::vector<Certified>& c, std::size_t K) {
        Sampled r = f;
        double coef_err = 0.0;
        for (std::size_t k = 0; k <= K && k < c.size(); ++k) {
            const double ck = c[k].value;
            coef_err += c[k].error;
            for (std::size_t i = 0; i < r.fine.size(); ++i) r.fine[i] -= ck * b[k].fine[i];
            for (std::size_t i = 0; i < r.coarse.size(); ++i) r.coarse[i] -= ck * b[k].coarse[i];
            for (std::size_t i = 0; i < r.coarsest.size(); ++i) r.coarsest[i] -= ck * b[k].coarsest[i];
        }
        const Certified rr = integrate_product(q, r, r);
        return std::pair{std::sqrt(std::max(rr.value, 0.0)) / fnorm, (coef_err + std::sqrt(rr.error)) / fnorm};
    };
    std::vector<std::size_t> sorted = ks;
    std::sort(sorted.begin(), sorted.end());
    rep.points.resize(sorted.size());
    parallel_for(sorted.size(), thread_count(), [&](std::size_t i) {
        const auto [psi_r, fl] = residual(basis.psi, cpsi, sorted[i]);
        rep.points[i] = {sorted[i], psi_r, residual(basis.phi, cphi, sorted[i]).first, fl};
    });
    rep.monotone = true;
    for (std::size_t i = 1; i < rep.points.size(); ++i)
        if (rep.points[i].psi_residual > rep.points[i - 1].psi_residual + rep.points[i].floor) rep.monotone = false;
    if (!rep.points.empty()) rep.quadrature_floor = rep.points.back().floor;
    return rep;
}

// Finite-rank oracle ------------------------------------------------------------

OracleResult oracle_diagonalize(std::size_t n_levels, const LevelTable& table, const Scheme& scheme) {
    if (n_levels < 2 || n_levels > table.level_count()) throw DomainError("oracle size outside the level table");
    const auto w = effective_weights(table);
    const auto& lv = table.levels();
    const BareCoupling bc = bare_coupling(n_levels, table, scheme);
    OracleResult out;
    out.N = n_levels;
    out.inv_alpha = bc.inv_alpha;
    out.infinite_coupling = bc.infinite;

    std::vector<double> d, v;
    std::vector<std::pair<double, bool>> eig;
    for (std::size_t k = 0; k < n_levels; ++k) {
        if (w[k] == 0.0) {
            eig.emplace_back(lv[k].energy, true);
        } else {
            d.push_back(lv[k].energy);
            v.push_back(std::sqrt(w[k]));
        }
    }
    const auto m = static_cast<Eigen::Index>(d.size());
    if (m > 0 && bc.infinite) {
        // alpha -> infinity: the compression of diag(d) to the complement of v.
        Eigen::VectorXd u = Eigen::Map<Eigen::VectorXd>(v.data(), m).normalized();
        u(0) += u(0) >= 0.0 ? 1.0 : -1.0;
        const double beta = 2.0 / u.squaredNorm();
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
        h.diagonal() = Eigen::Map<Eigen::VectorXd>(d.data(), m);
        const Eigen::VectorXd du = h.diagonal().cwiseProduct(u);
        const double udu = u.dot(du);
        // Q D Q with Q = I - beta u u^T.
        h -= beta * (du * u.transpose() + u * du.transpose());
        h += beta * beta * udu * (u * u.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.bottomRightCorner(m - 1, m - 1), Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < m - 1; ++i) eig.emplace_back(es.eigenvalues()(i), false);
    } else if (m > 0) {
        auto phi_n = [&](double e) {
            CompensatedSum s;
            s.add(bc.inv_alpha);
            for (Eigen::Index i = 0; i < m; ++i) s.add(-v[i] * v[i] / (d[i] - e));
            return s.value();
        };
        double gap = m > 1 ? d[1] - d[0] : std::max(1.0, std::abs(d[0]));
        double sigma = d[0] - gap;
        if (bc.inv_alpha > 0.0) {
            // A root lies below d[0]; step down until sigma is below it, then
            // once more so that B stays well conditioned.
            while (!(phi_n(sigma) > 0.0)) {
                gap *= 2.0;
                sigma = d[0] - gap;
                if (!std::isfinite(sigma)) throw PrecisionError("oracle shift search diverged");
            }
            sigma -= gap;
        }
        out.sigma = sigma;
        // (H - sigma)^{-1} = diag(1/(d - sigma)) + u u^T / Phi_N(sigma), u = v / (d - sigma).
        const double p = phi_n(sigma);
        Eigen::VectorXd uu(m);
        for (Eigen::Index i = 0; i < m; ++i) uu(i) = v[i] / (d[i] - sigma);
        Eigen::MatrixXd b = (uu / p) * uu.transpose();
        for (Eigen::Index i = 0; i < m; ++i) b(i, i) += 1.0 / (d[i] - sigma);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double mu = es.eigenvalues()(i);
            if (mu == 0.0) throw PrecisionError("oracle shifted inverse is singular");
            eig.emplace_back(sigma + 1.0 / mu, false);
        }
    }
    std::sort(eig.begin(), eig.end());
    for (const auto& [e, nodal] : eig) {
        out.eigenvalues.push_back(e);
        out.from_nodal.push_back(nodal);
    }
    return out;
}

void compare_oracle(OracleResult& oracle, const std::vector<PerturbedLevel>& levels, const LevelTable& table,
                    const Scheme& scheme) {
    auto lv = present(levels);
    std::sort(lv.begin(), lv.end(), [](const auto& a, const auto& b) { return a.energy_star < b.energy_star; });
    if (lv.size() > oracle.eigenvalues.size()) throw DomainError("more solved levels than oracle eigenvalues");
    const auto w = effective_weights(table);
    const auto& tl = table.levels();
    const std::size_t n = oracle.N;
    const double lambda = tl[n - 1].energy;
    const std::size_t below = table.modes_in_levels(n);
    oracle.deviations.clear();
    oracle.deviation_bounds.clear();
    oracle.matched.clear();
    oracle.pattern_matches = true;
    for (std::size_t i = 0; i < lv.size(); ++i) {
        const auto& l = lv[i];
        const double o = oracle.eigenvalues[i];
        oracle.matched.push_back(o);
        oracle.deviations.push_back(std::abs(l.energy_star - o));
        const bool nodal = l.status == LevelStatus::unchanged_nodal;
        if (nodal != oracle.from_nodal[i]) oracle.pattern_matches = false;
        if (nodal) {
            oracle.deviation_bounds.push_back(0.0);
            continue;
        }
        // Phi_N = Phi + (tail above N). A sign change of Phi_N on [E* - delta, E* + delta]
        // is certain once Dmin(delta) * delta > residual + tail, where Dmin is a
        // lower bound on -Phi' from the nearest coupled levels.
        std::size_t hi = n, lo = n;
        for (std::size_t k = 0; k < n; ++k) {
            if (w[k] == 0.0) continue;
            if (tl[k].energy > l.energy_star) {
                hi = k;
                break;
            }
            lo = k;
        }
        auto dmin = [&](double delta) {
            double r = 0.0;
            if (hi < n) r = std::max(r, w[hi] / std::pow(tl[hi].energy - l.energy_star + delta, 2));
            if (lo < n) r = std::max(r, w[lo] / std::pow(l.energy_star - tl[lo].energy + delta, 2));
            return r;
        };
        auto tail = [&](double delta) {
            double t = 0.0;
            for (double e : {l.energy_star - delta, l.energy_star, l.energy_star + delta}) {
                if (!(lambda > 3.0 * std::max(std::abs(e), scheme.mu_sq))) return inf;
                t = std::max(t, tail_bound(e, lambda, below, table.model(), scheme.mu_sq).phi);
            }
            return t;
        };
        const double res = l.residual;
        double delta = 0.0, bound = inf;
        for (int it = 0; it < 8; ++it) {
            const double need = res + tail(delta);
            const double dm = dmin(delta);
            if (!(dm > 0.0) || !std::isfinite(need)) break;
            const double next = 1.0001 * need / dm;
            if (next <= delta) {
                bound = delta;
                break;
            }
            delta = next;
        }
        if (!std::isfinite(bound) && delta > 0.0 && dmin(delta) * delta > res + tail(delta)) bound = delta;
        oracle.deviation_bounds.push_back(bound);
    }
}

double oracle_resolvent(const Point& x, const Point& y, double energy, std::size_t n_levels, const LevelTable& table,
                        const Scheme& scheme) {
    const BareCoupling bc = bare_coupling(n_levels, table, scheme);
    if (bc.infinite) throw DomainError("oracle resolvent needs a finite bare coupling");
    const std::size_t nm = table.modes_in_levels(n_levels);
    const auto n = static_cast<Eigen::Index>(nm);
    const SpectralModel& m = table.model();
    Eigen::VectorXd c(n), bx(n), by(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Mode& md = table.modes()[static_cast<std::size_t>(i)];
        c(i) = table.center_values()[static_cast<std::size_t>(i)];
        bx(i) = m.mode_value(md, x);
        by(i) = m.mode_value(md, y);
    }
    const double alpha = 1.0 / bc.inv_alpha;
    Eigen::MatrixXd h = -alpha * c * c.transpose();
    for (Eigen::Index i = 0; i < n; ++i) h(i, i) += table.modes()[static_cast<std::size_t>(i)].energy - energy;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(h);
    Eigen::VectorXd z = lu.solve(by);
    for (int it = 0; it < 3; ++it) z += lu.solve(by - h * z);
    CompensatedSum s;
    for (Eigen::Index i = 0; i < n; ++i) s.add(bx(i) * z(i));
    return s.value();
}

// Heat kernel and Laplace moments ----------------------------------------------

std::vector<HeatKernelRow> heat_kernel_check(const LevelTable& table, const std::vector<double>& ts) {
    const SpectralModel& m = table.model();
    const Point& a = table.center();
    double t_max = 0.0;
    for (double t : ts) {
        if (!(t > 0.0)) throw DomainError("heat kernel check needs t > 0");
        t_max = std::max(t_max, t);
    }
    const double c = m.heat_kernel_constant(t_max);
    const double dim = static_cast<double>(m.dim());
    const double wmax = m.max_mode_weight();
    std::vector<HeatKernelRow> rows;
    for (double t : ts) {
        HeatKernelRow r;
        r.t = t;
        r.partial_sum = heat_kernel_mode_sum(m, table.modes(), a, a, t);
        r.tail = wmax * heat_tail(t, table.energy_cap(), table.modes().size(), m);
        if (r.tail > 1e-10 * r.partial_sum)
            throw PrecisionError("level cap too low for the heat kernel at t = " + fmt(t));
        r.theta = heat_kernel_theta(m, a, a, t);
        r.bound = 1.0 / m.volume() + c * std::pow(t, -dim / 2.0);
        r.holds = r.partial_sum + r.tail <= r.bound;
        rows.push_back(r);
    }
    return rows;
}

LaplaceMoment laplace_moment(int k, double e_shift, const LevelTable& table) {
    const SpectralModel& m = table.model();
    const double dim = static_cast<double>(m.dim());
    if (k < 1) throw DomainError("moment order must be at least 1");
    if (!(2.0 * k > dim)) throw DomainError("sum of w / (E + s)^k diverges for k <= D/2");
    if (!(e_shift > 0.0)) throw DomainError("moment shift must be positive");
    const auto& lv = table.levels();
    const auto w = effective_weights(table);
    LaplaceMoment out;
    CompensatedSum direct;
    for (std::size_t i = 0; i < lv.size(); ++i)
        if (w[i] != 0.0) direct.add(w[i] * std::pow(lv[i].energy + e_shift, -k));
    out.direct = direct.value();
    out.direct_bound = m.max_mode_weight() * inverse_power_tail(k, table.energy_cap(), table.modes().size(), m);

    const Point& a = table.center();
    double lmin = inf;
    for (double l : m.lengths()) lmin = std::min(lmin, l);
    const double t_switch = 0.1 * lmin * lmin;
    auto kernel = [&](double t) {
        return t < t_switch ? heat_kernel_images(m, a, a, t) : heat_kernel_theta(m, a, a, t);
    };
    const double rate = e_shift + lv.front().energy;
    double x = 40.0;
    for (int it = 0; it < 50; ++it) x = 40.0 + k * std::log(x);
    const double u_max = std::sqrt(x / rate);
    const double kfact = std::tgamma(static_cast<double>(k));
    auto integrand = [&](double u) {
        const double t = u * u;
        return 2.0 * u * std::pow(t, k - 1) * std::exp(-t * e_shift) * kernel(t) / kfact;
    };
    const auto& g_hi = gauss_legendre(20);
    const auto& g_lo = gauss_legendre(10);
    auto segment = [&](const GaussLegendre& g, double lo, double hi) {
        CompensatedSum s;
        const double h = 0.5 * (hi - lo), c = 0.5 * (hi + lo);
        for (std::size_t i = 0; i < g.nodes.size(); ++i) s.add(h * g.weights[i] * integrand(c + h * g.nodes[i]));
        return s.value();
    };
    // Dyadic segments in u towards 0, each cut into equal pieces for peaked integrands.
    constexpr int pieces = 8;
    CompensatedSum fine, coarse;
    double hi = u_max;
    for (int j = 0; j < 60; ++j) {
        const double lo = j == 59 ? 0.0 : 0.5 * hi;
        const double step = (hi - lo) / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double a = lo + p * step, b = a + step, mid = a + 0.5 * step;
            fine.add(segment(g_hi, a, mid) + segment(g_hi, mid, b));
            coarse.add(segment(g_lo, a, b));
        }
        hi = lo;
    }
    out.laplace = fine.value();
    out.laplace_error = std::abs(fine.value() - coarse.value()) + 1e-15 * std::abs(out.laplace);
    if (out.laplace_error > 1e-8 * std::abs(out.laplace))
        throw PrecisionError("Laplace quadrature did not converge (error " + fmt(out.laplace_error) + ")");
    out.difference = std::abs(out.direct - out.laplace);
    return out;
}

// Scheme invariance ---------------------------------------------------------------

SchemeInvarianceReport scheme_invariance(const SpectralModel& model, const Point& a, const Scheme& scheme,
                                         double new_mu_sq, std::size_t k_max, const SolverOptions& options,
                                         std::size_t energy_points) {
    SchemeInvarianceReport rep;
    rep.original = scheme;
    const LevelTable t1 = prepare_levels(model, a, scheme, k_max, options);
    const SchemeMapping map = change_scheme(scheme, new_mu_sq, t1);
    rep.mapped = map.scheme;
    const LevelTable t2 = prepare_levels(model, a, map.scheme, k_max, options);
    const auto l1 = solve_spectrum(t1, scheme, k_max, options);
    const auto l2 = solve_spectrum(t2, map.scheme, k_max, options);
    rep.level_tolerance = 10.0 * options.tol;
    for (std::size_t i = 0; i < l1.size(); ++i) {
        double d = 0.0;
        if (l1[i].status != l2[i].status)
            d = inf;
        else if (l1[i].status != LevelStatus::absent)
            d = std::abs(l1[i].energy_star - l2[i].energy_star);
        rep.level_differences.push_back(d);
        rep.max_level_difference = std::max(rep.max_level_difference, d);
    }

    const auto w = effective_weights(t1);
    const auto& lv = t1.levels();
    double e_lo = lv.front().energy - 1.0;
    for (const auto& l : l1)
        if (l.status != LevelStatus::absent) e_lo = std::min(e_lo, l.energy_star - 1.0);
    const double e_hi = lv[std::min(k_max, lv.size() - 1)].energy;
    rep.max_phi_excess = -inf;
    for (std::size_t i = 0; i < energy_points; ++i) {
        const double e = e_lo + (e_hi - e_lo) * (static_cast<double>(i) + 0.5) / static_cast<double>(energy_points);
        try {
            check_pole_distance(e, t1, w);
        } catch (const PoleProximityError&) {
            continue;
        }
        const PhiValue p1 = phi(e, t1, scheme);
        const PhiValue p2 = phi(e, t2, map.scheme);
        const double excess = std::abs(p1.value - p2.value) - (p1.tail_bound + p2.tail_bound + map.inv_alpha_error);
        rep.max_phi_excess = std::max(rep.max_phi_excess, excess);
        ++rep.energies_checked;
    }
    rep.pass = rep.max_level_difference <= rep.level_tolerance && rep.max_phi_excess <= 0.0;
    return rep;
}

}  // namespace pointint
