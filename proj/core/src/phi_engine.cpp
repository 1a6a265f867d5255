#include "pointint/phi_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/heat_kernel.hpp"

namespace pointint {

void Scheme::validate() const {
    if (!std::isfinite(alpha_R) || alpha_R == 0.0) throw DomainError("alpha_R must be finite and nonzero");
    if (!(mu_sq > 0.0) || !std::isfinite(mu_sq)) throw DomainError("mu_sq must be positive");
}

std::string to_string(PhiMethod method) {
    switch (method) {
        case PhiMethod::automatic: return "automatic";
        case PhiMethod::direct: return "direct";
        case PhiMethod::split: return "split";
    }
    return "unknown";
}

// -N(lambda)/lambda^2 + 2 int_lambda^inf N_up(t) t^{-3} dt
double inverse_square_tail(double lambda, std::size_t n_below, const SpectralModel& model) {
    const CountingBound nb = model.counting_bound();
    const int d = nb.dim;
    double s = -static_cast<double>(n_below) / (lambda * lambda);
    double binom = 1.0;
    for (int j = 0; j <= d; ++j) {
        const double sigma = (d - j) / 2.0;
        s += binom * std::pow(nb.c, j) * 2.0 * nb.A * std::pow(lambda, sigma - 2.0) / (2.0 - sigma);
        binom = binom * (d - j) / (j + 1);
    }
    return std::max(s, 0.0);
}

namespace {

// Same bound without the counting correction (no table needed).
double crude_inverse_square_tail(double lambda, const SpectralModel& model) {
    return inverse_square_tail(lambda, 0, model);
}

PhiValue phi_direct(double e, const LevelTable& table, const std::vector<double>& w, const Scheme& s,
                    double target) {
    const auto& lv = table.levels();
    const double margin = 3.0 * std::max(std::abs(e), s.mu_sq);
    CompensatedSum val, der;
    PhiValue out;
    out.energy = e;
    out.method = PhiMethod::direct;
    const double shift = e + s.mu_sq;
    for (std::size_t k = 0; k < lv.size(); ++k) {
        if (w[k] != 0.0) {
            const double dk = lv[k].energy - e;
            val.add(w[k] * shift / (dk * (lv[k].energy + s.mu_sq)));
            der.add(w[k] / (dk * dk));
        }
        if (lv[k].energy <= margin) continue;
        if (k + 1 < lv.size() && lv[k + 1].energy == lv[k].energy) continue;
        const TailBound tb = tail_bound(e, lv[k].energy, table.modes_in_levels(k + 1), table.model(), s.mu_sq);
        const double round = 4e-16 * (val.magnitude() + std::abs(s.inv_alpha()));
        // Roundoff is reported but cannot be reduced by a larger cutoff.
        if (tb.phi <= target || shift == 0.0) {
            out.value = s.inv_alpha() - val.value();
            out.derivative = der.value();
            out.cutoff = k + 1;
            out.tail_bound = shift == 0.0 ? 0.0 : tb.phi + round;
            out.derivative_bound = tb.derivative + 4e-16 * der.magnitude();
            return out;
        }
    }
    std::ostringstream os;
    os << "phi: cannot certify precision " << target << " at E = " << e << " with level cap "
       << table.energy_cap() << "; raise the cap";
    throw PrecisionError(os.str());
}

PhiValue phi_split(double e, const LevelTable& table, const std::vector<double>& w, const Scheme& s,
                   double target) {
    const SpectralModel& m = table.model();
    const double tau = split_tau(m, std::max(std::abs(e), s.mu_sq));
    const double cap = split_cap(e, tau);
    if (table.energy_cap() < cap) {
        std::ostringstream os;
        os << "phi: split evaluation at E = " << e << " needs level cap " << cap << ", table has "
           << table.energy_cap();
        throw PrecisionError(os.str());
    }
    PhiValue out;
    out.energy = e;
    out.method = PhiMethod::split;
    if (e == -s.mu_sq) {
        out.value = s.inv_alpha();
    }
    const Bounded sp = (e == -s.mu_sq) ? Bounded{} : short_time_phi(m, table.center(), e, s.mu_sq, tau);
    const Bounded sd = short_time_derivative(m, table.center(), e, tau);
    CompensatedSum val, der;
    const auto& lv = table.levels();
    std::size_t k = 0;
    for (; k < lv.size() && lv[k].energy <= cap; ++k) {
        if (w[k] == 0.0) continue;
        const double dk = lv[k].energy - e;
        const double ek = lv[k].energy + s.mu_sq;
        const double damp = std::exp(-tau * dk);
        if (e != -s.mu_sq) val.add(w[k] * (damp / dk - std::exp(-tau * ek) / ek));
        der.add(w[k] * damp * (tau / dk + 1.0 / (dk * dk)));
    }
    out.cutoff = k;
    double truncation = 0.0;
    if (e != -s.mu_sq) {
        out.value = s.inv_alpha() - (sp.value + val.value());
        truncation = split_mode_tail(m, e, tau, cap, 1) + split_mode_tail(m, -s.mu_sq, tau, cap, 1);
        out.tail_bound = truncation + sp.error +
                         4e-16 * (val.magnitude() + std::abs(sp.value) + std::abs(s.inv_alpha()));
    }
    out.derivative = sd.value + der.value();
    out.derivative_bound = sd.error + split_mode_tail(m, e, tau, cap, 3) + 4e-16 * (der.magnitude() + sd.value);
    if (truncation > target) {
        std::ostringstream os;
        os << "phi: split evaluation at E = " << e << " certifies only " << out.tail_bound << " > " << target;
        throw PrecisionError(os.str());
    }
    return out;
}

}  // namespace

TailBound tail_bound(double energy, double lambda, std::size_t modes_up_to_lambda,
                     const SpectralModel& model, double mu_sq) {
    if (!(lambda > 3.0 * std::max(std::abs(energy), mu_sq))) {
        std::ostringstream os;
        os << "tail bound needs the dropped levels above " << 3.0 * std::max(std::abs(energy), mu_sq)
           << " (got " << lambda << "); raise the cutoff";
        throw MarginError(os.str());
    }
    const double s2 = inverse_square_tail(lambda, modes_up_to_lambda, model);
    const double wmax = model.max_mode_weight();
    return {wmax * std::abs(energy + mu_sq) * 1.5 * s2, wmax * 2.25 * s2};
}

std::vector<bool> nodal_flags(const LevelTable& table) {
    const auto& lv = table.levels();
    const std::size_t n = lv.size();
    std::vector<bool> out(n, false);
    for (std::size_t k = 0; k < n; ++k) {
        double sum = 0.0;
        int cnt = 0;
        for (std::size_t j = (k >= 2 ? k - 2 : 0); j <= std::min(n - 1, k + 2); ++j) {
            if (j == k) continue;
            sum += lv[j].weight;
            ++cnt;
        }
        const double ref = cnt > 0 ? sum / cnt : lv[k].weight;
        out[k] = lv[k].weight < nodal_threshold * ref || lv[k].weight == 0.0;
    }
    return out;
}

std::vector<double> effective_weights(const LevelTable& table) {
    const auto flags = nodal_flags(table);
    std::vector<double> w(table.level_count());
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = flags[k] ? 0.0 : table.levels()[k].weight;
    return w;
}

void check_pole_distance(double energy, const LevelTable& table, const std::vector<double>& weights) {
    const auto& lv = table.levels();
    const std::size_t n = lv.size();
    if (n == 0) return;
    auto it = std::lower_bound(lv.begin(), lv.end(), energy,
                               [](const Level& l, double v) { return l.energy < v; });
    const std::size_t hi = static_cast<std::size_t>(it - lv.begin());
    for (std::size_t k : {hi == 0 ? n : hi - 1, hi}) {
        if (k >= n || weights[k] == 0.0) continue;
        double gap = std::numeric_limits<double>::infinity();
        if (k > 0) gap = std::min(gap, lv[k].energy - lv[k - 1].energy);
        if (k + 1 < n) gap = std::min(gap, lv[k + 1].energy - lv[k].energy);
        if (!std::isfinite(gap)) gap = std::max(1.0, std::abs(lv[k].energy));
        if (std::abs(energy - lv[k].energy) <= pole_guard * gap) {
            std::ostringstream os;
            os.precision(17);
            os << "E = " << energy << " is within the pole guard of level " << k << " (E_k = " << lv[k].energy << ")";
            throw PoleProximityError(os.str());
        }
    }
}

double required_cap(const SpectralModel& model, double e_lo, double e_hi, double mu_sq, double target) {
    double cap = 0.0;
    for (double e : {e_lo, e_hi}) {
        if (model.dim() == 1) {
            const double scale = std::abs(e + mu_sq) * 1.5 * model.max_mode_weight();
            double lambda = 3.0 * std::max(std::abs(e), mu_sq) * 1.01 + 1.0;
            while (scale * crude_inverse_square_tail(lambda, model) > 0.5 * target) lambda *= 1.5;
            cap = std::max(cap, lambda);
        } else {
            const double tau = split_tau(model, std::max(std::abs(e), mu_sq));
            cap = std::max(cap, split_cap(e, tau));
        }
    }
    return cap;
}

PhiValue phi(double energy, const LevelTable& table, const std::vector<double>& weights,
             const Scheme& scheme, double precision_target, PhiMethod method) {
    if (!(precision_target > 0.0)) throw DomainError("precision target must be positive");
    if (!std::isfinite(energy)) throw DomainError("energy must be finite");
    check_pole_distance(energy, table, weights);
    if (method == PhiMethod::automatic)
        method = table.model().dim() == 1 ? PhiMethod::direct : PhiMethod::split;
    return method == PhiMethod::direct ? phi_direct(energy, table, weights, scheme, precision_target)
                                       : phi_split(energy, table, weights, scheme, precision_target);
}

PhiValue phi(double energy, const LevelTable& table, const Scheme& scheme, double precision_target,
             PhiMethod method) {
    scheme.validate();
    return phi(energy, table, effective_weights(table), scheme, precision_target, method);
}

BareCoupling bare_coupling(std::size_t n_levels, const LevelTable& table, const Scheme& scheme) {
    if (n_levels > table.level_count()) throw DomainError("bare_coupling: cutoff exceeds level table");
    const auto w = effective_weights(table);
    CompensatedSum s;
    s.add(scheme.inv_alpha());
    for (std::size_t k = 0; k < n_levels; ++k) s.add(w[k] / (table.levels()[k].energy + scheme.mu_sq));
    BareCoupling b;
    b.inv_alpha = s.value();
    b.infinite = std::abs(b.inv_alpha) <= 4e-16 * s.magnitude();
    return b;
}

PhiValue phi_truncated(double energy, std::size_t n_levels, const LevelTable& table, const Scheme& scheme) {
    const auto w = effective_weights(table);
    const BareCoupling b = bare_coupling(n_levels, table, scheme);
    CompensatedSum val, der;
    val.add(b.inv_alpha);
    for (std::size_t k = 0; k < n_levels; ++k) {
        if (w[k] == 0.0) continue;
        const double dk = table.levels()[k].energy - energy;
        val.add(-w[k] / dk);
        der.add(w[k] / (dk * dk));
    }
    PhiValue out;
    out.energy = energy;
    out.value = val.value();
    out.derivative = der.value();
    out.cutoff = n_levels;
    out.tail_bound = 0.0;
    out.method = PhiMethod::direct;
    return out;
}

SchemeMapping change_scheme(const Scheme& scheme, double new_mu_sq, const LevelTable& table,
                            double precision_target) {
    scheme.validate();
    if (!(new_mu_sq > 0.0)) throw DomainError("new mu_sq must be positive");
    SchemeMapping out;
    out.scheme.mu_sq = new_mu_sq;
    if (new_mu_sq == scheme.mu_sq) {
        out.scheme = scheme;
        return out;
    }
    const PhiValue p = phi(-new_mu_sq, table, scheme, precision_target);
    if (!std::isfinite(p.value)) throw DivergenceError("compensating sum diverges");
    if (p.value == 0.0) throw DomainError("mapped scheme has infinite coupling");
    out.scheme.alpha_R = 1.0 / p.value;
    out.inv_alpha_error = p.tail_bound;
    return out;
}

SchemeMapping scheme_from_ground_energy(double ground_energy, double mu_sq, const LevelTable& table,
                                        double precision_target) {
    const auto w = effective_weights(table);
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (w[k] == 0.0) continue;
        if (ground_energy >= table.levels()[k].energy)
            throw DomainError("ground energy must lie below the lowest coupled level");
        break;
    }
    // Phi with 1/alpha_R = 0, written through a unit-coupling scheme.
    const Scheme unit{1.0, mu_sq};
    const PhiValue p = phi(ground_energy, table, w, unit, precision_target, PhiMethod::automatic);
    const double inv = 1.0 - p.value;
    if (inv == 0.0) throw DomainError("ground energy corresponds to infinite coupling");
    return {Scheme{1.0 / inv, mu_sq}, p.tail_bound};
}

}  // namespace pointint
