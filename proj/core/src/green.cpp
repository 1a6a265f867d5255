#include "pointint/green.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/heat_kernel.hpp"

namespace pointint {

namespace {
constexpr double pole_guard_fraction = 1e-12;
}

Green0Evaluator::Green0Evaluator(const LevelTable& table, const Point& y, double energy, double precision_target)
    : model_(&table.model()), y_(y), energy_(energy) {
    const SpectralModel& m = *model_;
    m.require_inside(y, "green0");
    if (!std::isfinite(energy)) throw DomainError("green0: energy must be finite");
    tau_ = split_tau(m, energy);
    const double cap = split_cap(energy, tau_);
    if (table.energy_cap() < cap) {
        std::ostringstream os;
        os << "green0 at E = " << energy << " needs level cap " << cap << ", table has " << table.energy_cap();
        throw PrecisionError(os.str());
    }
    modal_tail_ = split_mode_tail(m, energy, tau_, cap, 1);
    if (modal_tail_ > precision_target) throw PrecisionError("green0: remainder bound above target");

    const double wroot = std::sqrt(m.max_mode_weight());
    for (const auto& md : table.modes()) {
        if (md.energy > cap) break;
        const double py = m.mode_value(md, y);
        const double d = md.energy - energy;
        if (std::abs(d) <= pole_guard_fraction * std::max(1.0, std::abs(energy)) && std::abs(py) > 1e-7 * wroot) {
            std::ostringstream os;
            os.precision(17);
            os << "green0: E = " << energy << " sits on the eigenvalue " << md.energy;
            throw PoleProximityError(os.str());
        }
        modes_.push_back(md);
        coef_.push_back(py * std::exp(-tau_ * d) / d);
        for (std::size_t i = 0; i < m.dim(); ++i) qmax_[i] = std::max(qmax_[i], std::abs(md.q[i]));
    }
}

GreenValue Green0Evaluator::operator()(const Point& x) const {
    const SpectralModel& m = *model_;
    m.require_inside(x, "green0");
    const std::size_t d = m.dim();
    CompensatedSum s;
    if (!m.periodic()) {
        std::array<std::vector<double>, 3> tab;
        for (std::size_t i = 0; i < d; ++i) {
            tab[i].resize(static_cast<std::size_t>(qmax_[i]) + 1);
            const double norm = std::sqrt(2.0 / m.length(i));
            for (int q = 0; q <= qmax_[i]; ++q) tab[i][q] = norm * std::sin(pi * q * x[i] / m.length(i));
        }
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            double v = coef_[k];
            for (std::size_t i = 0; i < d; ++i) v *= tab[i][modes_[k].q[i]];
            s.add(v);
        }
    } else {
        std::array<std::vector<std::complex<double>>, 3> tab;
        for (std::size_t i = 0; i < d; ++i) {
            const int qm = qmax_[i];
            tab[i].resize(static_cast<std::size_t>(2 * qm + 1));
            for (int q = -qm; q <= qm; ++q)
                tab[i][q + qm] = std::polar(1.0, 2.0 * pi * q * x[i] / m.length(i));
        }
        const double amp = std::sqrt(2.0 / m.volume());
        const double amp0 = 1.0 / std::sqrt(m.volume());
        for (std::size_t k = 0; k < modes_.size(); ++k) {
            const Mode& md = modes_[k];
            double v;
            if (md.parity == ModeParity::none) {
                v = amp0;
            } else {
                std::complex<double> z(1.0, 0.0);
                for (std::size_t i = 0; i < d; ++i) z *= tab[i][md.q[i] + qmax_[i]];
                v = amp * (md.parity == ModeParity::cos ? z.real() : z.imag());
            }
            s.add(coef_[k] * v);
        }
    }
    const Bounded st = short_time_green(m, x, y_, energy_, tau_);
    GreenValue g;
    g.x = x;
    g.y = y_;
    g.energy = energy_;
    g.value = st.value + s.value();
    g.cutoff = modes_.size();
    g.tail_bound = st.error + modal_tail_ + 4e-16 * (s.magnitude() + std::abs(st.value));
    return g;
}

GreenValue green0(const LevelTable& table, const Point& x, const Point& y, double energy, double precision_target) {
    return Green0Evaluator(table, y, energy, precision_target)(x);
}

GreenValue green0_mode_sum(const SpectralModel& model, std::span<const Mode> modes, const Point& x, const Point& y,
                           double energy) {
    model.require_inside(x, "green0_mode_sum");
    model.require_inside(y, "green0_mode_sum");
    CompensatedSum s;
    for (const auto& md : modes) {
        const double num = model.mode_value(md, x) * model.mode_value(md, y);
        if (num == 0.0) continue;
        s.add(num / (md.energy - energy));
    }
    GreenValue g;
    g.x = x;
    g.y = y;
    g.energy = energy;
    g.value = s.value();
    g.cutoff = modes.size();
    g.tail_bound = std::numeric_limits<double>::infinity();
    return g;
}

double green0_interval_closed_form(double length, double x, double y, double energy) {
    if (!(length > 0.0)) throw DomainError("interval length must be positive");
    if (x < 0.0 || x > length || y < 0.0 || y > length) throw DomainError("point outside the interval");
    const double lo = std::min(x, y);
    const double hi = std::max(x, y);
    const double b = length - hi;
    if (energy < 0.0) {
        // sinh(k lo) sinh(k b) / (k sinh(k L)), written without overflow.
        const double k = std::sqrt(-energy);
        const double num = -std::expm1(-2.0 * k * lo) * -std::expm1(-2.0 * k * b);
        const double den = -std::expm1(-2.0 * k * length);
        return std::exp(k * (lo + b - length)) * num / (2.0 * k * den);
    }
    if (energy == 0.0) return lo * b / length;
    const double k = std::sqrt(energy);
    const double s = std::sin(k * length);
    if (std::abs(s) < 1e-14) throw PoleProximityError("closed form evaluated at a Dirichlet eigenvalue");
    return std::sin(k * lo) * std::sin(k * b) / (k * s);
}

GreenValue green0_interval_mode_sum(double length, double x, double y, double energy, double precision_target,
                                    std::size_t max_terms) {
    if (x < 0.0 || x > length || y < 0.0 || y > length) throw DomainError("point outside the interval");
    const double a = pi / length;
    auto f = [&](double n) { return 1.0 / (a * a * n * n - energy); };
    const double tm = a * (x - y);
    const double tp = a * (x + y);
    // Oscillating parts: phi_n(x) phi_n(y) = (cos(n tm) - cos(n tp)) / L.
    auto osc = [&](double theta) {
        const double s = std::abs(std::sin(theta / 2.0));
        return s < 1e-300 ? std::numeric_limits<double>::infinity() : 1.0 / s;
    };
    const bool diagonal = x == y;
    // f is positive, decreasing and convex past n0.
    const double n0 = energy > 0.0 ? std::sqrt(energy) / a + 1.0 : 1.0;
    // int_t^inf f
    auto integral = [&](double t) {
        if (energy < 0.0) {
            const double k = std::sqrt(-energy);
            return std::atan2(k, a * t) / (a * k);
        }
        if (energy == 0.0) return 1.0 / (a * a * t);
        const double k = std::sqrt(energy);
        return std::log1p(2.0 * k / (a * t - k)) / (2.0 * a * k);
    };
    // Non-oscillating diagonal remainder sum_{m>n} f(m) lies in [I(n+1), I(n+1/2)].
    auto diag_mid = [&](double n) { return 0.5 * (integral(n + 0.5) + integral(n + 1.0)) / length; };
    auto diag_err = [&](double n) { return 0.5 * (integral(n + 0.5) - integral(n + 1.0)) / length; };
    auto bound = [&](double n) {
        if (n <= n0) return std::numeric_limits<double>::infinity();
        double b = 2.0 * f(n + 1.0) * ((diagonal ? 0.0 : osc(tm)) + osc(tp)) / length;
        if (diagonal) b += diag_err(n);
        return b;
    };
    std::size_t n = 64;
    while (n < max_terms && !(bound(static_cast<double>(n)) <= precision_target)) n *= 2;
    n = std::min(n, max_terms);
    CompensatedSum s;
    for (std::size_t k = 1; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double en = a * a * kd * kd;
        if (en == energy) throw PoleProximityError("interval mode sum at an eigenvalue");
        s.add((2.0 / length) * std::sin(kd * a * x) * std::sin(kd * a * y) / (en - energy));
    }
    GreenValue g;
    g.x = Point(x);
    g.y = Point(y);
    g.energy = energy;
    g.value = s.value() + (diagonal ? diag_mid(static_cast<double>(n)) : 0.0);
    g.cutoff = n;
    g.tail_bound = bound(static_cast<double>(n)) + 4e-16 * s.magnitude();
    return g;
}

}  // namespace pointint
