#include "pointint/heat_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "pointint/errors.hpp"
#include "pointint/special_functions.hpp"

namespace pointint {

namespace {

constexpr double image_exponent = 60.0;  // dropped images carry exp(-60) or less

struct AxisImage {
    double r;
    double sign;
};

// Images of y seen from x along one axis with |r| <= r_max.
std::vector<AxisImage> axis_images(bool periodic, double length, double x, double y, double r_max) {
    std::vector<AxisImage> out;
    auto family = [&](double r0, double spacing, double sign) {
        const long jlo = static_cast<long>(std::floor((-r_max - r0) / spacing));
        const long jhi = static_cast<long>(std::ceil((r_max - r0) / spacing));
        for (long j = jlo; j <= jhi; ++j) {
            const double r = r0 + static_cast<double>(j) * spacing;
            if (std::abs(r) <= r_max) out.push_back({r, sign});
        }
    };
    if (periodic) {
        family(x - y, length, 1.0);
    } else {
        family(x - y, 2.0 * length, 1.0);
        family(x + y, 2.0 * length, -1.0);
    }
    return out;
}

struct Image {
    double r_sq;
    double sign;
};

std::vector<Image> images_within(const SpectralModel& m, const Point& x, const Point& y, double r_max) {
    std::vector<Image> out{{0.0, 1.0}};
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const auto ax = axis_images(m.periodic(), m.length(i), x[i], y[i], r_max);
        std::vector<Image> next;
        next.reserve(out.size() * ax.size());
        for (const auto& img : out)
            for (const auto& a : ax) {
                const double r2 = img.r_sq + a.r * a.r;
                if (r2 <= r_max * r_max) next.push_back({r2, img.sign * a.sign});
            }
        out = std::move(next);
    }
    return out;
}

// Bound on sum over all images of exp(-R^2 / (8 t)) for t <= tau.
double image_mass_bound(const SpectralModel& m, double tau) {
    double prod = 1.0;
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const double s = m.periodic() ? m.length(i) : 2.0 * m.length(i);
        const double families = m.periodic() ? 1.0 : 2.0;
        const double u = s * s / (16.0 * tau);
        prod *= families * (1.0 + 2.0 * std::exp(-u / 2.0) / (1.0 - std::exp(-u)));
    }
    return prod;
}

// (4 pi)^{-D/2} sum_img sign sum_j a_j tau^{j + 1 + p - D/2} E_{j + 2 + p - D/2}(R^2 / 4 tau)
// where the caller passes a_j = c_j tau^j. `prefactor_max` bounds the time
// weight in the integrand (exp(tE) and friends) for the dropped-image bound;
// `remainder` bounds the truncated Taylor tail per unit image.
Bounded image_series(const SpectralModel& m, const Point& x, const Point& y, double tau, int p,
                     const std::vector<double>& a, double prefactor_max, double remainder) {
    const double d = static_cast<double>(m.dim());
    const double r_max = std::sqrt(8.0 * tau * image_exponent);
    const auto imgs = images_within(m, x, y, r_max);
    const double nu0 = 2.0 + p - d / 2.0;
    const double scale = std::pow(4.0 * pi, -d / 2.0) * std::pow(tau, 1.0 + p - d / 2.0);

    std::vector<double> table(a.size());
    CompensatedSum total;
    double magnitude = 0.0;
    for (const auto& img : imgs) {
        const double xi = img.r_sq / (4.0 * tau);
        expint_e_table(nu0, xi, table);
        CompensatedSum s;
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == 0.0) continue;
            if (!std::isfinite(table[j]))
                throw DivergenceError("Green's function diverges on the diagonal in D >= 2");
            s.add(a[j] * table[j]);
        }
        total.add(img.sign * s.value());
        magnitude += s.magnitude();
    }
    Bounded out;
    out.value = scale * total.value();
    const double dropped = prefactor_max * std::pow(tau, p) * std::pow(4.0 * pi, -d / 2.0) *
                           image_mass_bound(m, tau) * std::pow(tau, 1.0 - d / 2.0) *
                           expint_e(2.0 - d / 2.0, image_exponent);
    out.error = dropped + scale * (remainder * static_cast<double>(imgs.size()) + 8e-16 * magnitude);
    return out;
}

// Number of Taylor terms so that 2 e^{z} z^{J+1}/(J+1)! < 1e-22 with z = m tau.
std::size_t taylor_terms(double z, double* remainder) {
    double term = 1.0;  // z^j / j!
    std::size_t j = 0;
    for (;; ++j) {
        const double next = term * z / static_cast<double>(j + 1);
        const double rem = 2.0 * std::exp(z) * next;
        if ((rem < 1e-22 && j >= 2) || j > 200) {
            *remainder = rem;
            return j + 1;
        }
        term = next;
    }
}

void check_tau(const SpectralModel& m, double tau) {
    if (!(tau > 0.0)) throw DomainError("split time must be positive");
    double lmin = std::numeric_limits<double>::infinity();
    for (double l : m.lengths()) lmin = std::min(lmin, l);
    if (tau > 0.0100001 * lmin * lmin) throw DomainError("split time too large for the image expansion");
}

}  // namespace

double heat_kernel_images(const SpectralModel& model, const Point& x, const Point& y, double t) {
    if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
    const double r_max = std::sqrt(4.0 * t * 50.0) + 2.0 * *std::max_element(model.lengths().begin(), model.lengths().end());
    double prod = 1.0;
    for (std::size_t i = 0; i < model.dim(); ++i) {
        CompensatedSum s;
        for (const auto& img : axis_images(model.periodic(), model.length(i), x[i], y[i], r_max))
            s.add(img.sign * std::exp(-img.r * img.r / (4.0 * t)));
        prod *= s.value() / std::sqrt(4.0 * pi * t);
    }
    return prod;
}

double heat_kernel_theta(const SpectralModel& model, const Point& x, const Point& y, double t) {
    if (!(t > 0.0)) throw DomainError("heat kernel needs t > 0");
    double prod = 1.0;
    for (std::size_t i = 0; i < model.dim(); ++i) {
        const double l = model.length(i);
        const double k1 = (model.periodic() ? 2.0 : 1.0) * pi / l;
        const long qmax = static_cast<long>(std::ceil(std::sqrt(50.0 / t) / k1)) + 1;
        CompensatedSum s;
        if (model.periodic()) {
            s.add(1.0 / l);
            for (long q = 1; q <= qmax; ++q)
                s.add(2.0 / l * std::exp(-t * k1 * k1 * q * q) * std::cos(k1 * q * (x[i] - y[i])));
        } else {
            for (long q = 1; q <= qmax; ++q)
                s.add(2.0 / l * std::exp(-t * k1 * k1 * q * q) * std::sin(k1 * q * x[i]) * std::sin(k1 * q * y[i]));
        }
        prod *= s.value();
    }
    return prod;
}

double heat_kernel_mode_sum(const SpectralModel& model, std::span<const Mode> modes, const Point& x,
                            const Point& y, double t) {
    CompensatedSum s;
    for (const auto& md : modes) s.add(std::exp(-t * md.energy) * model.mode_value(md, x) * model.mode_value(md, y));
    return s.value();
}

Bounded short_time_green(const SpectralModel& model, const Point& x, const Point& y, double energy,
                         double tau) {
    check_tau(model, tau);
    double rem = 0.0;
    const std::size_t n = taylor_terms(std::abs(energy) * tau, &rem);
    std::vector<double> a(n);
    double term = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        a[j] = term;
        term *= energy * tau / static_cast<double>(j + 1);
    }
    const double d = static_cast<double>(model.dim());
    const double e_min = expint_e(2.0 - d / 2.0 + static_cast<double>(n), 0.0);
    return image_series(model, x, y, tau, 0, a, std::exp(tau * std::max(energy, 0.0)), rem * e_min);
}

Bounded short_time_phi(const SpectralModel& model, const Point& a, double energy, double mu_sq,
                       double tau) {
    check_tau(model, tau);
    double rem = 0.0;
    const std::size_t n = taylor_terms(std::max(std::abs(energy), mu_sq) * tau, &rem);
    std::vector<double> c(n);
    double pe = 1.0, pm = 1.0, fact = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        c[j] = (pe - pm) / fact;
        pe *= energy * tau;
        pm *= -mu_sq * tau;
        fact *= static_cast<double>(j + 1);
    }
    const double d = static_cast<double>(model.dim());
    const double e_min = expint_e(2.0 - d / 2.0 + static_cast<double>(n), 0.0);
    return image_series(model, a, a, tau, 0, c, std::exp(tau * std::max(energy, 0.0)), rem * e_min);
}

Bounded short_time_derivative(const SpectralModel& model, const Point& a, double energy, double tau) {
    check_tau(model, tau);
    double rem = 0.0;
    const std::size_t n = taylor_terms(std::abs(energy) * tau, &rem);
    std::vector<double> c(n);
    double term = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        c[j] = term;
        term *= energy * tau / static_cast<double>(j + 1);
    }
    const double d = static_cast<double>(model.dim());
    const double e_min = expint_e(3.0 - d / 2.0 + static_cast<double>(n), 0.0);
    return image_series(model, a, a, tau, 1, c, std::exp(tau * std::max(energy, 0.0)), rem * e_min);
}

double split_tau(const SpectralModel& model, double energy_scale) {
    double lmin = std::numeric_limits<double>::infinity();
    for (double l : model.lengths()) lmin = std::min(lmin, l);
    return std::min(0.01 * lmin * lmin, 2.0 / std::max(1.0, std::abs(energy_scale)));
}

double split_cap(double energy, double tau) { return std::max(energy, 0.0) + 40.0 / tau; }

double split_mode_tail(const SpectralModel& model, double shift, double tau, double cap, int power) {
    const double gap = cap - shift;
    const int dim = static_cast<int>(model.dim());
    if (!(gap > 0.0) || !(tau * cap > dim / 2.0 + 1.0))
        throw MarginError("split remainder needs the cap well above the energy");
    double g = 0.0;
    switch (power) {
        case 1: g = 1.0 / gap; break;
        case 2: g = 1.0 / (gap * gap); break;
        default: g = tau / gap + 1.0 / (gap * gap); break;
    }
    // sum_{E_n > cap} exp(-tau E_n) <= tau int_cap^inf exp(-tau t) N_up(t) dt and
    // Gamma(s + 1, y) <= y^s e^{-y} y / (y - s) for y > s.
    const CountingBound nb = model.counting_bound();
    const double y = tau * cap;
    double s = 0.0;
    double binom = 1.0;
    for (int j = 0; j <= dim; ++j) {
        const double sigma = (dim - j) / 2.0;
        s += binom * std::pow(nb.c, j) * nb.A * std::pow(cap, sigma) * y / (y - sigma);
        binom = binom * (dim - j) / (j + 1);
    }
    return model.max_mode_weight() * g * std::exp(-tau * gap) * s;
}

}  // namespace pointint
