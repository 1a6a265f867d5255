// Acceptance criteria 1-8: one PASS/FAIL line each, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pointint/errors.hpp"
#include "pointint/green.hpp"
#include "pointint/verification.hpp"

using namespace pointint;

namespace {

const SpectralModel interval = SpectralModel::interval(pi);
const SpectralModel rect = SpectralModel::rectangle(1.0, std::sqrt(2.0));
const SpectralModel torus = SpectralModel::torus2d(1.0, 1.3);
const Point a_interval(1.0);
const Point a_rect(0.37, 0.61);
const Point a_torus(0.05, 1.2);
const Scheme unit{1.0, 1.0};

struct Solved {
    LevelTable table;
    std::vector<PerturbedLevel> levels;
};

Solved solve(const SpectralModel& m, const Point& a, const Scheme& s, std::size_t k_max) {
    auto t = prepare_levels(m, a, s, k_max);
    auto l = solve_spectrum(t, s, k_max);
    return {std::move(t), std::move(l)};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Collects failed conditions with a short reason each.
struct Verdict {
    std::vector<std::string> failures;
    std::ostringstream summary;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

// 1 ----------------------------------------------------------------------------

void interlacing(Verdict& v) {
    const std::vector<std::tuple<std::string, SpectralModel, Point>> cases = {
        {"interval", interval, a_interval}, {"rectangle", rect, a_rect}, {"torus2d", torus, a_torus}};
    for (const auto& [name, m, a] : cases) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sv = solve(m, a, unit, 8);
        std::size_t shifted = 0;
        for (const auto& l : sv.levels) {
            if (l.status != LevelStatus::shifted) continue;
            ++shifted;
            const double below = l.index == 0 ? -INFINITY : sv.table.levels()[l.index - 1].energy;
            v.require(below < l.energy_star && l.energy_star < l.base_energy,
                      name + " level " + std::to_string(l.index) + " outside its interval");
        }
        v.require(sv.levels[0].status == LevelStatus::shifted && sv.levels[0].energy_star < sv.levels[0].base_energy,
                  name + " ground state not below E_0");
        const double dt = seconds_since(t0);
        v.require(dt < 10.0, name + " took " + sci(dt) + " s");
        v.summary << name << " " << shifted << " shifted; ";
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto nodal = solve(interval, Point(pi / 2), unit, 8);
    std::size_t unchanged = 0;
    for (const auto& l : nodal.levels) {
        const bool odd_mode = l.index % 2 == 1;  // sin(2jx) vanishes at pi/2
        if (odd_mode) {
            v.require(l.status == LevelStatus::unchanged_nodal && l.energy_star == l.base_energy,
                      "nodal level " + std::to_string(l.index) + " moved");
            ++unchanged;
        } else {
            v.require(l.status == LevelStatus::shifted, "level " + std::to_string(l.index) + " should shift");
        }
    }
    v.require(seconds_since(t0) < 10.0, "nodal demo too slow");
    v.summary << "nodal demo " << unchanged << " exact";
}

// 2 ----------------------------------------------------------------------------

void oracle(Verdict& v) {
    const auto sv = solve(interval, a_interval, unit, 5);
    const auto big = table_with_levels(interval, a_interval, 4096);
    double worst_rel = 0.0;
    {
        const auto o = oracle_diagonalize(1024, big, unit);
        for (std::size_t k = 0; k <= 5; ++k) {
            const auto r = solve_level_truncated(k, 1024, big, unit);
            worst_rel = std::max(worst_rel, std::abs(r.energy_star - o.eigenvalues[k]) / std::abs(o.eigenvalues[k]));
        }
    }
    v.require(worst_rel <= 1e-10, "truncated roots differ from oracle by " + sci(worst_rel));
    std::vector<double> prev;
    double last_ratio = 0.0;
    for (std::size_t n : {512, 1024, 2048, 4096}) {
        auto o = oracle_diagonalize(n, big, unit);
        compare_oracle(o, sv.levels, big, unit);
        v.require(o.deviations.size() == sv.levels.size(), "missing oracle matches at N = " + std::to_string(n));
        for (std::size_t i = 0; i < o.deviations.size(); ++i) {
            v.require(o.deviations[i] <= o.deviation_bounds[i],
                      "N = " + std::to_string(n) + " level " + std::to_string(i) + " exceeds its bound");
            if (!prev.empty())
                v.require(o.deviations[i] < prev[i], "deviation grew at N = " + std::to_string(n));
            last_ratio = std::max(last_ratio, o.deviations[i] / o.deviation_bounds[i]);
        }
        prev = o.deviations;
    }
    v.summary << "N=1024 rel " << sci(worst_rel) << "; N=4096 max dev " << sci(*std::max_element(prev.begin(), prev.end()))
              << " (" << sci(last_ratio) << " of bound)";
}

// 3 ----------------------------------------------------------------------------

void orthonormality(Verdict& v) {
    const std::vector<std::tuple<std::string, SpectralModel, Point, std::size_t>> cases = {
        {"1D", interval, a_interval, 4096}, {"2D", rect, a_rect, 512}};
    for (const auto& [name, m, a, cells] : cases) {
        const auto sv = solve(m, a, unit, 7);
        const auto gm = gram_mode_space(sv.levels, sv.table, unit, 1e-8);
        v.require(gm.pass && gm.max_offdiag <= gm.certificate && gm.certificate <= 1e-8,
                  name + " mode-space Gram certificate " + sci(gm.certificate));
        const auto q = OffsetQuadrature::build(m, a, GridSpec::for_model(m, cells));
        std::vector<EigenfunctionEvaluator> psi;
        for (const auto& l : sv.levels) psi.emplace_back(sv.table, unit, l);
        const auto gq = gram_quadrature(psi, q, 1e-6);
        v.require(gq.max_offdiag <= 1e-6 && gq.max_diag_dev <= 1e-6,
                  name + " quadrature Gram off " + sci(gq.max_offdiag) + " diag " + sci(gq.max_diag_dev));
        v.summary << name << " mode cert " << sci(gm.certificate) << ", quad off " << sci(gq.max_offdiag) << " diag "
                  << sci(gq.max_diag_dev) << "; ";
    }
}

// 4 ----------------------------------------------------------------------------

void completeness(Verdict& v) {
    const auto sv = solve(interval, a_interval, unit, 64);
    const auto q = OffsetQuadrature::build(interval, a_interval, GridSpec::for_model(interval, 4096));
    const auto basis = completeness_input(sv.table, unit, sv.levels, q);
    std::vector<std::size_t> ks(65);
    for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = k;
    const std::size_t synth = 3;
    for (auto id : {TestFunction::base_mode, TestFunction::bump, TestFunction::synthesized_psi}) {
        const auto f = stock_function(id, sv.table, unit, sv.levels, q, synth);
        const auto r = completeness_reconstruct(id, f, basis, ks, synth);
        v.require(r.monotone, to_string(id) + " residual not monotone");
        v.require(r.points.back().psi_residual <= 1e-3,
                  to_string(id) + " residual " + sci(r.points.back().psi_residual) + " at K = 64");
        if (id == TestFunction::synthesized_psi)
            for (const auto& p : r.points)
                if (p.K >= synth)
                    v.require(p.psi_residual <= p.floor, "synthesized psi above floor at K = " + std::to_string(p.K));
        v.summary << to_string(id) << " " << sci(r.points.back().psi_residual) << "; ";
    }
}

// 5 ----------------------------------------------------------------------------

void scheme(Verdict& v) {
    const SolverOptions opts;
    const std::vector<std::tuple<std::string, SpectralModel, Point, std::size_t>> cases = {
        {"interval", interval, a_interval, 8}, {"rectangle", rect, a_rect, 5}};
    for (const auto& [name, m, a, k] : cases) {
        const auto r = scheme_invariance(m, a, unit, 4.0, k, opts, 100);
        v.require(r.max_level_difference <= 10.0 * opts.tol, name + " levels differ by " + sci(r.max_level_difference));
        v.require(r.max_phi_excess <= 0.0, name + " Phi differs beyond the bounds");
        v.require(r.energies_checked >= 90, name + " only " + std::to_string(r.energies_checked) + " energies");
        v.summary << name << " max diff " << sci(r.max_level_difference) << " over " << r.energies_checked
                  << " energies; ";
    }
}

// 6 ----------------------------------------------------------------------------

void krein(Verdict& v) {
    const auto sv = solve(interval, a_interval, unit, 5);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ux(0.05, pi - 0.05), ue(-10.0, 30.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Point x(ux(rng)), y(ux(rng));
        const double e = ue(rng);
        const double k = krein_resolvent_truncated(x, y, e, 64, sv.table, unit).value;
        const double o = oracle_resolvent(x, y, e, 64, sv.table, unit);
        worst = std::max(worst, std::abs(k - o) / std::abs(o));
    }
    v.require(worst <= 1e-12, "resolvent mismatch " + sci(worst));
    double residue = 0.0;
    for (const auto& l : sv.levels) residue = std::max(residue, residue_check(Point(0.5), Point(2.4), l, sv.table, unit).deviation);
    const auto sr = solve(rect, a_rect, unit, 3);
    for (const auto& l : sr.levels)
        residue = std::max(residue, residue_check(Point(0.2, 0.3), Point(0.8, 1.1), l, sr.table, unit).deviation);
    v.require(residue <= 1e-6, "residue deviation " + sci(residue));
    v.summary << "resolvent rel " << sci(worst) << ", residue " << sci(residue);
}

// 7 ----------------------------------------------------------------------------

void domain(Verdict& v) {
    const std::vector<std::tuple<std::string, SpectralModel, Point>> cases = {{"interval", interval, a_interval},
                                                                           {"rectangle", rect, a_rect}};
    for (const auto& [name, m, a] : cases) {
        const auto sv = solve(m, a, unit, 1);
        const auto big = table_with_levels(m, a, 65536);
        const auto d = domain_vector_norms(sv.levels[0], sv.levels[1], big);
        std::size_t steps = 0;
        for (std::size_t i = 0; i + 1 < d.n.size(); ++i) {
            if (d.n[i] < 1000 || d.n[i + 1] != 2 * d.n[i]) continue;
            ++steps;
            v.require(d.partial[i + 1] - d.partial[i] <= d.tail[i],
                      name + " step at N = " + std::to_string(d.n[i]) + " exceeds the tail bound");
        }
        v.require(steps >= 3, name + " has too few doubling steps past 1000");
        v.summary << name << " S = " << sci(d.partial.back()) << " (" << steps << " steps); ";
    }
    std::vector<double> ts;
    for (int i = 0; i <= 12; ++i) ts.push_back(0.01 * std::pow(1000.0, i / 12.0));
    std::size_t rows = 0;
    for (const auto& [m, a] : {std::pair{interval, a_interval}, {rect, a_rect}, {torus, a_torus}}) {
        for (const auto& r : heat_kernel_check(LevelTable::build(m, a, 5000.0), ts)) {
            v.require(r.holds, to_string(m.kind()) + " heat bound fails at t = " + sci(r.t));
            ++rows;
        }
    }
    v.summary << "heat bound " << rows << " rows";
}

// 8 ----------------------------------------------------------------------------

void green_closed_form(Verdict& v) {
    double worst = 0.0;
    for (double e : {-1.0, -5.0, 0.5}) {
        for (int i = 1; i < 16; ++i) {
            for (int j = 1; j < 16; ++j) {
                const double x = pi * i / 16.0, y = pi * j / 16.0;
                const double closed = green0_interval_closed_form(pi, x, y, e);
                const auto sum = green0_interval_mode_sum(pi, x, y, e, 1e-10);
                worst = std::max(worst, std::abs(closed - sum.value));
            }
        }
    }
    v.require(worst <= 1e-8, "sup deviation " + sci(worst));
    v.summary << "sup deviation " << sci(worst) << " on a 15x15 grid, 3 energies";
}

}  // namespace

int main(int argc, char** argv) {
    // Optional argument: run only criterion N (1-based).
    const std::size_t only = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 0;
    const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
        {"interlacing", interlacing},         {"oracle equivalence", oracle}, {"orthonormality", orthonormality},
        {"completeness", completeness},       {"scheme invariance", scheme},  {"Krein and residue", krein},
        {"domain and heat kernel", domain},   {"1D closed-form Green", green_closed_form}};
    int failed = 0;
    if (only > criteria.size()) {
        std::fprintf(stderr, "criterion must be 1..%zu\n", criteria.size());
        return 2;
    }
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && only != i + 1) continue;
        Verdict v;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(v);
        } catch (const std::exception& e) {
            v.failures.push_back(std::string("exception: ") + e.what());
        }
        const double dt = seconds_since(t0);
        const bool pass = v.failures.empty();
        std::string summary = v.summary.str();
        while (!summary.empty() && (summary.back() == ' ' || summary.back() == ';')) summary.pop_back();
        failed += pass ? 0 : 1;
        std::printf("%s criterion %zu (%s) [%.1f s]: %s\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    dt, summary.c_str());
        for (const auto& f : v.failures) std::printf("    %s\n", f.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
