#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "pointint/errors.hpp"
#include "pointint/quadrature.hpp"
#include "pointint/verification.hpp"
#include "pointint/wavefunction.hpp"

namespace fs = std::filesystem;

namespace pointint::cli {

namespace {

struct Solved {
    LevelTable table;
    std::vector<PerturbedLevel> levels;
};

Solved solve(const RunConfig& c, std::size_t k_max) {
    auto t = prepare_levels(c.model, c.centers[0], c.schemes[0], k_max, c.solver);
    auto l = solve_spectrum(t, c.schemes[0], k_max, c.solver);
    return {std::move(t), std::move(l)};
}

void require_single_center(const RunConfig& c, const std::string& cmd) {
    if (c.centers.size() != 1)
        throw UsageError("'" + cmd + "' takes one center; use 'pointint multi' for " + std::to_string(c.centers.size()));
}

fs::path out_dir(const RunConfig& c, const Options& o) {
    fs::path p = o.out_dir.value_or(c.output.directory);
    fs::create_directories(p);
    return p;
}

bool wants(const RunConfig& c, const Options& o, const std::string& fmt) {
    if (o.format) return *o.format == fmt;
    return std::find(c.output.formats.begin(), c.output.formats.end(), fmt) != c.output.formats.end();
}

void write_file(const fs::path& p, const std::string& text, std::ostream& log) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ResourceError("cannot write " + p.string());
    f << text;
    log << "wrote " << p.string() << '\n';
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i)
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
    return t;
}

Point random_point(const SpectralModel& m, std::mt19937_64& rng) {
    Point p;
    p.dim = m.dim();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        const double len = m.length(i);
        p[i] = std::uniform_real_distribution<double>(0.02 * len, 0.98 * len)(rng);
    }
    return p;
}

// Individual checks -------------------------------------------------------------

CheckOutcome check_gram(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"gram", false, "", {{"mode_space", v.mode_gram_tol}, {"quadrature", v.gram_tol}}, {}};
    const auto sv = solve(c, v.gram_levels - 1);
    const auto gm = gram_mode_space(sv.levels, sv.table, c.schemes[0], v.mode_gram_tol);
    out.details["mode_space"] = to_json(gm);
    const std::size_t cells = v.quadrature_cells ? v.quadrature_cells : default_quadrature_cells(c.model.dim());
    const auto q = OffsetQuadrature::build(c.model, c.centers[0], GridSpec::for_model(c.model, cells));
    std::vector<EigenfunctionEvaluator> psi;
    for (const auto& l : sv.levels) psi.emplace_back(sv.table, c.schemes[0], l);
    out.details["quadrature_cells"] = cells;
    const auto gq = gram_quadrature(psi, q, v.gram_tol);
    out.details["quadrature"] = to_json(gq);
    out.pass = gm.pass && gq.pass;
    return out;
}

CheckOutcome check_completeness(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"completeness", false, "", {{"residual", v.completeness_tol}, {"K", v.completeness_k}}, {}};
    const std::size_t synth = std::min<std::size_t>(3, v.completeness_k);
    const auto sv = solve(c, v.completeness_k);
    const std::size_t cells = v.quadrature_cells ? v.quadrature_cells : default_quadrature_cells(c.model.dim());
    const auto q = OffsetQuadrature::build(c.model, c.centers[0], GridSpec::for_model(c.model, cells));
    const auto basis = completeness_input(sv.table, c.schemes[0], sv.levels, q);
    std::vector<std::size_t> ks(v.completeness_k + 1);
    for (std::size_t k = 0; k < ks.size(); ++k) ks[k] = k;
    out.pass = true;
    Json reports = Json::array();
    for (auto id : {TestFunction::base_mode, TestFunction::bump, TestFunction::synthesized_psi}) {
        const auto f = stock_function(id, sv.table, c.schemes[0], sv.levels, q, synth);
        const auto r = completeness_reconstruct(id, f, basis, ks, synth);
        bool ok = r.monotone && r.points.back().psi_residual <= v.completeness_tol;
        if (id == TestFunction::synthesized_psi)
            for (const auto& p : r.points)
                if (p.K >= synth) ok = ok && p.psi_residual <= p.floor;
        Json j = to_json(r);
        j["pass"] = ok;
        reports.push_back(j);
        out.pass = out.pass && ok;
    }
    out.details["functions"] = reports;
    return out;
}

CheckOutcome check_oracle(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"oracle", false, "", {{"truncated_vs_oracle_relative", v.oracle_tol}}, {}};
    const Scheme& s = c.schemes[0];
    const std::size_t k_cmp = std::min<std::size_t>(c.k_max, 5);
    const auto sv = solve(c, k_cmp);
    auto sizes = v.oracle_sizes;
    std::sort(sizes.begin(), sizes.end());
    const auto big = table_with_levels(c.model, c.centers[0], sizes.back(), c.solver.max_cutoff);

    bool ok = true;
    double worst_rel = 0.0;
    std::vector<double> prev;
    Json rows = Json::array();
    for (std::size_t n : sizes) {
        auto o = oracle_diagonalize(n, big, s);
        // Truncated secular roots against the matrix eigenvalues.
        for (std::size_t k = 0; k <= k_cmp; ++k) {
            const auto r = solve_level_truncated(k, n, big, s, c.solver);
            if (r.status == LevelStatus::absent) continue;
            double best = INFINITY;
            for (double e : o.eigenvalues) best = std::min(best, std::abs(e - r.energy_star));
            worst_rel = std::max(worst_rel, best / std::max(1.0, std::abs(r.energy_star)));
        }
        compare_oracle(o, sv.levels, big, s);
        bool within = o.pattern_matches;
        bool shrinking = true;
        for (std::size_t i = 0; i < o.deviations.size(); ++i) {
            within = within && o.deviations[i] <= o.deviation_bounds[i];
            if (!prev.empty() && o.deviations[i] > 0.0) shrinking = shrinking && o.deviations[i] < prev[i];
        }
        prev = o.deviations;
        ok = ok && within && shrinking;
        Json row = to_json(o);
        row.erase("eigenvalues");
        row.erase("from_nodal");
        row["within_bounds"] = within;
        row["shrinking"] = shrinking;
        rows.push_back(row);
    }
    out.details["truncated_max_relative"] = worst_rel;
    out.details["sizes"] = rows;
    out.pass = ok && worst_rel <= v.oracle_tol;
    return out;
}

CheckOutcome check_scheme(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"scheme", false, "", {{"level", 10.0 * c.solver.tol}, {"new_mu_sq", v.new_mu_sq}}, {}};
    const auto r = scheme_invariance(c.model, c.centers[0], c.schemes[0], v.new_mu_sq, c.k_max, c.solver,
                                     v.scheme_points);
    out.details = to_json(r);
    out.pass = r.pass;
    return out;
}

CheckOutcome check_krein(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"krein", false, "", {{"resolvent_relative", v.resolvent_tol}, {"residue", v.residue_tol}}, {}};
    const Scheme& s = c.schemes[0];
    const auto sv = solve(c, c.k_max);
    if (sv.table.level_count() < v.resolvent_levels)
        throw ResourceError("level table smaller than verify.resolvent_levels");
    std::mt19937_64 rng(v.seed);
    const double e_lo = sv.table.levels().front().energy - 10.0;
    const double e_hi = sv.table.levels()[std::min<std::size_t>(5, v.resolvent_levels - 1)].energy;
    std::uniform_real_distribution<double> ue(e_lo, e_hi);
    double worst = 0.0;
    Json samples = Json::array();
    for (std::size_t i = 0; i < v.resolvent_samples; ++i) {
        const Point x = random_point(c.model, rng), y = random_point(c.model, rng);
        const double e = ue(rng);
        const double k = krein_resolvent_truncated(x, y, e, v.resolvent_levels, sv.table, s).value;
        const double o = oracle_resolvent(x, y, e, v.resolvent_levels, sv.table, s);
        const double rel = std::abs(k - o) / std::abs(o);
        worst = std::max(worst, rel);
        samples.push_back({{"x", to_json(x)}, {"y", to_json(y)}, {"E", e}, {"krein", k}, {"oracle", o}, {"relative", rel}});
    }
    const Point x = random_point(c.model, rng), y = random_point(c.model, rng);
    double worst_residue = 0.0;
    Json residues = Json::array();
    for (const auto& l : sv.levels) {
        if (l.status == LevelStatus::absent) continue;
        const auto r = residue_check(x, y, l, sv.table, s);
        worst_residue = std::max(worst_residue, r.deviation);
        residues.push_back({{"k", l.index}, {"estimate", r.estimate}, {"expected", r.expected}, {"deviation", r.deviation}});
    }
    out.details = {{"resolvent_samples", samples},
                   {"resolvent_max_relative", worst},
                   {"residue_points", {to_json(x), to_json(y)}},
                   {"residues", residues},
                   {"residue_max_deviation", worst_residue}};
    out.pass = worst <= v.resolvent_tol && worst_residue <= v.residue_tol;
    return out;
}

CheckOutcome check_heat(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"heat", false, "", {{"t_min", v.t_min}, {"t_max", v.t_max}}, {}};
    const auto table = LevelTable::build(c.model, c.centers[0], 5000.0);
    const auto rows = heat_kernel_check(table, log_grid(v.t_min, v.t_max, v.t_points));
    out.pass = true;
    Json j = Json::array();
    for (const auto& r : rows) {
        j.push_back(to_json(r));
        out.pass = out.pass && r.holds;
    }
    out.details["rows"] = j;
    return out;
}

CheckOutcome check_domain(const RunConfig& c) {
    const auto& v = c.verify;
    CheckOutcome out{"domain", false, "", {{"cauchy_from_N", 1000}}, {}};
    const auto sv = solve(c, 1);
    const auto big = table_with_levels(c.model, c.centers[0], v.domain_levels, c.solver.max_cutoff);
    const auto d = domain_vector_norms(sv.levels[0], sv.levels[1], big);
    // Every doubling step past N = 1000 must stay below the tail bound, and there must be one.
    bool any = false, ok = true;
    Json rows = Json::array();
    for (std::size_t i = 0; i < d.n.size(); ++i) {
        Json row{{"N", d.n[i]}, {"partial", json_number(d.partial[i])}, {"tail", json_number(d.tail[i])}};
        if (d.n[i] >= 1000 && i + 1 < d.n.size() && d.n[i + 1] == 2 * d.n[i]) {
            const bool step_ok = d.partial[i + 1] - d.partial[i] <= d.tail[i];
            row["cauchy"] = step_ok;
            any = true;
            ok = ok && step_ok;
        }
        rows.push_back(row);
    }
    out.details["series"] = rows;
    out.pass = any && ok;
    return out;
}

}  // namespace

std::size_t default_quadrature_cells(std::size_t dim) { return dim == 1 ? 4096 : dim == 2 ? 512 : 32; }
std::size_t default_norm_cells(std::size_t dim) { return dim == 1 ? 4096 : dim == 2 ? 256 : 32; }

CheckOutcome run_check(Check check, const RunConfig& c) {
    try {
        switch (check) {
            case Check::gram: return check_gram(c);
            case Check::completeness: return check_completeness(c);
            case Check::oracle: return check_oracle(c);
            case Check::scheme: return check_scheme(c);
            case Check::krein: return check_krein(c);
            case Check::heat: return check_heat(c);
            case Check::domain: return check_domain(c);
        }
    } catch (const Error& e) {
        CheckOutcome out;
        out.name = to_string(check);
        out.error = e.what();
        return out;
    }
    return {};
}

// Commands ------------------------------------------------------------------------

int cmd_spectrum(const RunConfig& c, const Options& o, std::ostream& log) {
    require_single_center(c, "spectrum");
    const auto sv = solve(c, c.k_max);
    const fs::path dir = out_dir(c, o);
    if (wants(c, o, "csv")) write_file(dir / "spectrum.csv", spectrum_csv(sv.levels), log);
    if (wants(c, o, "json")) write_file(dir / "spectrum.json", dump_json(spectrum_json(c, sv.levels)), log);
    log << std::setw(4) << "k" << std::setw(26) << "E_k" << std::setw(26) << "E*" << "  status\n";
    for (const auto& l : sv.levels)
        log << std::setw(4) << l.index << std::setw(26) << format_double(l.base_energy) << std::setw(26)
            << format_double(l.energy_star) << "  " << to_string(l.status) << '\n';
    return ok;
}

int cmd_eigfun(const RunConfig& c, const Options& o, std::ostream& log) {
    require_single_center(c, "eigfun");
    const std::size_t k = o.level.value_or(c.eigfun.level);
    if (k > c.k_max)
        throw UsageError("level " + std::to_string(k) + " is beyond solver.k_max = " + std::to_string(c.k_max));
    const auto sv = solve(c, c.k_max);
    const std::size_t cells = c.eigfun.norm_cells ? c.eigfun.norm_cells : default_norm_cells(c.model.dim());
    const auto f = eigenfunction(sv.levels[k], uniform_grid(c.model, c.eigfun.grid_points), sv.table, c.schemes[0],
                                 GridSpec::for_model(c.model, cells));
    const fs::path dir = out_dir(c, o);
    const std::string stem = "eigfun_" + std::to_string(k);
    if (wants(c, o, "csv")) write_file(dir / (stem + ".csv"), eigenfunction_csv(f, c.model.dim()), log);
    if (wants(c, o, "json")) write_file(dir / (stem + ".json"), dump_json(eigenfunction_json(f, c.model.dim())), log);
    log << "level " << k << " E* = " << format_double(f.level.energy_star) << " (" << to_string(f.level.status)
        << "), norm " << format_double(f.certificate.norm) << " +- " << format_double(f.certificate.quadrature_error)
        << '\n';
    return ok;
}

int cmd_verify(const RunConfig& c, const Options& o, std::ostream& log) {
    require_single_center(c, "verify");
    std::vector<Check> checks = c.verify.checks;
    if (!o.checks.empty()) {
        checks.clear();
        for (const auto& name : o.checks) {
            try {
                checks.push_back(check_from_string(name));
            } catch (const DomainError& e) {
                throw UsageError(e.what());
            }
        }
    }
    VerificationReport report;
    for (Check ch : checks) {
        report.checks.push_back(run_check(ch, c));
        const auto& r = report.checks.back();
        log << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.error.empty()) log << ": " << r.error;
        log << '\n';
    }
    const fs::path dir = out_dir(c, o);
    write_file(dir / "verify.json", dump_json(to_json(report)), log);
    return report.pass() ? ok : failure;
}

int cmd_multi(const RunConfig& c, const Options& o, std::ostream& log) {
    if (c.centers.size() < 2) throw UsageError("'multi' needs at least two centers; use 'pointint spectrum' for one");
    MultiCenterProblem p{c.model, c.centers, c.schemes};
    p.validate();
    const auto levels = solve_spectrum_multi(p, c.k_max, c.solver);
    const fs::path dir = out_dir(c, o);
    if (wants(c, o, "csv")) write_file(dir / "multi.csv", multi_csv(levels), log);
    if (wants(c, o, "json")) write_file(dir / "multi.json", dump_json(multi_json(c, levels)), log);
    for (std::size_t n = 0; n < levels.size(); ++n) {
        log << std::setw(4) << n << std::setw(26) << format_double(levels[n].energy_star) << "  (";
        for (std::size_t i = 0; i < levels[n].coefficients.size(); ++i)
            log << (i ? ", " : "") << std::setprecision(6) << levels[n].coefficients[i];
        log << ")\n";
    }
    return ok;
}

int cmd_oracle(const RunConfig& c, const Options& o, std::ostream& log) {
    require_single_center(c, "oracle");
    const CheckOutcome r = run_check(Check::oracle, c);
    if (!r.error.empty()) throw PrecisionError(r.error);
    const fs::path dir = out_dir(c, o);
    if (wants(c, o, "json")) write_file(dir / "oracle.json", dump_json(r.details), log);
    if (wants(c, o, "csv")) {
        std::ostringstream csv;
        csv << "N,level,E_star,oracle,deviation,bound\n";
        const auto sv = solve(c, std::min<std::size_t>(c.k_max, 5));
        for (const auto& row : r.details.at("sizes")) {
            const auto& dev = row.at("deviations");
            std::size_t i = 0;
            for (const auto& l : sv.levels) {
                if (l.status == LevelStatus::absent || i >= dev.size()) continue;
                csv << row.at("N").get<std::size_t>() << ',' << l.index << ',' << format_double(l.energy_star) << ','
                    << format_double(number_from_json(row.at("matched").at(i))) << ','
                    << format_double(number_from_json(dev.at(i))) << ','
                    << format_double(number_from_json(row.at("deviation_bounds").at(i))) << '\n';
                ++i;
            }
        }
        write_file(dir / "oracle.csv", csv.str(), log);
    }
    for (const auto& row : r.details.at("sizes")) {
        double worst = 0.0;
        for (const auto& d : row.at("deviations")) worst = std::max(worst, number_from_json(d));
        log << "N = " << std::setw(6) << row.at("N").get<std::size_t>() << "  max deviation " << format_double(worst)
            << (row.at("within_bounds").get<bool>() ? "  within bound" : "  OUTSIDE bound") << '\n';
    }
    log << (r.pass ? "PASS" : "FAIL") << " oracle\n";
    return r.pass ? ok : failure;
}

int run(const std::string& command, const Options& o, std::ostream& log, std::ostream& err) {
    try {
        const RunConfig c = load_config(o.config_path);
        if (command == "spectrum") return cmd_spectrum(c, o, log);
        if (command == "eigfun") return cmd_eigfun(c, o, log);
        if (command == "verify") return cmd_verify(c, o, log);
        if (command == "multi") return cmd_multi(c, o, log);
        if (command == "oracle") return cmd_oracle(c, o, log);
        throw UsageError("unknown command '" + command + "'");
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
}

}  // namespace pointint::cli
