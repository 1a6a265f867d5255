#include "pointint/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "pointint/errors.hpp"

namespace pointint {

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

Json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

double number_from_json(const Json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return INFINITY;
        if (s == "-inf") return -INFINITY;
        if (s == "nan") return NAN;
    }
    throw DomainError("expected a number in JSON, got " + j.dump());
}

namespace {

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
}

}  // namespace

// Spectrum --------------------------------------------------------------------

std::string spectrum_csv(const std::vector<PerturbedLevel>& levels) {
    std::ostringstream out;
    out << "k,E_k,E_star,status,bracket_lo,bracket_hi,residual,phi_derivative\n";
    for (const auto& l : levels)
        out << l.index << ',' << format_double(l.base_energy) << ',' << format_double(l.energy_star) << ','
            << to_string(l.status) << ',' << format_double(l.bracket_lo) << ',' << format_double(l.bracket_hi) << ','
            << format_double(l.residual) << ',' << format_double(l.phi_derivative) << '\n';
    return out.str();
}

Json to_json(const PerturbedLevel& l) {
    return Json{{"k", l.index},
                {"E_k", json_number(l.base_energy)},
                {"E_star", json_number(l.energy_star)},
                {"status", to_string(l.status)},
                {"bracket", {json_number(l.bracket_lo), json_number(l.bracket_hi)}},
                {"root_enclosure", {json_number(l.root_lo), json_number(l.root_hi)}},
                {"residual", json_number(l.residual)},
                {"phi_derivative", json_number(l.phi_derivative)},
                {"iterations", l.iterations}};
}

PerturbedLevel level_from_json(const Json& j) {
    PerturbedLevel l;
    l.index = j.at("k").get<std::size_t>();
    l.base_energy = number_from_json(j.at("E_k"));
    l.energy_star = number_from_json(j.at("E_star"));
    l.status = level_status_from_string(j.at("status").get<std::string>());
    l.bracket_lo = number_from_json(j.at("bracket").at(0));
    l.bracket_hi = number_from_json(j.at("bracket").at(1));
    l.root_lo = number_from_json(j.at("root_enclosure").at(0));
    l.root_hi = number_from_json(j.at("root_enclosure").at(1));
    l.residual = number_from_json(j.at("residual"));
    l.phi_derivative = number_from_json(j.at("phi_derivative"));
    l.iterations = j.at("iterations").get<std::size_t>();
    return l;
}

Json to_json(const Scheme& s) { return Json{{"alpha_R", json_number(s.alpha_R)}, {"mu_sq", json_number(s.mu_sq)}}; }

Json to_json(const Point& p) {
    Json a = Json::array();
    for (std::size_t i = 0; i < p.dim; ++i) a.push_back(p[i]);
    return a;
}

namespace {

Json run_header(const RunConfig& c) {
    Json centers = Json::array(), schemes = Json::array();
    for (const auto& p : c.centers) centers.push_back(to_json(p));
    for (const auto& s : c.schemes) schemes.push_back(to_json(s));
    Json lengths = Json::array();
    for (std::size_t i = 0; i < c.model.dim(); ++i) lengths.push_back(c.model.length(i));
    return Json{{"source", c.source},
                {"model", {{"kind", to_string(c.model.kind())}, {"lengths", lengths}}},
                {"centers", centers},
                {"schemes", schemes},
                {"k_max", c.k_max},
                {"tol", c.solver.tol}};
}

}  // namespace

Json spectrum_json(const RunConfig& config, const std::vector<PerturbedLevel>& levels) {
    Json j = run_header(config);
    Json rows = Json::array();
    for (const auto& l : levels) rows.push_back(to_json(l));
    j["levels"] = rows;
    return j;
}

std::vector<PerturbedLevel> spectrum_from_json(const Json& j) {
    std::vector<PerturbedLevel> out;
    for (const auto& row : j.at("levels")) out.push_back(level_from_json(row));
    return out;
}

// Eigenfunctions --------------------------------------------------------------

std::string eigenfunction_csv(const Eigenfunction& f, std::size_t dim) {
    static const char* axes[] = {"x", "y", "z"};
    std::ostringstream out;
    for (std::size_t i = 0; i < dim; ++i) out << axes[i] << ',';
    out << "value,excluded\n";
    for (std::size_t n = 0; n < f.grid.size(); ++n) {
        for (std::size_t i = 0; i < dim; ++i) out << format_double(f.grid[n][i]) << ',';
        out << format_double(f.values[n]) << ',' << (f.excluded[n] ? 1 : 0) << '\n';
    }
    return out.str();
}

Json eigenfunction_json(const Eigenfunction& f, std::size_t dim) {
    Json pts = Json::array();
    for (std::size_t n = 0; n < f.grid.size(); ++n) {
        Json coords = Json::array();
        for (std::size_t i = 0; i < dim; ++i) coords.push_back(f.grid[n][i]);
        pts.push_back({{"x", coords}, {"value", json_number(f.values[n])}, {"excluded", f.excluded[n]}});
    }
    return Json{{"level", to_json(f.level)},
                {"energy", json_number(f.level.energy_star)},
                {"normalization", "L2"},
                {"norm_certificate",
                 {{"norm", json_number(f.certificate.norm)},
                  {"quadrature_error", json_number(f.certificate.quadrature_error)},
                  {"deviation", json_number(f.certificate.deviation)}}},
                {"max_pointwise_bound", json_number(f.max_bound)},
                {"points", pts}};
}

// Multi-center ----------------------------------------------------------------

std::string multi_csv(const std::vector<MultiLevel>& levels) {
    std::size_t m = 0;
    for (const auto& l : levels) m = std::max(m, l.coefficients.size());
    std::ostringstream out;
    out << "n,E_star,root_lo,root_hi,multiplicity,smallest_eigenvalue,separation,max_offdiag";
    for (std::size_t i = 0; i < m; ++i) out << ",c" << i;
    out << '\n';
    for (std::size_t n = 0; n < levels.size(); ++n) {
        const auto& l = levels[n];
        out << n << ',' << format_double(l.energy_star) << ',' << format_double(l.root_lo) << ','
            << format_double(l.root_hi) << ',' << l.multiplicity << ',' << format_double(l.smallest_eigenvalue) << ','
            << format_double(l.separation) << ',' << format_double(l.max_offdiag);
        for (std::size_t i = 0; i < m; ++i)
            out << ',' << (i < l.coefficients.size() ? format_double(l.coefficients[i]) : std::string());
        out << '\n';
    }
    return out.str();
}

Json multi_json(const RunConfig& config, const std::vector<MultiLevel>& levels) {
    Json j = run_header(config);
    Json rows = Json::array();
    for (const auto& l : levels)
        rows.push_back({{"E_star", json_number(l.energy_star)},
                        {"root_enclosure", {json_number(l.root_lo), json_number(l.root_hi)}},
                        {"coefficients", numbers(l.coefficients)},
                        {"multiplicity", l.multiplicity},
                        {"smallest_eigenvalue", json_number(l.smallest_eigenvalue)},
                        {"separation", json_number(l.separation)},
                        {"max_offdiag", json_number(l.max_offdiag)}});
    j["levels"] = rows;
    return j;
}

// Verification ----------------------------------------------------------------

Json to_json(const GramReport& r) {
    return Json{{"method", to_string(r.method)},
                {"size", r.size},
                {"max_offdiag", json_number(r.max_offdiag)},
                {"max_diag_dev", json_number(r.max_diag_dev)},
                {"certificate", json_number(r.certificate)},
                {"tolerance", json_number(r.tolerance)},
                {"pass", r.pass},
                {"matrix", numbers(r.matrix)}};
}

Json to_json(const CompletenessReport& r) {
    Json pts = Json::array();
    for (const auto& p : r.points)
        pts.push_back({{"K", p.K},
                       {"psi_residual", json_number(p.psi_residual)},
                       {"phi_residual", json_number(p.phi_residual)},
                       {"floor", json_number(p.floor)}});
    Json j{{"function", to_string(r.function)},
           {"quadrature_floor", json_number(r.quadrature_floor)},
           {"monotone", r.monotone},
           {"points", pts}};
    if (r.function == TestFunction::synthesized_psi) j["synthesized_index"] = r.synthesized_index;
    return j;
}

Json to_json(const OracleResult& r) {
    Json from_nodal = Json::array();
    for (bool b : r.from_nodal) from_nodal.push_back(b);
    return Json{{"N", r.N},
                {"inv_alpha", json_number(r.inv_alpha)},
                {"infinite_coupling", r.infinite_coupling},
                {"sigma", json_number(r.sigma)},
                {"eigenvalues", numbers(r.eigenvalues)},
                {"from_nodal", from_nodal},
                {"matched", numbers(r.matched)},
                {"deviations", numbers(r.deviations)},
                {"deviation_bounds", numbers(r.deviation_bounds)},
                {"pattern_matches", r.pattern_matches}};
}

Json to_json(const HeatKernelRow& r) {
    return Json{{"t", json_number(r.t)},
                {"partial_sum", json_number(r.partial_sum)},
                {"tail", json_number(r.tail)},
                {"theta", json_number(r.theta)},
                {"bound", json_number(r.bound)},
                {"holds", r.holds}};
}

Json to_json(const LaplaceMoment& m) {
    return Json{{"direct", json_number(m.direct)},
                {"direct_bound", json_number(m.direct_bound)},
                {"laplace", json_number(m.laplace)},
                {"laplace_error", json_number(m.laplace_error)},
                {"difference", json_number(m.difference)}};
}

Json to_json(const SchemeInvarianceReport& r) {
    return Json{{"original", to_json(r.original)},
                {"mapped", to_json(r.mapped)},
                {"level_differences", numbers(r.level_differences)},
                {"max_level_difference", json_number(r.max_level_difference)},
                {"level_tolerance", json_number(r.level_tolerance)},
                {"energies_checked", r.energies_checked},
                {"max_phi_excess", json_number(r.max_phi_excess)},
                {"pass", r.pass}};
}

bool VerificationReport::pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return !checks.empty();
}

Json to_json(const VerificationReport& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json j{{"name", c.name}, {"pass", c.pass}, {"tolerances", c.tolerances}, {"details", c.details}};
        if (!c.error.empty()) j["error"] = c.error;
        checks.push_back(j);
    }
    return Json{{"pass", r.pass()}, {"checks", checks}};
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace pointint
