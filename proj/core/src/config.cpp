#include "pointint/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pointint/errors.hpp"

namespace pointint {

// Expressions ------------------------------------------------------------------

namespace {

class ExprParser {
public:
    explicit ExprParser(const std::string& s) : s_(s) {}

    double parse() {
        const double v = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw DomainError("bad expression '" + s_ + "': " + why);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double expr() {
        double v = term();
        for (;;) {
            if (eat('+'))
                v += term();
            else if (eat('-'))
                v -= term();
            else
                return v;
        }
    }
    double term() {
        double v = unary();
        for (;;) {
            if (eat('*'))
                v *= unary();
            else if (eat('/'))
                v /= unary();
            else
                return v;
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        const double b = primary();
        if (eat('^')) return std::pow(b, unary());
        return b;
    }
    double primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end");
        if (eat('(')) {
            const double v = expr();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const auto [end, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
            if (ec != std::errc()) fail("bad number");
            pos_ = static_cast<std::size_t>(end - s_.data());
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "pi") return pi;
            if (!eat('(')) fail("unknown name '" + name + "'");
            const double x = expr();
            if (!eat(')')) fail("missing ')'");
            if (name == "sqrt") return std::sqrt(x);
            if (name == "sin") return std::sin(x);
            if (name == "cos") return std::cos(x);
            if (name == "exp") return std::exp(x);
            if (name == "log") return std::log(x);
            fail("unknown function '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

double evaluate_expression(const std::string& text) {
    const double v = ExprParser(text).parse();
    if (!std::isfinite(v)) throw DomainError("expression '" + text + "' is not finite");
    return v;
}

std::string to_string(Check c) {
    switch (c) {
        case Check::gram: return "gram";
        case Check::completeness: return "completeness";
        case Check::oracle: return "oracle";
        case Check::scheme: return "scheme";
        case Check::krein: return "krein";
        case Check::heat: return "heat";
        case Check::domain: return "domain";
    }
    return "unknown";
}

Check check_from_string(const std::string& s) {
    for (Check c : {Check::gram, Check::completeness, Check::oracle, Check::scheme, Check::krein, Check::heat,
                    Check::domain})
        if (to_string(c) == s) return c;
    throw DomainError("unknown check '" + s + "'");
}

// YAML --------------------------------------------------------------------------

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Block {
public:
    Block(YAML::Node node, std::string path, std::set<std::string> allowed)
        : node_(std::move(node)), path_(std::move(path)) {
        if (!node_.IsMap()) throw ConfigError(path_.empty() ? "<root>" : path_, line_of(node_), "expected a mapping");
        for (const auto& kv : node_) {
            const std::string key = kv.first.as<std::string>();
            if (!allowed.count(key)) throw ConfigError(join(path_, key), line_of(kv.first), "unknown key");
        }
    }

    bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }
    YAML::Node get(const std::string& key) const { return node_[key]; }
    std::string field(const std::string& key) const { return join(path_, key); }
    int line() const { return line_of(node_); }

    YAML::Node require(const std::string& key) const {
        if (!has(key)) throw ConfigError(field(key), line(), "missing required field");
        return node_[key];
    }

    double number(const std::string& key, double fallback) const {
        return has(key) ? to_number(node_[key], field(key)) : fallback;
    }
    double required_number(const std::string& key) const { return to_number(require(key), field(key)); }

    std::size_t count(const std::string& key, std::size_t fallback) const {
        return has(key) ? to_count(node_[key], field(key)) : fallback;
    }

    std::string text(const std::string& key, const std::string& fallback) const {
        if (!has(key)) return fallback;
        const YAML::Node n = node_[key];
        if (!n.IsScalar()) throw ConfigError(field(key), line_of(n), "expected a string");
        return n.as<std::string>();
    }

    static double to_number(const YAML::Node& n, const std::string& field) {
        if (!n.IsScalar()) throw ConfigError(field, line_of(n), "expected a number or expression");
        try {
            return evaluate_expression(n.as<std::string>());
        } catch (const DomainError& e) {
            throw ConfigError(field, line_of(n), e.what());
        }
    }

    static std::size_t to_count(const YAML::Node& n, const std::string& field) {
        const double v = to_number(n, field);
        if (v < 0.0 || v != std::floor(v) || v > 1e15)
            throw ConfigError(field, line_of(n), "expected a nonnegative integer");
        return static_cast<std::size_t>(v);
    }

private:
    YAML::Node node_;
    std::string path_;
};

std::vector<double> numbers(const YAML::Node& n, const std::string& field) {
    std::vector<double> out;
    if (n.IsScalar()) {
        out.push_back(Block::to_number(n, field));
        return out;
    }
    if (!n.IsSequence()) throw ConfigError(field, line_of(n), "expected a number or a list of numbers");
    for (std::size_t i = 0; i < n.size(); ++i)
        out.push_back(Block::to_number(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::string> strings(const YAML::Node& n, const std::string& field) {
    std::vector<std::string> out;
    if (n.IsScalar()) {
        out.push_back(n.as<std::string>());
        return out;
    }
    if (!n.IsSequence()) throw ConfigError(field, line_of(n), "expected a list");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (!n[i].IsScalar()) throw ConfigError(field + "[" + std::to_string(i) + "]", line_of(n[i]), "expected a string");
        out.push_back(n[i].as<std::string>());
    }
    return out;
}

Point to_point(const YAML::Node& n, const std::string& field, std::size_t dim) {
    const auto v = numbers(n, field);
    if (v.size() != dim)
        throw ConfigError(field, line_of(n), "expected " + std::to_string(dim) + " coordinates, got " +
                                                 std::to_string(v.size()));
    Point p;
    p.dim = dim;
    for (std::size_t i = 0; i < dim; ++i) p[i] = v[i];
    return p;
}

Scheme to_scheme(const YAML::Node& n, const std::string& field) {
    const Block b(n, field, {"alpha_R", "mu_sq"});
    Scheme s;
    s.alpha_R = b.required_number("alpha_R");
    s.mu_sq = b.required_number("mu_sq");
    if (s.alpha_R == 0.0) throw ConfigError(b.field("alpha_R"), line_of(b.get("alpha_R")), "must be nonzero");
    if (!(s.mu_sq > 0.0)) throw ConfigError(b.field("mu_sq"), line_of(b.get("mu_sq")), "must be positive");
    return s;
}

void positive(double v, const std::string& field, int line) {
    if (!(v > 0.0)) throw ConfigError(field, line, "must be positive");
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("<root>", e.mark.line + 1, e.msg);
    }
    if (!root || root.IsNull()) throw ConfigError("<root>", 0, "empty configuration");
    const Block top(root, "", {"model", "center", "centers", "scheme", "schemes", "solver", "eigfun", "verify", "output"});
    RunConfig cfg;
    cfg.source = source;

    {
        const Block m(top.require("model"), "model", {"kind", "lengths"});
        const YAML::Node kind = m.require("kind");
        ModelKind k;
        try {
            k = model_kind_from_string(kind.as<std::string>());
        } catch (const Error& e) {
            throw ConfigError("model.kind", line_of(kind), e.what());
        }
        const auto lengths = numbers(m.require("lengths"), "model.lengths");
        try {
            cfg.model = SpectralModel(k, lengths);
        } catch (const Error& e) {
            throw ConfigError("model.lengths", line_of(m.get("lengths")), e.what());
        }
    }
    const std::size_t dim = cfg.model.dim();

    if (top.has("center") == top.has("centers"))
        throw ConfigError("center", top.line(), "give exactly one of 'center' or 'centers'");
    if (top.has("center")) {
        cfg.centers.push_back(to_point(top.get("center"), "center", dim));
    } else {
        const YAML::Node cs = top.get("centers");
        if (!cs.IsSequence() || cs.size() == 0) throw ConfigError("centers", line_of(cs), "expected a nonempty list");
        for (std::size_t i = 0; i < cs.size(); ++i)
            cfg.centers.push_back(to_point(cs[i], "centers[" + std::to_string(i) + "]", dim));
    }
    for (std::size_t i = 0; i < cfg.centers.size(); ++i) {
        const YAML::Node n = top.has("center") ? top.get("center") : top.get("centers")[i];
        if (!cfg.model.contains(cfg.centers[i]))
            throw ConfigError(top.has("center") ? "center" : "centers[" + std::to_string(i) + "]", line_of(n),
                              "point lies outside the model domain");
        for (std::size_t j = 0; j < i; ++j)
            if (cfg.centers[j] == cfg.centers[i])
                throw ConfigError("centers[" + std::to_string(i) + "]", line_of(n),
                                  "coincides with centers[" + std::to_string(j) + "]");
    }

    if (top.has("scheme") == top.has("schemes"))
        throw ConfigError("scheme", top.line(), "give exactly one of 'scheme' or 'schemes'");
    if (top.has("scheme")) {
        cfg.schemes.assign(cfg.centers.size(), to_scheme(top.get("scheme"), "scheme"));
    } else {
        const YAML::Node ss = top.get("schemes");
        if (!ss.IsSequence() || ss.size() != cfg.centers.size())
            throw ConfigError("schemes", line_of(ss), "expected one scheme per center");
        for (std::size_t i = 0; i < ss.size(); ++i)
            cfg.schemes.push_back(to_scheme(ss[i], "schemes[" + std::to_string(i) + "]"));
    }

    if (top.has("solver")) {
        const Block s(top.get("solver"), "solver", {"k_max", "tol", "max_cutoff", "ground_floor", "max_iterations"});
        cfg.k_max = s.count("k_max", cfg.k_max);
        cfg.solver.tol = s.number("tol", cfg.solver.tol);
        cfg.solver.max_cutoff = s.number("max_cutoff", cfg.solver.max_cutoff);
        cfg.solver.ground_floor = s.number("ground_floor", cfg.solver.ground_floor);
        cfg.solver.max_iterations = s.count("max_iterations", cfg.solver.max_iterations);
        if (cfg.k_max < 1) throw ConfigError("solver.k_max", line_of(s.get("k_max")), "must be at least 1");
        positive(cfg.solver.tol, "solver.tol", s.line());
        positive(cfg.solver.max_cutoff, "solver.max_cutoff", s.line());
        positive(cfg.solver.ground_floor, "solver.ground_floor", s.line());
    }

    if (top.has("eigfun")) {
        const Block e(top.get("eigfun"), "eigfun", {"level", "grid_points", "norm_cells"});
        cfg.eigfun.level = e.count("level", cfg.eigfun.level);
        cfg.eigfun.grid_points = e.count("grid_points", cfg.eigfun.grid_points);
        cfg.eigfun.norm_cells = e.count("norm_cells", cfg.eigfun.norm_cells);
        if (cfg.eigfun.grid_points < 2) throw ConfigError("eigfun.grid_points", e.line(), "must be at least 2");
    }

    if (top.has("verify")) {
        auto& v = cfg.verify;
        const Block b(top.get("verify"), "verify",
                      {"checks", "gram_levels", "gram_tol", "mode_gram_tol", "quadrature_cells", "completeness_k",
                       "completeness_tol", "oracle_sizes", "oracle_tol", "new_mu_sq", "scheme_points",
                       "resolvent_samples", "resolvent_levels", "resolvent_tol", "residue_tol", "t_min", "t_max",
                       "t_points", "domain_levels", "seed"});
        if (b.has("checks")) {
            v.checks.clear();
            const YAML::Node cn = b.get("checks");
            for (const auto& name : strings(cn, "verify.checks")) {
                try {
                    v.checks.push_back(check_from_string(name));
                } catch (const DomainError& e) {
                    throw ConfigError("verify.checks", line_of(cn), e.what());
                }
            }
        }
        v.gram_levels = b.count("gram_levels", v.gram_levels);
        v.gram_tol = b.number("gram_tol", v.gram_tol);
        v.mode_gram_tol = b.number("mode_gram_tol", v.mode_gram_tol);
        v.quadrature_cells = b.count("quadrature_cells", v.quadrature_cells);
        v.completeness_k = b.count("completeness_k", v.completeness_k);
        v.completeness_tol = b.number("completeness_tol", v.completeness_tol);
        if (b.has("oracle_sizes")) {
            v.oracle_sizes.clear();
            const YAML::Node on = b.get("oracle_sizes");
            for (double x : numbers(on, "verify.oracle_sizes")) {
                if (x < 2.0 || x != std::floor(x))
                    throw ConfigError("verify.oracle_sizes", line_of(on), "sizes must be integers >= 2");
                v.oracle_sizes.push_back(static_cast<std::size_t>(x));
            }
        }
        v.oracle_tol = b.number("oracle_tol", v.oracle_tol);
        v.new_mu_sq = b.number("new_mu_sq", v.new_mu_sq);
        v.scheme_points = b.count("scheme_points", v.scheme_points);
        v.resolvent_samples = b.count("resolvent_samples", v.resolvent_samples);
        v.resolvent_levels = b.count("resolvent_levels", v.resolvent_levels);
        v.resolvent_tol = b.number("resolvent_tol", v.resolvent_tol);
        v.residue_tol = b.number("residue_tol", v.residue_tol);
        v.t_min = b.number("t_min", v.t_min);
        v.t_max = b.number("t_max", v.t_max);
        v.t_points = b.count("t_points", v.t_points);
        v.domain_levels = b.count("domain_levels", v.domain_levels);
        v.seed = b.count("seed", v.seed);
        for (auto [name, val] : {std::pair{"gram_tol", v.gram_tol}, {"mode_gram_tol", v.mode_gram_tol},
                                 {"completeness_tol", v.completeness_tol}, {"oracle_tol", v.oracle_tol},
                                 {"new_mu_sq", v.new_mu_sq}, {"resolvent_tol", v.resolvent_tol},
                                 {"residue_tol", v.residue_tol}, {"t_min", v.t_min}})
            positive(val, b.field(name), b.has(name) ? line_of(b.get(name)) : b.line());
        if (!(v.t_max > v.t_min)) throw ConfigError("verify.t_max", b.line(), "must exceed t_min");
        if (v.t_points < 2) throw ConfigError("verify.t_points", b.line(), "must be at least 2");
        if (v.gram_levels < 2) throw ConfigError("verify.gram_levels", b.line(), "must be at least 2");
    }

    if (top.has("output")) {
        const Block o(top.get("output"), "output", {"directory", "formats"});
        cfg.output.directory = o.text("directory", cfg.output.directory);
        if (o.has("formats")) {
            const YAML::Node fn = o.get("formats");
            cfg.output.formats = strings(fn, "output.formats");
            for (const auto& f : cfg.output.formats)
                if (f != "csv" && f != "json")
                    throw ConfigError("output.formats", line_of(fn), "unknown format '" + f + "' (csv or json)");
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", 0, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace pointint
