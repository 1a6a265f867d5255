#include <catch_amalgamated.hpp>

#include <cmath>

#include "pointint/config.hpp"
#include "pointint/errors.hpp"

using namespace pointint;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

namespace {

const char* kMinimal = R"(model: {kind: interval, lengths: [pi]}
center: [1]
scheme: {alpha_R: 1, mu_sq: 1}
)";

void expect_config_error(const std::string& text, const std::string& field, int line) {
    try {
        parse_config(text);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == field);
        if (line > 0) CHECK(e.line() == line);
    }
}

}  // namespace

TEST_CASE("expression evaluator", "[config]") {
    CHECK(evaluate_expression("pi/2") == pi / 2.0);
    CHECK(evaluate_expression("sqrt(2)") == std::sqrt(2.0));
    CHECK(evaluate_expression("1e-10") == 1e-10);
    CHECK(evaluate_expression("-2^2") == -4.0);
    CHECK(evaluate_expression("2^3^2") == 512.0);
    CHECK(evaluate_expression("(1 + 2) * 3 - 4 / 8") == 8.5);
    CHECK_THAT(evaluate_expression("exp(log(3)) + sin(0) + cos(0)"), WithinRel(4.0, 1e-15));
    CHECK_THROWS_AS(evaluate_expression("2 +"), DomainError);
    CHECK_THROWS_AS(evaluate_expression("foo(1)"), DomainError);
    CHECK_THROWS_AS(evaluate_expression("(1"), DomainError);
    CHECK_THROWS_AS(evaluate_expression("1/0"), DomainError);
    CHECK_THROWS_AS(evaluate_expression("3 4"), DomainError);
}

TEST_CASE("check names round trip", "[config]") {
    for (Check c : {Check::gram, Check::completeness, Check::oracle, Check::scheme, Check::krein, Check::heat,
                    Check::domain})
        CHECK(check_from_string(to_string(c)) == c);
    CHECK_THROWS_AS(check_from_string("nope"), DomainError);
}

TEST_CASE("minimal config fills defaults", "[config]") {
    const RunConfig c = parse_config(kMinimal);
    CHECK(c.model.kind() == ModelKind::interval);
    CHECK(c.model.length(0) == pi);
    REQUIRE(c.centers.size() == 1);
    CHECK(c.centers[0][0] == 1.0);
    REQUIRE(c.schemes.size() == 1);
    CHECK(c.schemes[0].alpha_R == 1.0);
    CHECK(c.k_max == 8);
    CHECK(c.verify.oracle_sizes.back() == 4096);
}

TEST_CASE("full config parses every block", "[config]") {
    const RunConfig c = parse_config(R"(model:
  kind: rectangle
  lengths: [1, sqrt(2)]
centers: [[0.3, 0.4], [0.7, 1.0]]
schemes:
  - {alpha_R: -2, mu_sq: 1}
  - {alpha_R: 0.5, mu_sq: 4}
solver: {k_max: 12, tol: 1e-9, max_cutoff: 1e8}
eigfun: {level: 2, grid_points: 65, norm_cells: 128}
verify:
  checks: [gram, heat]
  oracle_sizes: [256, 512]
  t_points: 5
output: {directory: results, formats: [json]}
)");
    CHECK(c.model.kind() == ModelKind::rectangle);
    CHECK(c.model.length(1) == std::sqrt(2.0));
    REQUIRE(c.centers.size() == 2);
    CHECK(c.schemes[1].mu_sq == 4.0);
    CHECK(c.k_max == 12);
    CHECK(c.solver.tol == 1e-9);
    CHECK(c.solver.max_cutoff == 1e8);
    CHECK(c.eigfun.grid_points == 65);
    CHECK(c.verify.checks == std::vector<Check>{Check::gram, Check::heat});
    CHECK(c.verify.oracle_sizes == std::vector<std::size_t>{256, 512});
    CHECK(c.output.directory == "results");
    CHECK(c.output.formats == std::vector<std::string>{"json"});
}

TEST_CASE("errors name the field and the line", "[config]") {
    expect_config_error("model: {kind: interval, lengths: [pi]}\ncenter: [1]\nscheme: {alpha_R: 1}\n", "scheme.mu_sq",
                        3);
    expect_config_error(std::string(kMinimal) + "solver: {k_max: 3, tolerance: 1}\n", "solver.tolerance", 4);
    expect_config_error(std::string(kMinimal) + "extra: 1\n", "extra", 4);
    expect_config_error("model: {kind: interval, lengths: [pi]}\ncenter: [4]\nscheme: {alpha_R: 1, mu_sq: 1}\n",
                        "center", 2);
    expect_config_error("model: {kind: disk, lengths: [1]}\ncenter: [0.5]\nscheme: {alpha_R: 1, mu_sq: 1}\n",
                        "model.kind", 1);
    expect_config_error("model: {kind: interval, lengths: [pi]}\ncenter: [1, 2]\nscheme: {alpha_R: 1, mu_sq: 1}\n",
                        "center", 2);
    expect_config_error("model: {kind: interval, lengths: [pi]}\ncenter: [1]\nscheme: {alpha_R: 1, mu_sq: -1}\n",
                        "scheme.mu_sq", 3);
    expect_config_error(std::string(kMinimal) + "solver: {k_max: 0}\n", "solver.k_max", 4);
    expect_config_error(std::string(kMinimal) + "solver: {tol: 1 +}\n", "solver.tol", 4);
    expect_config_error(std::string(kMinimal) + "verify: {checks: [gram, magic]}\n", "verify.checks", 4);
    expect_config_error(std::string(kMinimal) + "output: {formats: [xml]}\n", "output.formats", 4);
    expect_config_error("center: [1]\nscheme: {alpha_R: 1, mu_sq: 1}\n", "model", 0);
    expect_config_error("model: {kind: interval, lengths: [pi]}\nscheme: {alpha_R: 1, mu_sq: 1}\n", "center", 0);
    expect_config_error("model: {kind: interval, lengths: [pi]}\ncenters: [[1], [2], [1]]\nscheme: {alpha_R: 1, mu_sq: 1}\n",
                        "centers[2]", 2);
    expect_config_error("", "<root>", 0);
    CHECK_THROWS_AS(load_config("/nonexistent/run.yaml"), ConfigError);
}

TEST_CASE("error message carries the line", "[config]") {
    try {
        parse_config(std::string(kMinimal) + "bogus: 1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK_THAT(std::string(e.what()), ContainsSubstring("config:4") && ContainsSubstring("bogus"));
    }
}
