#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "pointint/numeric.hpp"

using namespace pointint;
using namespace pointint::cli;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "pointint_cli_test" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.yaml";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

struct Result {
    int code;
    std::string log;
    std::string err;
};

Result invoke(const std::string& cmd, Options o) {
    std::ostringstream log, err;
    const int code = run(cmd, o, log, err);
    return {code, log.str(), err.str()};
}

const char* kInterval = "model: {kind: interval, lengths: [pi]}\ncenter: [1]\nscheme: {alpha_R: 1, mu_sq: 1}\n"
                        "solver: {k_max: 6}\n";

}  // namespace

TEST_CASE("spectrum writes both formats and the JSON round trips", "[cli]") {
    const auto dir = scratch("spectrum");
    Options o;
    o.config_path = write_config(dir, kInterval).string();
    o.out_dir = (dir / "out").string();
    const auto r = invoke("spectrum", o);
    REQUIRE(r.code == ok);
    const auto levels = spectrum_from_json(Json::parse(slurp(dir / "out" / "spectrum.json")));
    REQUIRE(levels.size() == 7);
    CHECK(slurp(dir / "out" / "spectrum.csv") == spectrum_csv(levels));
    for (std::size_t k = 0; k < levels.size(); ++k) {
        CHECK(levels[k].energy_star < levels[k].base_energy);
        if (k > 0) CHECK(levels[k].energy_star > levels[k - 1].base_energy);
    }
}

TEST_CASE("CSV output does not depend on the thread count", "[cli]") {
    const auto dir = scratch("determinism");
    Options o;
    o.config_path = write_config(dir, std::string(kInterval) + "eigfun: {level: 2, grid_points: 257}\n").string();
    o.format = "csv";
    std::vector<std::string> outputs;
    for (unsigned threads : {1u, 3u, 1u}) {
        set_thread_count(threads);
        o.out_dir = (dir / ("t" + std::to_string(outputs.size()))).string();
        REQUIRE(invoke("spectrum", o).code == ok);
        REQUIRE(invoke("eigfun", o).code == ok);
        outputs.push_back(slurp(fs::path(*o.out_dir) / "spectrum.csv") + slurp(fs::path(*o.out_dir) / "eigfun_2.csv"));
        CHECK_FALSE(fs::exists(fs::path(*o.out_dir) / "spectrum.json"));
    }
    set_thread_count(1);
    CHECK(outputs[0] == outputs[1]);
    CHECK(outputs[0] == outputs[2]);
}

TEST_CASE("nodal centers give unchanged rows and eigenfunctions", "[cli]") {
    const auto dir = scratch("nodal");
    Options o;
    o.config_path = write_config(dir, "model: {kind: interval, lengths: [pi]}\ncenter: [pi/2]\n"
                                      "scheme: {alpha_R: 1, mu_sq: 1}\nsolver: {k_max: 4}\n"
                                      "eigfun: {level: 1, grid_points: 9}\n")
                        .string();
    o.out_dir = dir.string();
    REQUIRE(invoke("spectrum", o).code == ok);
    const auto levels = spectrum_from_json(Json::parse(slurp(dir / "spectrum.json")));
    CHECK(levels[1].status == LevelStatus::unchanged_nodal);
    CHECK(levels[1].energy_star == 4.0);
    CHECK(levels[3].status == LevelStatus::unchanged_nodal);
    REQUIRE(invoke("eigfun", o).code == ok);
    const Json j = Json::parse(slurp(dir / "eigfun_1.json"));
    for (const auto& p : j.at("points")) {
        const double x = p.at("x").at(0).get<double>();
        CHECK(std::abs(p.at("value").get<double>() - std::sqrt(2.0 / pi) * std::sin(2.0 * x)) <= 1e-14);
    }
    CHECK(j.at("norm_certificate").at("deviation").get<double>() <= 1e-8);
}

TEST_CASE("2D grids through the center flag the singular point", "[cli]") {
    const auto dir = scratch("excluded");
    Options o;
    o.config_path = write_config(dir, "model: {kind: rectangle, lengths: [1, 1]}\ncenter: [0.5, 0.5]\n"
                                      "scheme: {alpha_R: 1, mu_sq: 1}\nsolver: {k_max: 2}\n"
                                      "eigfun: {level: 0, grid_points: 5, norm_cells: 64}\n")
                        .string();
    o.out_dir = dir.string();
    REQUIRE(invoke("eigfun", o).code == ok);
    const std::string csv = slurp(dir / "eigfun_0.csv");
    CHECK_THAT(csv, ContainsSubstring("5.0000000000000000e-01,5.0000000000000000e-01,nan,1"));
}

TEST_CASE("usage and config errors exit with 2", "[cli]") {
    const auto dir = scratch("usage");
    Options o;
    o.config_path = write_config(dir, "model: {kind: interval, lengths: [pi]}\ncenter: [1]\nscheme: {alpha_R: 1}\n")
                        .string();
    auto r = invoke("spectrum", o);
    CHECK(r.code == usage);
    CHECK_THAT(r.err, ContainsSubstring("scheme.mu_sq"));

    o.config_path = write_config(dir, kInterval).string();
    o.out_dir = dir.string();
    r = invoke("multi", o);
    CHECK(r.code == usage);
    CHECK_THAT(r.err, ContainsSubstring("pointint spectrum"));
    o.level = 7;
    CHECK(invoke("eigfun", o).code == usage);
    o.level.reset();
    o.checks = {"gram", "sorcery"};
    CHECK(invoke("verify", o).code == usage);

    o.config_path = write_config(dir, "model: {kind: interval, lengths: [pi]}\ncenters: [[1], [1]]\n"
                                      "scheme: {alpha_R: 1, mu_sq: 1}\n")
                        .string();
    CHECK(invoke("multi", o).code == usage);
    o.config_path = (dir / "missing.yaml").string();
    CHECK(invoke("spectrum", o).code == usage);
}

TEST_CASE("solver resource limits exit with 1", "[cli]") {
    const auto dir = scratch("resource");
    Options o;
    o.config_path =
        write_config(dir, "model: {kind: interval, lengths: [pi]}\ncenter: [1]\nscheme: {alpha_R: 1, mu_sq: 1}\n"
                          "solver: {k_max: 6, max_cutoff: 20}\n")
            .string();
    o.out_dir = dir.string();
    const auto r = invoke("spectrum", o);
    CHECK(r.code == failure);
    CHECK_THAT(r.err, ContainsSubstring("max_cutoff"));
}

TEST_CASE("verify exit code follows the pass flags", "[cli]") {
    const auto dir = scratch("verify");
    Options o;
    o.out_dir = dir.string();
    o.config_path = write_config(dir, std::string(kInterval) + "verify: {checks: [scheme, krein, heat]}\n").string();
    auto r = invoke("verify", o);
    CHECK(r.code == ok);
    Json j = Json::parse(slurp(dir / "verify.json"));
    CHECK(j.at("pass") == true);
    CHECK(j.at("checks").size() == 3);
    for (const auto& c : j.at("checks")) CHECK(c.at("tolerances").size() > 0);

    // Too coarse for the quadrature Gram: the precision error surfaces as a failed check.
    o.config_path = write_config(dir, "model: {kind: rectangle, lengths: [1, sqrt(2)]}\ncenter: [0.37, 0.61]\n"
                                      "scheme: {alpha_R: 1, mu_sq: 1}\n"
                                      "verify: {checks: [gram], gram_levels: 4, quadrature_cells: 32}\n")
                        .string();
    r = invoke("verify", o);
    CHECK(r.code == failure);
    j = Json::parse(slurp(dir / "verify.json"));
    CHECK(j.at("pass") == false);
    CHECK(j.at("checks").at(0).contains("error"));
    CHECK_THAT(r.log, ContainsSubstring("FAIL gram"));
}

TEST_CASE("symmetric pair splits into even and odd combinations", "[cli]") {
    const auto dir = scratch("multi");
    Options o;
    o.out_dir = dir.string();
    o.config_path = write_config(dir, "model: {kind: interval, lengths: [pi]}\ncenters: [[1], [pi - 1]]\n"
                                      "scheme: {alpha_R: 1, mu_sq: 1}\nsolver: {k_max: 3}\n")
                        .string();
    REQUIRE(invoke("multi", o).code == ok);
    const Json j = Json::parse(slurp(dir / "multi.json"));
    REQUIRE(j.at("levels").size() >= 4);
    for (std::size_t n = 0; n < 4; ++n) {
        const auto& c = j.at("levels").at(n).at("coefficients");
        CHECK(std::abs(c.at(0).get<double>() - std::sqrt(0.5)) <= 1e-8);
        CHECK(std::abs(std::abs(c.at(1).get<double>()) - std::sqrt(0.5)) <= 1e-8);
        CHECK((c.at(1).get<double>() > 0) == (n % 2 == 0));
    }
}
