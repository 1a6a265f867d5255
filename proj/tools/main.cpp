#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "pointint/numeric.hpp"

int main(int argc, char** argv) {
    using namespace pointint::cli;

    CLI::App app{"Point interactions on compact domains: spectra, eigenfunctions, verification"};
    app.require_subcommand(1);

    Options opt;
    unsigned threads = 0;
    std::string out, format;
    std::size_t level = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--out", out, "output directory (overrides output.directory)");
        sub->add_option("--threads", threads,
                        "worker threads; speed only, results are identical (env POINTINT_THREADS)");
        sub->add_option("--format", format, "write only this format")->check(CLI::IsMember({"csv", "json"}));
    };

    auto* spectrum = app.add_subcommand("spectrum", "perturbed levels E_k* with brackets and residuals");
    auto* eigfun = app.add_subcommand("eigfun", "sample one eigenfunction on a uniform grid");
    auto* verify = app.add_subcommand("verify", "run verification checks; exit 1 if any fails");
    auto* multi = app.add_subcommand("multi", "spectrum with two or more centers");
    auto* oracle = app.add_subcommand("oracle", "compare with the finite-rank matrix model");
    for (auto* s : {spectrum, eigfun, verify, multi, oracle}) add_common(s);
    auto* level_opt = eigfun->add_option("-k,--level", level, "level index (overrides eigfun.level)");
    verify->add_option("--checks", opt.checks, "gram completeness oracle scheme krein heat domain");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    if (threads == 0) {
        if (const char* env = std::getenv("POINTINT_THREADS")) threads = static_cast<unsigned>(std::atoi(env));
    }
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    pointint::set_thread_count(threads);

    if (!out.empty()) opt.out_dir = out;
    if (!format.empty()) opt.format = format;
    if (level_opt->count() > 0) opt.level = level;

    const std::string command = app.get_subcommands().front()->get_name();
    return run(command, opt, std::cout, std::cerr);
}
