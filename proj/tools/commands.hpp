#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pointint/config.hpp"
#include "pointint/report_io.hpp"

namespace pointint::cli {

enum ExitCode : int { ok = 0, failure = 1, usage = 2 };

// Bad command-line usage that the config schema cannot catch (wrong arity, level out of range).
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<std::string> out_dir;  // overrides output.directory
    std::optional<std::string> format;   // csv or json; overrides output.formats
    std::optional<std::size_t> level;    // eigfun: overrides eigfun.level
    std::vector<std::string> checks;     // verify: overrides verify.checks
};

// Each command writes its files under the output directory and a short summary
// to `log`. They throw on errors; run() maps exceptions to exit codes.
int cmd_spectrum(const RunConfig& c, const Options& o, std::ostream& log);
int cmd_eigfun(const RunConfig& c, const Options& o, std::ostream& log);
int cmd_verify(const RunConfig& c, const Options& o, std::ostream& log);
int cmd_multi(const RunConfig& c, const Options& o, std::ostream& log);
int cmd_oracle(const RunConfig& c, const Options& o, std::ostream& log);

// One verification check, with failures and exceptions folded into the outcome.
CheckOutcome run_check(Check check, const RunConfig& c);

// Loads the config, dispatches, and converts exceptions to exit codes.
int run(const std::string& command, const Options& o, std::ostream& log, std::ostream& err);

// Default grid sizes per dimension.
std::size_t default_quadrature_cells(std::size_t dim);
std::size_t default_norm_cells(std::size_t dim);

}  // namespace pointint::cli
