#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pointint/config.hpp"
#include "pointint/spectrum_solver.hpp"
#include "pointint/verification.hpp"
#include "pointint/wavefunction.hpp"

namespace pointint {

using Json = nlohmann::json;

// 17 significant digits, scientific notation; inf and nan spelled out.
std::string format_double(double x);

// Non-finite doubles travel as the strings "inf", "-inf", "nan".
Json json_number(double x);
double number_from_json(const Json& j);

// Spectrum --------------------------------------------------------------------

std::string spectrum_csv(const std::vector<PerturbedLevel>& levels);
Json to_json(const PerturbedLevel& level);
PerturbedLevel level_from_json(const Json& j);
Json spectrum_json(const RunConfig& config, const std::vector<PerturbedLevel>& levels);
std::vector<PerturbedLevel> spectrum_from_json(const Json& j);

// Eigenfunction grids ---------------------------------------------------------

std::string eigenfunction_csv(const Eigenfunction& f, std::size_t dim);
Json eigenfunction_json(const Eigenfunction& f, std::size_t dim);

// Multi-center ----------------------------------------------------------------

std::string multi_csv(const std::vector<MultiLevel>& levels);
Json multi_json(const RunConfig& config, const std::vector<MultiLevel>& levels);

// Verification ----------------------------------------------------------------

Json to_json(const GramReport& r);
Json to_json(const CompletenessReport& r);
Json to_json(const OracleResult& r);
Json to_json(const HeatKernelRow& r);
Json to_json(const LaplaceMoment& m);
Json to_json(const SchemeInvarianceReport& r);
Json to_json(const Scheme& s);
Json to_json(const Point& p);

struct CheckOutcome {
    std::string name;
    bool pass = false;
    std::string error;  // set when the check threw instead of completing
    Json tolerances = Json::object();
    Json details = Json::object();
};

struct VerificationReport {
    std::vector<CheckOutcome> checks;
    bool pass() const;
};
Json to_json(const VerificationReport& r);

std::string dump_json(const Json& j);  // two-space indent, trailing newline

}  // namespace pointint
