#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "projlab/complex_matrix.hpp"
#include "projlab/projections.hpp"
#include "projlab/report.hpp"
#include "projlab/semigroup.hpp"
#include "projlab/space.hpp"

namespace projlab {

/// One named check with free-form parameters (operand references, epsilons,
/// expectations). Unknown names or bad references are config errors.
struct CheckSpec {
    std::string name;
    nlohmann::json params = nlohmann::json::object();
};

/// A batch run: the ambient space, generators (projection recipes or
/// explicit matrices), semigroup expressions over them, and the checks to
/// execute. All randomness flows from `seed` through named substreams, one
/// per check ordinal, so re-running a config reproduces every report byte
/// for byte.
struct RunConfig {
    SpaceDescriptor space;
    std::vector<std::variant<ProjectionSpec, ComplexMatrix>> generators;
    std::vector<SemigroupExpr> expressions;
    std::vector<CheckSpec> checks;
    std::uint64_t seed = 0;
    std::string output = "projlab-out";
};

RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);

/// Executes the checks in config order; writes one JSON report per check
/// plus summary.csv (check,instance,verdict,lhs,rhs,slack,runtime_ms; the
/// runtime column lives only in the CSV so JSON stays reproducible).
/// Returns the process exit code: 0 all non-fail, 1 any check failed,
/// 3 output I/O failure. (Config parse problems are reported before run()
/// by config_from_json / build-time validation, exit 2 in the CLI.)
int run(const RunConfig& config);

/// Builtin scenario configs reproducing the named results end to end.
/// Names: counterexample, halperin, lapidus, decay-bounds, moduli-chain,
/// range-formula.
std::vector<std::string> scenario_names();
RunConfig scenario(const std::string& name, std::uint64_t seed,
                   const std::string& output_dir);

} // namespace projlab
