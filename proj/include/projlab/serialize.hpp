#pragma once

#include <json.hpp>

#include "projlab/apostol.hpp"
#include "projlab/classes.hpp"
#include "projlab/complex_matrix.hpp"
#include "projlab/dynamics.hpp"
#include "projlab/geometry.hpp"
#include "projlab/linalg.hpp"
#include "projlab/projections.hpp"
#include "projlab/report.hpp"
#include "projlab/semigroup.hpp"
#include "projlab/space.hpp"
#include "projlab/spectral.hpp"

namespace projlab {

/// JSON wire formats (nlohmann keeps keys sorted, so dumps are byte-stable):
///   matrix      {"rows": r, "cols": c, "entries": [[re, im], ...]} row-major
///   space       {"dim": n, "p": number or "inf"}
///   projection  {"kind": "hilbert-span"|"coordinate"|"oblique",
///                "range_basis": [vector...], "kernel_basis": [vector...],
///                "index_set": [coordinates...]} (0-based coordinates)
///   expression  {"leaf": k} | {"product": [...]} | {"convex": [[w, e], ...]}
///               (1-based generator indices)
/// Reports never embed timestamps; re-running a seed reproduces the bytes.

nlohmann::json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SpaceDescriptor& s);
SpaceDescriptor space_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ProjectionSpec& spec);
ProjectionSpec projection_spec_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SemigroupExpr& expr);
SemigroupExpr expr_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CheckResult& r);
nlohmann::json to_json(const NormEstimate& e);
nlohmann::json to_json(const GeometryEstimate& e);
nlohmann::json to_json(const OrthoReport& r);
nlohmann::json to_json(const HalperinEstimate& e);
nlohmann::json to_json(const DInterval& i);
nlohmann::json to_json(const ClosureReport& r);
nlohmann::json to_json(const ModulusEstimate& e);
nlohmann::json to_json(const OmegaEstimate& e);
nlohmann::json to_json(const ChainReport& r);
nlohmann::json to_json(const CompositionReport& r);
nlohmann::json to_json(const SpectralReport& r);
nlohmann::json to_json(const IterationReport& r);
nlohmann::json to_json(const RangeFormulaReport& r);
nlohmann::json to_json(const DecayReport& r);

} // namespace projlab
