#include "projlab/serialize.hpp"

#include <cmath>

#include "projlab/errors.hpp"

namespace projlab {

namespace {

using nlohmann::json;

json complex_to_json(const cxd z) { return json::array({z.real(), z.imag()}); }

cxd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw input_error("expected a complex number as [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json vector_to_json(std::span<const cxd> v) {
    json out = json::array();
    for (const cxd z : v) out.push_back(complex_to_json(z));
    return out;
}

std::vector<cxd> vector_from_json(const json& j) {
    if (!j.is_array()) throw input_error("expected a vector as a list of [re, im]");
    std::vector<cxd> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(complex_from_json(e));
    return out;
}

json basis_to_json(const std::vector<std::vector<cxd>>& basis) {
    json out = json::array();
    for (const auto& v : basis) out.push_back(vector_to_json(v));
    return out;
}

std::vector<std::vector<cxd>> basis_from_json(const json& j) {
    if (!j.is_array()) throw input_error("expected a basis as a list of vectors");
    std::vector<std::vector<cxd>> basis;
    basis.reserve(j.size());
    for (const auto& e : j) basis.push_back(vector_from_json(e));
    return basis;
}

} // namespace

nlohmann::json to_json(const ComplexMatrix& m) {
    json entries = json::array();
    for (const cxd z : m.flat()) entries.push_back(complex_to_json(z));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
        !j.contains("entries"))
        throw input_error("matrix needs rows, cols and entries");
    const auto rows = j["rows"].get<std::size_t>();
    const auto cols = j["cols"].get<std::size_t>();
    const auto& entries = j["entries"];
    if (!entries.is_array() || entries.size() != rows * cols)
        throw input_error("matrix entry count does not match rows*cols");
    ComplexMatrix m(rows, cols);
    std::size_t k = 0;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j2 = 0; j2 < cols; ++j2) m(i, j2) = complex_from_json(entries[k++]);
    return m;
}

nlohmann::json to_json(const SpaceDescriptor& s) {
    json out{{"dim", s.dim}};
    if (s.is_inf())
        out["p"] = "inf";
    else
        out["p"] = s.p;
    return out;
}

SpaceDescriptor space_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("p"))
        throw input_error("space needs dim and p");
    const auto dim = j["dim"].get<std::size_t>();
    if (j["p"].is_string()) {
        if (j["p"].get<std::string>() != "inf")
            throw input_error("space p must be a number or \"inf\"");
        return SpaceDescriptor::linf(dim);
    }
    if (!j["p"].is_number()) throw input_error("space p must be a number or \"inf\"");
    return SpaceDescriptor::lp(dim, j["p"].get<double>());
}

nlohmann::json to_json(const ProjectionSpec& spec) {
    json out;
    switch (spec.kind) {
    case ProjectionKind::hilbert_span:
        out["kind"] = "hilbert-span";
        out["range_basis"] = basis_to_json(spec.range_basis);
        break;
    case ProjectionKind::coordinate:
        out["kind"] = "coordinate";
        out["index_set"] = spec.index_set;
        break;
    case ProjectionKind::oblique:
        out["kind"] = "oblique";
        out["range_basis"] = basis_to_json(spec.range_basis);
        out["kernel_basis"] = basis_to_json(spec.kernel_basis);
        break;
    }
    return out;
}

ProjectionSpec projection_spec_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw input_error("projection spec needs a kind");
    const std::string kind = j["kind"].get<std::string>();
    ProjectionSpec spec;
    if (kind == "hilbert-span") {
        spec.kind = ProjectionKind::hilbert_span;
        if (!j.contains("range_basis"))
            throw input_error("hilbert-span projection needs range_basis");
        spec.range_basis = basis_from_json(j["range_basis"]);
    } else if (kind == "coordinate") {
        spec.kind = ProjectionKind::coordinate;
        if (!j.contains("index_set"))
            throw input_error("coordinate projection needs index_set");
        spec.index_set = j["index_set"].get<std::vector<std::size_t>>();
    } else if (kind == "oblique") {
        spec.kind = ProjectionKind::oblique;
        if (!j.contains("range_basis") || !j.contains("kernel_basis"))
            throw input_error("oblique projection needs range_basis and kernel_basis");
        spec.range_basis = basis_from_json(j["range_basis"]);
        spec.kernel_basis = basis_from_json(j["kernel_basis"]);
    } else {
        throw input_error("unknown projection kind: " + kind);
    }
    return spec;
}

nlohmann::json to_json(const SemigroupExpr& expr) {
    if (const auto* leaf = std::get_if<SemigroupExpr::Leaf>(&expr.node))
        return {{"leaf", leaf->index}};
    if (const auto* prod = std::get_if<SemigroupExpr::Product>(&expr.node)) {
        json factors = json::array();
        for (const auto& f : prod->factors) factors.push_back(to_json(f));
        return {{"product", std::move(factors)}};
    }
    json terms = json::array();
    for (const auto& [w, child] : std::get<SemigroupExpr::Convex>(expr.node).terms)
        terms.push_back(json::array({w, to_json(child)}));
    return {{"convex", std::move(terms)}};
}

SemigroupExpr expr_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw input_error("expression must be an object");
    if (j.contains("leaf")) return SemigroupExpr::leaf(j["leaf"].get<std::size_t>());
    if (j.contains("product")) {
        if (!j["product"].is_array()) throw input_error("product must be a list");
        std::vector<SemigroupExpr> factors;
        for (const auto& f : j["product"]) factors.push_back(expr_from_json(f));
        return SemigroupExpr::product(std::move(factors));
    }
    if (j.contains("convex")) {
        if (!j["convex"].is_array()) throw input_error("convex must be a list");
        std::vector<std::pair<double, SemigroupExpr>> terms;
        for (const auto& t : j["convex"]) {
            if (!t.is_array() || t.size() != 2 || !t[0].is_number())
                throw input_error("convex terms must be [weight, expression] pairs");
            terms.emplace_back(t[0].get<double>(), expr_from_json(t[1]));
        }
        return SemigroupExpr::convex(std::move(terms));
    }
    throw input_error("expression needs one of leaf, product, convex");
}

nlohmann::json to_json(const CheckResult& r) {
    return {{"name", r.name},       {"instance", r.instance}, {"verdict", r.verdict},
            {"lhs", r.lhs},         {"rhs", r.rhs},           {"slack", r.slack},
            {"notes", r.notes}};
}

nlohmann::json to_json(const NormEstimate& e) {
    return {{"value", e.value},
            {"exact", e.exact},
            {"iterations", e.iterations},
            {"seed", e.seed}};
}

nlohmann::json to_json(const GeometryEstimate& e) {
    return {{"epsilon", e.epsilon}, {"value", e.value},   {"exact", e.exact},
            {"certifies", e.certifies}, {"samples", e.samples}, {"seed", e.seed}};
}

nlohmann::json to_json(const OrthoReport& r) {
    return {{"ortho", r.ortho},
            {"idempotency_defect", r.idempotency_defect},
            {"norm", to_json(r.norm)},
            {"norm_certified_exact", r.norm_certified_exact}};
}

nlohmann::json to_json(const HalperinEstimate& e) {
    return {{"value", e.value},
            {"unbounded_evidence", e.unbounded_evidence},
            {"maximizer", vector_to_json(e.maximizer)},
            {"samples", e.samples},
            {"seed", e.seed}};
}

nlohmann::json to_json(const DInterval& i) {
    json out{{"empty", i.empty}, {"exact", i.exact}};
    if (!i.empty) {
        out["lo"] = i.lo;
        out["hi"] = i.hi;
    }
    return out;
}

nlohmann::json to_json(const ClosureReport& r) {
    json out{{"k_product", to_json(r.k_product)},
             {"d_product", to_json(r.d_product)},
             {"d_convex", to_json(r.d_convex)},
             {"k_a", to_json(r.ka)},
             {"k_b", to_json(r.kb)},
             {"k_ab", to_json(r.kab)}};
    if (r.r) out["r"] = *r.r;
    if (r.s) out["s"] = *r.s;
    return out;
}

nlohmann::json to_json(const ModulusEstimate& e) {
    return {{"epsilon", e.epsilon},
            {"variant", e.variant == PhiVariant::phi ? "phi" : "phi-tilde"},
            {"value", e.value},
            {"maximizer", vector_to_json(e.maximizer)},
            {"samples", e.samples},
            {"seed", e.seed}};
}

nlohmann::json to_json(const OmegaEstimate& e) {
    json values = json::array();
    for (const auto& v : e.values) values.push_back(to_json(v));
    return {{"values", std::move(values)},
            {"extrapolated", e.extrapolated},
            {"norm_below_one", e.norm_below_one}};
}

nlohmann::json to_json(const ChainReport& r) {
    json links = json::array();
    for (const auto& l : r.links) links.push_back(to_json(l));
    return {{"epsilon", r.epsilon},
            {"omega", r.omega_value},
            {"phi_tilde", r.phi_tilde_value},
            {"phi", r.phi_value},
            {"diff_norm", r.norm_value},
            {"diff_norm_exact", r.norm_exact},
            {"links", std::move(links)},
            {"passed", r.passed()}};
}

nlohmann::json to_json(const CompositionReport& r) {
    return {{"product", to_json(r.product)}, {"convex", to_json(r.convex)}};
}

nlohmann::json to_json(const SpectralReport& r) {
    json spectrum = json::array();
    for (std::size_t i = 0; i < r.spectrum.size(); ++i)
        spectrum.push_back({{"value", complex_to_json(r.spectrum[i])},
                            {"residual", r.residuals[i]}});
    json boundary = json::array();
    for (const cxd z : r.boundary) boundary.push_back(complex_to_json(z));
    json out{{"spectrum", std::move(spectrum)},
             {"boundary", std::move(boundary)},
             {"boundary_empty", r.boundary_empty},
             {"primitive", r.primitive},
             {"band", r.band}};
    out["amplitude"] = r.amplitude_a ? json(*r.amplitude_a) : json("empty");
    out["tau"] = r.tau ? json(*r.tau) : json("empty");
    return out;
}

nlohmann::json to_json(const IterationReport& r) {
    json out{{"diffs", r.diffs},
             {"power_norms", r.power_norms},
             {"converged", r.converged},
             {"n_stop", r.n_stop},
             {"limit_residual", r.limit_residual},
             {"cesaro_limit", to_json(r.cesaro_limit)},
             {"strict_contraction_exit", r.strict_contraction_exit},
             {"notes", r.notes}};
    if (r.limit) out["limit"] = to_json(*r.limit);
    return out;
}

nlohmann::json to_json(const RangeFormulaReport& r) {
    json notes = json::array();
    for (const auto& h : r.hypothesis_notes) notes.push_back(h);
    return {{"check", to_json(r.check)},
            {"fixed_dim", r.fixed_dim},
            {"intersection_dim", r.intersection_dim},
            {"angle", r.angle},
            {"hypothesis_notes", std::move(notes)}};
}

nlohmann::json to_json(const DecayReport& r) {
    json out{{"check", to_json(r.check)},
             {"tail_max", r.tail_max},
             {"window_begin", r.window_begin},
             {"window_end", r.window_end}};
    out["amplitude"] = r.amplitude ? json(*r.amplitude) : json("empty");
    if (r.bound) out["bound"] = *r.bound;
    return out;
}

} // namespace projlab
