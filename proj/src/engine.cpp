#include "projlab/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "projlab/apostol.hpp"
#include "projlab/classes.hpp"
#include "projlab/dynamics.hpp"
#include "projlab/errors.hpp"
#include "projlab/geometry.hpp"
#include "projlab/linalg.hpp"
#include "projlab/rng.hpp"
#include "projlab/sampling.hpp"
#include "projlab/serialize.hpp"
#include "projlab/spectral.hpp"

namespace projlab {
namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

// ---------------------------------------------------------------------------
// Context and operand plumbing

struct EngineContext {
    const RunConfig* config = nullptr;
    SpaceDescriptor space;
    std::vector<ComplexMatrix> gens;
};

struct Operand {
    ComplexMatrix value;
    std::string label;
};

std::size_t index_param(const json& params, const char* key, std::size_t count,
                        const std::string& check, const char* what) {
    if (!params.contains(key))
        throw input_error("check \"" + check + "\": missing \"" + std::string(key) + "\"");
    const json& v = params.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1 ||
        v.get<std::uint64_t>() > count)
        throw input_error("check \"" + check + "\": \"" + std::string(key) +
                          "\" must be a 1-based index of an existing " + what +
                          " (have " + std::to_string(count) + ")");
    return v.get<std::size_t>();
}

Operand resolve_operand(const EngineContext& ctx, const json& params,
                        const std::string& check) {
    if (params.contains("expression")) {
        const std::size_t i = index_param(params, "expression",
                                          ctx.config->expressions.size(), check,
                                          "expression");
        return {evaluate(ctx.config->expressions[i - 1], ctx.gens),
                "expression " + std::to_string(i)};
    }
    if (params.contains("generator")) {
        const std::size_t k =
            index_param(params, "generator", ctx.gens.size(), check, "generator");
        return {ctx.gens[k - 1], "generator " + std::to_string(k)};
    }
    throw input_error("check \"" + check +
                      "\": needs an \"expression\" or \"generator\" operand");
}

SamplingConfig sampling_from(const json& params, std::uint64_t seed) {
    SamplingConfig cfg;
    cfg.seed = seed;
    cfg.samples = params.value("samples", cfg.samples);
    cfg.ascent_iterations = params.value("ascent", cfg.ascent_iterations);
    cfg.slack = params.value("slack", cfg.slack);
    return cfg;
}

double epsilon_param(const json& params, const std::string& check) {
    if (!params.contains("epsilon") || !params.at("epsilon").is_number())
        throw input_error("check \"" + check + "\": missing numeric \"epsilon\"");
    return params.at("epsilon").get<double>();
}

std::string prefixed(const std::string& label, const std::string& instance) {
    if (instance.empty()) return label;
    return label + "; " + instance;
}

double max_entry_abs(const ComplexMatrix& m) {
    double best = 0.0;
    for (const cxd& z : m.flat()) best = std::max(best, std::abs(z));
    return best;
}

// ---------------------------------------------------------------------------
// Check handlers. Each returns the summary rows plus a detail document that
// goes into the per-check JSON report verbatim.

struct CheckRun {
    std::vector<CheckResult> rows;
    json detail = json::object();
};

CheckRun run_orthoprojection(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "orthoprojection");
    const OrthoReport rep = is_orthoprojection(op.value, ctx.space);
    CheckResult row;
    row.name = "orthoprojection";
    row.instance = op.label;
    row.verdict = rep.ortho ? "pass" : "fail";
    row.lhs = rep.idempotency_defect;
    row.rhs = 1e-10;
    row.notes = "norm " + fmt(rep.norm.value) +
                (rep.norm_certified_exact ? " (exact)" : " (not falsified)");
    CheckRun out;
    out.rows.push_back(std::move(row));
    out.detail = to_json(rep);
    return out;
}

CheckRun run_hermitian_defect(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "hermitian-defect");
    const double max_defect = p.value("max_defect", 1e-8);
    const std::vector<double> grid = default_hermitian_grid();
    const double defect = hermitian_defect(op.value, ctx.space, grid);
    CheckRun out;
    out.rows.push_back(CheckResult::compare("hermitian-defect", op.label, defect,
                                            max_defect, 0.0,
                                            "grid of " + std::to_string(grid.size()) +
                                                " points in [-pi, pi]"));
    out.detail = json{{"defect", defect}, {"grid_points", grid.size()}};
    return out;
}

CheckRun run_power_alternation(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "power-alternation");
    const std::size_t n_max = p.value("n_max", std::size_t{50});
    const double tol = p.value("tol", 1e-12);
    ComplexMatrix pw = op.value; // T^n, starting at n = 1
    std::vector<double> diffs;
    double period_dev = 0.0;
    double diff_dev = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const ComplexMatrix nxt = compose(pw, op.value);
        const ComplexMatrix nn = compose(nxt, op.value);
        diffs.push_back(operator_norm(pw - nxt, ctx.space).value);
        period_dev = std::max(period_dev, max_entry_abs(nn - pw));
        diff_dev = std::max(diff_dev, std::abs(diffs.back() - diffs.front()));
        pw = nxt;
    }
    CheckRun out;
    out.rows.push_back(CheckResult::compare(
        "power-period", op.label, period_dev, tol, 0.0,
        "max entry deviation of T^(n+2) from T^n, n <= " + std::to_string(n_max)));
    out.rows.push_back(CheckResult::compare(
        "power-diff-constant", op.label, diff_dev, tol, 0.0,
        "diff norm stays at " + fmt(diffs.empty() ? 0.0 : diffs.front())));
    out.detail = json{{"diffs", diffs},
                      {"period_deviation", period_dev},
                      {"diff_deviation", diff_dev}};
    return out;
}

CheckRun run_spectral(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "spectral");
    const double band = p.value("band", 1e-8);
    const double tol = p.value("tol", 1e-9);
    const SpectralReport rep = spectral_report(op.value, band);
    CheckRun out;
    out.detail = to_json(rep);

    bool expectation = false;
    if (p.contains("expect_amplitude")) {
        expectation = true;
        const double want = p.at("expect_amplitude").get<double>();
        if (rep.amplitude_a) {
            out.rows.push_back(CheckResult::compare(
                "spectral-amplitude", op.label, std::abs(*rep.amplitude_a - want), tol,
                0.0, "a_T = " + fmt(*rep.amplitude_a) + ", expected " + fmt(want)));
        } else {
            CheckResult row;
            row.name = "spectral-amplitude";
            row.instance = op.label;
            row.verdict = "fail";
            row.rhs = want;
            row.notes = "boundary spectrum empty, amplitude undefined";
            out.rows.push_back(std::move(row));
        }
    }
    if (p.contains("expect_primitive")) {
        expectation = true;
        const bool want = p.at("expect_primitive").get<bool>();
        CheckResult row;
        row.name = "spectral-primitive";
        row.instance = op.label;
        row.lhs = rep.primitive ? 1.0 : 0.0;
        row.rhs = want ? 1.0 : 0.0;
        row.verdict = rep.primitive == want ? "pass" : "fail";
        row.notes = std::string("primitive = ") + (rep.primitive ? "true" : "false");
        out.rows.push_back(std::move(row));
    }
    if (p.contains("expect_boundary")) {
        expectation = true;
        const auto& want = p.at("expect_boundary");
        double worst = 0.0;
        for (const auto& entry : want) {
            const cxd target{entry.at(0).get<double>(), entry.at(1).get<double>()};
            double nearest = std::numeric_limits<double>::infinity();
            for (const cxd& z : rep.boundary) nearest = std::min(nearest, std::abs(z - target));
            worst = std::max(worst, nearest);
        }
        std::string notes = std::to_string(rep.boundary.size()) +
                            " boundary eigenvalue(s), expected " +
                            std::to_string(want.size());
        CheckResult row = CheckResult::compare("spectral-boundary", op.label, worst, tol,
                                               0.0, notes);
        if (rep.boundary.size() != want.size()) row.verdict = "fail";
        out.rows.push_back(std::move(row));
    }
    if (!expectation) {
        if (rep.boundary_empty) {
            out.rows.push_back(CheckResult::vacuous(
                "spectral", op.label,
                "empty boundary spectrum: some power is a strict contraction"));
        } else {
            out.rows.push_back(CheckResult::compare("spectral-amplitude-le-two", op.label,
                                                    *rep.amplitude_a, 2.0, 1e-9,
                                                    "a_T for a contraction is at most 2"));
        }
    }
    return out;
}

CheckRun run_iterate(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "iterate");
    const std::size_t n_max = p.value("n_max", std::size_t{100000});
    const double tol = p.value("tol", 1e-10);
    const IterationReport rep = iterate(op.value, ctx.space, n_max, tol);
    CheckRun out;
    out.detail = to_json(rep);

    const std::string status =
        std::string(rep.converged ? "converged" : "no convergence") + " at n=" +
        std::to_string(rep.n_stop) +
        (rep.strict_contraction_exit ? " (strict-contraction exit)" : "");
    if (p.contains("expect")) {
        const std::string want = p.at("expect").get<std::string>();
        if (want != "converge" && want != "diverge")
            throw input_error("check \"iterate\": expect must be \"converge\" or \"diverge\"");
        CheckResult row;
        row.name = "iterate-" + want;
        row.instance = op.label;
        row.lhs = rep.converged ? 1.0 : 0.0;
        row.rhs = want == "converge" ? 1.0 : 0.0;
        row.verdict = (rep.converged == (want == "converge")) ? "pass" : "fail";
        row.notes = status;
        out.rows.push_back(std::move(row));
    } else {
        CheckResult row;
        row.name = "iterate";
        row.instance = op.label;
        row.notes = status;
        out.rows.push_back(std::move(row));
    }

    if (p.contains("limit")) {
        const std::string want = p.at("limit").get<std::string>();
        const double limit_tol = p.value("limit_tol", 1e-6);
        if (!rep.limit) {
            CheckResult row;
            row.name = "iterate-limit";
            row.instance = op.label;
            row.verdict = "fail";
            row.notes = "no limit available: " + status;
            out.rows.push_back(std::move(row));
        } else if (want == "zero") {
            out.rows.push_back(CheckResult::compare(
                "iterate-limit-zero", op.label,
                operator_norm(*rep.limit, ctx.space).value, limit_tol, 0.0));
        } else if (want == "ergodic") {
            const ComplexMatrix e = ergodic_projection(op.value);
            out.rows.push_back(CheckResult::compare(
                "iterate-limit-ergodic", op.label,
                operator_norm(*rep.limit - e, ctx.space).value, limit_tol, 0.0,
                "limit vs Ker(I-T)-along-Ran(I-T) projection"));
        } else {
            throw input_error("check \"iterate\": limit must be \"zero\" or \"ergodic\"");
        }
    }
    if (p.contains("cesaro")) {
        if (p.at("cesaro").get<std::string>() != "ergodic")
            throw input_error("check \"iterate\": cesaro must be \"ergodic\"");
        const double cesaro_tol = p.value("cesaro_tol", 1e-3);
        const ComplexMatrix e = ergodic_projection(op.value);
        out.rows.push_back(CheckResult::compare(
            "iterate-cesaro", op.label, operator_norm(rep.cesaro_limit - e, ctx.space).value,
            cesaro_tol, 0.0,
            "Cesaro mean over n=" + std::to_string(rep.n_stop) + " iterates"));
    }
    return out;
}

CheckRun run_range_formula(EngineContext& ctx, const json& p, std::uint64_t) {
    const std::size_t i = index_param(p, "expression", ctx.config->expressions.size(),
                                      "range-formula", "expression");
    const double tol = p.value("tol", 1e-6);
    const RangeFormulaReport rep = check_range_formula(
        ctx.config->expressions[i - 1], ctx.gens, ctx.space, tol);
    CheckRun out;
    out.rows.push_back(rep.check);
    out.rows.back().instance = prefixed("expression " + std::to_string(i),
                                        rep.check.instance);
    out.detail = to_json(rep);
    return out;
}

CheckRun run_modulus_chain(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "modulus-chain");
    const double eps = epsilon_param(p, "modulus-chain");
    const ChainReport rep =
        check_modulus_chain(op.value, ctx.space, eps, sampling_from(p, seed));
    CheckRun out;
    for (const CheckResult& link : rep.links) {
        out.rows.push_back(link);
        out.rows.back().instance = prefixed(op.label, link.instance);
    }
    out.detail = to_json(rep);
    return out;
}

CheckRun run_composition_bounds(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const std::size_t a = index_param(p, "a", ctx.gens.size(), "composition-bounds",
                                      "generator");
    const std::size_t b = index_param(p, "b", ctx.gens.size(), "composition-bounds",
                                      "generator");
    const double eps = epsilon_param(p, "composition-bounds");
    const std::vector<double> weights =
        p.value("weights", std::vector<double>{0.5, 0.5});
    const CompositionReport rep =
        check_composition_bounds(ctx.gens[a - 1], ctx.gens[b - 1], weights, ctx.space,
                                 eps, sampling_from(p, seed));
    const std::string label =
        "generators " + std::to_string(a) + "," + std::to_string(b);
    CheckRun out;
    out.rows.push_back(rep.product);
    out.rows.back().instance = prefixed(label, rep.product.instance);
    out.rows.push_back(rep.convex);
    out.rows.back().instance = prefixed(label, rep.convex.instance);
    out.detail = json{{"product", to_json(rep.product)}, {"convex", to_json(rep.convex)}};
    return out;
}

CheckRun run_beta_bound(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "beta-bound");
    const double eps = epsilon_param(p, "beta-bound");
    CheckRun out;
    out.rows.push_back(
        check_beta_bound(op.value, ctx.space, eps, sampling_from(p, seed)));
    out.rows.back().instance = prefixed(op.label, out.rows.back().instance);
    return out;
}

CheckRun run_decay_bound(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "decay-bound");
    const std::size_t n_max = p.value("n_max", std::size_t{1000});
    const DecayReport rep =
        check_decay_bound(op.value, ctx.space, n_max, sampling_from(p, seed));
    CheckRun out;
    out.rows.push_back(rep.check);
    out.rows.back().instance = prefixed(op.label, rep.check.instance);
    out.detail = to_json(rep);
    return out;
}

CheckRun run_amplitude_omega(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "amplitude-omega");
    CheckRun out;
    out.rows.push_back(
        check_amplitude_omega(op.value, ctx.space, sampling_from(p, seed)));
    out.rows.back().instance = prefixed(op.label, out.rows.back().instance);
    return out;
}

CheckRun run_closure(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const std::size_t a = index_param(p, "a", ctx.gens.size(), "closure", "generator");
    const std::size_t b = index_param(p, "b", ctx.gens.size(), "closure", "generator");
    const double alpha = p.value("alpha", 0.5);
    const ClosureReport rep = closure_report(ctx.gens[a - 1], ctx.gens[b - 1], alpha,
                                             ctx.space, sampling_from(p, seed));
    const std::string label =
        "generators " + std::to_string(a) + "," + std::to_string(b);
    CheckRun out;
    for (const CheckResult* r : {&rep.k_product, &rep.d_product, &rep.d_convex}) {
        out.rows.push_back(*r);
        out.rows.back().instance = prefixed(label, r->instance);
    }
    out.detail = to_json(rep);
    return out;
}

CheckRun run_halperin(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "halperin");
    const HalperinEstimate est =
        halperin_constant(op.value, ctx.space, sampling_from(p, seed));
    CheckRun out;
    out.detail = to_json(est);
    const std::string summary = "K estimate " + fmt(est.value) +
                                (est.unbounded_evidence ? " (unbounded evidence)" : "");
    if (p.contains("expect_unbounded")) {
        const bool want = p.at("expect_unbounded").get<bool>();
        CheckResult row;
        row.name = "halperin-unbounded";
        row.instance = op.label;
        row.lhs = est.unbounded_evidence ? 1.0 : 0.0;
        row.rhs = want ? 1.0 : 0.0;
        row.verdict = est.unbounded_evidence == want ? "pass" : "fail";
        row.notes = summary;
        out.rows.push_back(std::move(row));
    }
    if (p.contains("expect_lo"))
        out.rows.push_back(CheckResult::compare("halperin-lower", op.label,
                                                p.at("expect_lo").get<double>(),
                                                est.value, 0.0, summary));
    if (p.contains("expect_hi"))
        out.rows.push_back(CheckResult::compare("halperin-upper", op.label, est.value,
                                                p.at("expect_hi").get<double>(), 0.0,
                                                summary));
    if (out.rows.empty()) {
        CheckResult row;
        row.name = "halperin";
        row.instance = op.label;
        row.lhs = est.value;
        row.rhs = est.value;
        row.notes = summary + " (informational)";
        out.rows.push_back(std::move(row));
    }
    return out;
}

CheckRun run_d_interval(EngineContext& ctx, const json& p, std::uint64_t) {
    const Operand op = resolve_operand(ctx, p, "d-interval");
    const DInterval iv = d_radius_interval(op.value, ctx.space);
    const std::string summary =
        iv.empty ? "R(T) empty"
                 : "R(T) ~ [" + fmt(iv.lo) + ", " + fmt(iv.hi) + "]" +
                       (iv.exact ? "" : " (estimated norms)");
    CheckRun out;
    out.detail = to_json(iv);
    if (p.contains("expect_contains")) {
        const double r = p.at("expect_contains").get<double>();
        // Endpoints come from a bisection stopped at 1e-9 that only keeps
        // certified-inside points, so containment needs endpoint slack.
        const double tol = p.value("tol", 1e-6);
        const double outside =
            iv.empty ? std::numeric_limits<double>::infinity()
                     : std::max({0.0, iv.lo - r, r - iv.hi});
        out.rows.push_back(CheckResult::compare("d-interval-contains", op.label,
                                                outside, tol, 0.0,
                                                summary + "; want r = " + fmt(r)));
    } else if (p.value("expect_empty", false)) {
        CheckResult row;
        row.name = "d-interval-empty";
        row.instance = op.label;
        row.verdict = iv.empty ? "pass" : "fail";
        row.notes = summary;
        out.rows.push_back(std::move(row));
    } else {
        CheckResult row;
        row.name = "d-interval";
        row.instance = op.label;
        row.notes = summary + " (informational)";
        out.rows.push_back(std::move(row));
    }
    return out;
}

CheckRun run_wprime(EngineContext& ctx, const json& p, std::uint64_t seed) {
    const Operand op = resolve_operand(ctx, p, "wprime");
    const double max_defect = p.value("max_defect", 1e-6);
    const double defect = wprime_defect(op.value, ctx.space, sampling_from(p, seed));
    CheckRun out;
    out.rows.push_back(CheckResult::compare(
        "wprime", op.label, defect, max_defect, 0.0,
        "max ||Tx - x|| over unit vectors with ||Tx|| = ||x||"));
    out.detail = json{{"defect", defect}};
    return out;
}

CheckRun run_geometry(EngineContext& ctx, const json& p, std::uint64_t seed,
                      bool is_delta) {
    const char* name = is_delta ? "delta-modulus" : "beta-modulus";
    const double eps = epsilon_param(p, name);
    const GeometryEstimate est = is_delta ? delta_modulus(ctx.space, eps, seed)
                                          : beta_modulus(ctx.space, eps, seed);
    CheckRun out;
    out.detail = to_json(est);
    if (p.contains("expect_le"))
        out.rows.push_back(CheckResult::compare(name, "value <= expect_le", est.value,
                                                p.at("expect_le").get<double>(),
                                                p.value("tol", 0.0)));
    if (p.contains("expect_ge"))
        out.rows.push_back(CheckResult::compare(name, "value >= expect_ge",
                                                p.at("expect_ge").get<double>(),
                                                est.value, p.value("tol", 0.0)));
    if (out.rows.empty()) {
        CheckResult row;
        row.name = name;
        row.instance = "eps=" + fmt(eps);
        row.lhs = est.value;
        row.rhs = est.value;
        row.notes = est.certifies + " (informational)";
        out.rows.push_back(std::move(row));
    }
    return out;
}

CheckRun run_delta_modulus(EngineContext& ctx, const json& p, std::uint64_t seed) {
    return run_geometry(ctx, p, seed, true);
}
CheckRun run_beta_modulus(EngineContext& ctx, const json& p, std::uint64_t seed) {
    return run_geometry(ctx, p, seed, false);
}

using Handler = CheckRun (*)(EngineContext&, const json&, std::uint64_t);

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> m = {
        {"orthoprojection", run_orthoprojection},
        {"hermitian-defect", run_hermitian_defect},
        {"power-alternation", run_power_alternation},
        {"spectral", run_spectral},
        {"iterate", run_iterate},
        {"range-formula", run_range_formula},
        {"modulus-chain", run_modulus_chain},
        {"composition-bounds", run_composition_bounds},
        {"beta-bound", run_beta_bound},
        {"decay-bound", run_decay_bound},
        {"amplitude-omega", run_amplitude_omega},
        {"closure", run_closure},
        {"halperin", run_halperin},
        {"d-interval", run_d_interval},
        {"wprime", run_wprime},
        {"delta-modulus", run_delta_modulus},
        {"beta-modulus", run_beta_modulus},
    };
    return m;
}

// ---------------------------------------------------------------------------
// Upfront structural validation: everything here is a config error (exit 2),
// as opposed to data-dependent check outcomes.

void validate_check(const EngineContext& ctx, const CheckSpec& spec) {
    // operand mode: 0 none, 1 expression-or-generator, 2 expression, 3 a/b pair
    static const std::map<std::string, std::pair<int, bool>> meta = {
        {"orthoprojection", {1, false}}, {"hermitian-defect", {1, false}},
        {"power-alternation", {1, false}}, {"spectral", {1, false}},
        {"iterate", {1, false}},          {"range-formula", {2, false}},
        {"modulus-chain", {1, true}},     {"composition-bounds", {3, true}},
        {"beta-bound", {1, true}},        {"decay-bound", {1, false}},
        {"amplitude-omega", {1, false}},  {"closure", {3, false}},
        {"halperin", {1, false}},         {"d-interval", {1, false}},
        {"wprime", {1, false}},           {"delta-modulus", {0, true}},
        {"beta-modulus", {0, true}},
    };
    const auto it = meta.find(spec.name);
    if (it == meta.end()) {
        std::string names;
        for (const auto& [n, h] : handlers()) names += (names.empty() ? "" : ", ") + n;
        throw input_error("unknown check \"" + spec.name + "\" (available: " + names + ")");
    }
    const auto [mode, needs_eps] = it->second;
    switch (mode) {
    case 1:
        resolve_operand(ctx, spec.params, spec.name);
        break;
    case 2:
        index_param(spec.params, "expression", ctx.config->expressions.size(),
                    spec.name, "expression");
        break;
    case 3:
        index_param(spec.params, "a", ctx.gens.size(), spec.name, "generator");
        index_param(spec.params, "b", ctx.gens.size(), spec.name, "generator");
        break;
    default:
        break;
    }
    if (needs_eps) epsilon_param(spec.params, spec.name);
}

EngineContext build_context(const RunConfig& config) {
    config.space.validate();
    EngineContext ctx;
    ctx.config = &config;
    ctx.space = config.space;
    for (std::size_t k = 0; k < config.generators.size(); ++k) {
        const auto& g = config.generators[k];
        ComplexMatrix m = std::holds_alternative<ProjectionSpec>(g)
                              ? make_projection(std::get<ProjectionSpec>(g), config.space)
                              : std::get<ComplexMatrix>(g);
        if (!m.square() || m.rows() != config.space.dim)
            throw input_error("generator " + std::to_string(k + 1) +
                              ": shape does not match the space");
        ctx.gens.push_back(std::move(m));
    }
    for (std::size_t i = 0; i < config.expressions.size(); ++i) {
        const auto violations = validate(config.expressions[i], ctx.gens.size());
        if (!violations.empty())
            throw input_error("expression " + std::to_string(i + 1) + " invalid at " +
                              violations.front().path + ": " +
                              violations.front().message);
    }
    for (const CheckSpec& spec : config.checks) validate_check(ctx, spec);
    return ctx;
}

std::string report_filename(std::size_t ordinal, const std::string& name) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "check-%02zu-", ordinal);
    return buf + name + ".json";
}

} // namespace

// ---------------------------------------------------------------------------
// Config (de)serialization

RunConfig config_from_json(const json& j) {
    if (!j.is_object()) throw input_error("config: top level must be a JSON object");
    RunConfig cfg;
    if (!j.contains("space")) throw input_error("config: missing \"space\"");
    cfg.space = space_from_json(j.at("space"));
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer() || j.at("seed").get<long long>() < 0)
            throw input_error("config: seed must be a nonnegative integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    cfg.output = j.value("output", std::string("projlab-out"));
    for (const auto& g : j.value("generators", json::array())) {
        if (g.is_object() && g.contains("matrix"))
            cfg.generators.emplace_back(matrix_from_json(g.at("matrix")));
        else if (g.is_object() && g.contains("projection"))
            cfg.generators.emplace_back(projection_spec_from_json(g.at("projection")));
        else
            throw input_error(
                "config: each generator needs a \"matrix\" or \"projection\" key");
    }
    for (const auto& e : j.value("expressions", json::array()))
        cfg.expressions.push_back(expr_from_json(e));
    for (const auto& c : j.value("checks", json::array())) {
        if (!c.is_object() || !c.contains("name") || !c.at("name").is_string())
            throw input_error("config: each check needs a string \"name\"");
        CheckSpec spec;
        spec.name = c.at("name").get<std::string>();
        spec.params = c.value("params", json::object());
        if (!spec.params.is_object())
            throw input_error("config: check params must be a JSON object");
        cfg.checks.push_back(std::move(spec));
    }
    return cfg;
}

json to_json(const RunConfig& config) {
    json gens = json::array();
    for (const auto& g : config.generators) {
        if (std::holds_alternative<ProjectionSpec>(g))
            gens.push_back(json{{"projection", to_json(std::get<ProjectionSpec>(g))}});
        else
            gens.push_back(json{{"matrix", to_json(std::get<ComplexMatrix>(g))}});
    }
    json exprs = json::array();
    for (const auto& e : config.expressions) exprs.push_back(to_json(e));
    json checks = json::array();
    for (const auto& c : config.checks)
        checks.push_back(json{{"name", c.name}, {"params", c.params}});
    return json{{"space", to_json(config.space)}, {"seed", config.seed},
                {"output", config.output},        {"generators", gens},
                {"expressions", exprs},           {"checks", checks}};
}

// ---------------------------------------------------------------------------
// Run loop

int run(const RunConfig& config) {
    EngineContext ctx = build_context(config);

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.output, ec);
    if (ec) {
        std::cerr << "cannot create output directory " << config.output << ": "
                  << ec.message() << "\n";
        return 3;
    }

    struct SummaryRow {
        CheckResult result;
        double runtime_ms = 0.0;
    };
    std::vector<SummaryRow> summary;
    bool any_fail = false;

    for (std::size_t i = 0; i < config.checks.size(); ++i) {
        const CheckSpec& spec = config.checks[i];
        const std::uint64_t seed = Rng::substream(config.seed, "check", i).bits();
        const auto t0 = std::chrono::steady_clock::now();
        CheckRun cr;
        try {
            cr = handlers().at(spec.name)(ctx, spec.params, seed);
        } catch (const std::exception& e) {
            CheckResult row;
            row.name = spec.name;
            row.instance = "check " + std::to_string(i + 1);
            row.verdict = "fail";
            row.notes = e.what();
            cr.rows = {std::move(row)};
            cr.detail = json{{"error", e.what()}};
        }
        const double ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();

        json doc;
        doc["check"] = spec.name;
        doc["ordinal"] = i + 1;
        doc["params"] = spec.params;
        doc["seed"] = seed;
        json rows = json::array();
        for (const CheckResult& r : cr.rows) rows.push_back(to_json(r));
        doc["results"] = rows;
        doc["detail"] = cr.detail;

        const fs::path file = fs::path(config.output) / report_filename(i + 1, spec.name);
        std::ofstream out(file);
        if (out) out << doc.dump(2) << '\n';
        if (!out) {
            std::cerr << "cannot write report " << file.string() << "\n";
            return 3;
        }

        for (CheckResult& r : cr.rows) {
            any_fail = any_fail || r.verdict == "fail";
            std::printf("[%-7s] %-26s %-34s lhs=%-12.6g rhs=%-12.6g %s\n",
                        r.verdict.c_str(), r.name.c_str(), r.instance.c_str(), r.lhs,
                        r.rhs, r.notes.c_str());
            summary.push_back({std::move(r), ms});
        }
    }

    std::ofstream csv(fs::path(config.output) / "summary.csv");
    if (csv) {
        csv << "check,instance,verdict,lhs,rhs,slack,runtime_ms\n";
        for (const SummaryRow& row : summary) {
            std::string instance = row.result.instance;
            for (char& c : instance)
                if (c == ',') c = ';';
            char ms[32];
            std::snprintf(ms, sizeof(ms), "%.3f", row.runtime_ms);
            csv << row.result.name << ',' << instance << ',' << row.result.verdict
                << ',' << fmt(row.result.lhs) << ',' << fmt(row.result.rhs) << ','
                << fmt(row.result.slack) << ',' << ms << '\n';
        }
    }
    if (!csv) {
        std::cerr << "cannot write summary.csv in " << config.output << "\n";
        return 3;
    }
    return any_fail ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Builtin scenarios

namespace {

std::vector<cxd> gaussian_vector(Rng& rng, std::size_t dim) {
    std::vector<cxd> v(dim);
    for (cxd& z : v) z = rng.complex_gaussian();
    return v;
}

ProjectionSpec random_span_projection(std::size_t dim, std::size_t rank, Rng& rng,
                                      const std::vector<cxd>* planted) {
    ProjectionSpec spec;
    spec.kind = ProjectionKind::hilbert_span;
    if (planted) spec.range_basis.push_back(*planted);
    while (spec.range_basis.size() < rank)
        spec.range_basis.push_back(gaussian_vector(rng, dim));
    return spec;
}

json check(const char* name, json params) {
    return json{{"name", name}, {"params", std::move(params)}};
}

RunConfig from_parts(json j, std::uint64_t seed, const std::string& output) {
    j["seed"] = seed;
    j["output"] = output;
    return config_from_json(j);
}

RunConfig scenario_counterexample(std::uint64_t seed, const std::string& output) {
    const ComplexMatrix p1{{cxd{1, 0}, cxd{0, 0}}, {cxd{-1, 0}, cxd{0, 0}}};
    const ComplexMatrix p2{{cxd{0, 0}, cxd{1, 0}}, {cxd{0, 0}, cxd{1, 0}}};
    json j;
    j["space"] = json{{"dim", 2}, {"p", "inf"}};
    j["generators"] = json::array({json{{"matrix", to_json(p1)}},
                                   json{{"matrix", to_json(p2)}}});
    j["expressions"] = json::array(
        {json{{"product", json::array({json{{"leaf", 1}}, json{{"leaf", 2}}})}}});
    j["checks"] = json::array({
        check("orthoprojection", {{"generator", 1}}),
        check("orthoprojection", {{"generator", 2}}),
        check("power-alternation", {{"expression", 1}, {"n_max", 50}, {"tol", 1e-12}}),
        check("spectral", {{"expression", 1},
                           {"expect_boundary", json::array({json::array({-1.0, 0.0})})},
                           {"expect_amplitude", 2.0},
                           {"expect_primitive", false},
                           {"tol", 1e-9}}),
        check("iterate", {{"expression", 1},
                          {"n_max", 4000},
                          {"expect", "diverge"},
                          {"cesaro", "ergodic"},
                          {"cesaro_tol", 1e-3}}),
        check("amplitude-omega", {{"expression", 1}}),
        check("modulus-chain", {{"expression", 1}, {"epsilon", 0.25}}),
        check("decay-bound", {{"expression", 1}, {"n_max", 200}}),
    });
    return from_parts(std::move(j), seed, output);
}

RunConfig scenario_halperin(std::uint64_t seed, const std::string& output) {
    const std::size_t dim = 6;
    Rng rng = Rng::substream(seed, "scenario-halperin");
    const std::vector<cxd> v0 =
        normalized(gaussian_vector(rng, dim), SpaceDescriptor::lp(dim, 2.0));
    const std::size_t ranks[3] = {4, 4, 3};
    json gens = json::array();
    for (std::size_t k = 0; k < 3; ++k)
        gens.push_back(json{
            {"projection", to_json(random_span_projection(dim, ranks[k], rng, &v0))}});
    json j;
    j["space"] = json{{"dim", dim}, {"p", 2.0}};
    j["generators"] = gens;
    j["expressions"] = json::array({json{
        {"product", json::array({json{{"leaf", 1}}, json{{"leaf", 2}}, json{{"leaf", 3}}})}}});
    j["checks"] = json::array({
        check("orthoprojection", {{"generator", 1}}),
        check("orthoprojection", {{"generator", 2}}),
        check("orthoprojection", {{"generator", 3}}),
        check("halperin",
              {{"generator", 1}, {"expect_lo", 0.99}, {"expect_hi", 1.000000001}}),
        check("halperin",
              {{"generator", 2}, {"expect_lo", 0.99}, {"expect_hi", 1.000000001}}),
        check("halperin",
              {{"generator", 3}, {"expect_lo", 0.99}, {"expect_hi", 1.000000001}}),
        check("iterate", {{"expression", 1},
                          {"expect", "converge"},
                          {"limit", "ergodic"},
                          {"limit_tol", 1e-6}}),
        check("range-formula", {{"expression", 1}, {"tol", 1e-6}}),
        check("wprime", {{"generator", 1}, {"max_defect", 1e-6}}),
        check("d-interval", {{"generator", 1}, {"expect_contains", 0.5}}),
    });
    return from_parts(std::move(j), seed, output);
}

RunConfig scenario_lapidus(std::uint64_t seed, const std::string& output) {
    const std::size_t dim = 6;
    Rng rng = Rng::substream(seed, "scenario-lapidus");
    const std::vector<cxd> v0 =
        normalized(gaussian_vector(rng, dim), SpaceDescriptor::lp(dim, 2.0));
    const std::size_t ranks[3] = {4, 4, 3};
    json gens = json::array();
    for (std::size_t k = 0; k < 3; ++k)
        gens.push_back(json{
            {"projection", to_json(random_span_projection(dim, ranks[k], rng, &v0))}});
    json convex = json::array();
    const double weights[3] = {0.2, 0.3, 0.5};
    for (std::size_t k = 0; k < 3; ++k)
        convex.push_back(json::array({weights[k], json{{"leaf", k + 1}}}));
    json j;
    j["space"] = json{{"dim", dim}, {"p", 2.0}};
    j["generators"] = gens;
    j["expressions"] = json::array({json{{"convex", convex}}});
    j["checks"] = json::array({
        check("orthoprojection", {{"generator", 1}}),
        check("orthoprojection", {{"generator", 2}}),
        check("orthoprojection", {{"generator", 3}}),
        check("spectral", {{"expression", 1}, {"expect_primitive", true}}),
        check("iterate", {{"expression", 1},
                          {"expect", "converge"},
                          {"limit", "ergodic"},
                          {"limit_tol", 1e-6}}),
        check("range-formula", {{"expression", 1}, {"tol", 1e-6}}),
        check("amplitude-omega", {{"expression", 1}}),
    });
    return from_parts(std::move(j), seed, output);
}

RunConfig scenario_decay_bounds(std::uint64_t seed, const std::string& output) {
    const double thetas[3] = {0.1, 0.3, 0.7};
    json gens = json::array();
    for (double th : thetas) {
        ComplexMatrix t(2, 2);
        t(0, 0) = std::polar(1.0, th);
        t(1, 1) = cxd{0.5, 0.0};
        gens.push_back(json{{"matrix", to_json(t)}});
    }
    json exprs = json::array();
    for (int k = 1; k <= 3; ++k) exprs.push_back(json{{"leaf", k}});
    json checks = json::array();
    for (int k = 1; k <= 3; ++k) {
        const double a = 2.0 * std::sin(thetas[k - 1] / 2.0);
        checks.push_back(check("spectral", {{"expression", k},
                                            {"expect_amplitude", a},
                                            {"expect_primitive", false},
                                            {"tol", 1e-9}}));
        checks.push_back(check("decay-bound", {{"expression", k}, {"n_max", 1000}}));
        checks.push_back(check("amplitude-omega", {{"expression", k}}));
    }
    json j;
    j["space"] = json{{"dim", 2}, {"p", 2.0}};
    j["generators"] = gens;
    j["expressions"] = exprs;
    j["checks"] = checks;
    return from_parts(std::move(j), seed, output);
}

RunConfig scenario_moduli_chain(std::uint64_t seed, const std::string& output) {
    const std::size_t dim = 5;
    Rng rng = Rng::substream(seed, "scenario-moduli-chain");
    const std::vector<cxd> v0 =
        normalized(gaussian_vector(rng, dim), SpaceDescriptor::lp(dim, 2.0));
    const std::size_t ranks[3] = {3, 3, 4};
    json gens = json::array();
    for (std::size_t k = 0; k < 3; ++k)
        gens.push_back(json{
            {"projection", to_json(random_span_projection(dim, ranks[k], rng, &v0))}});
    json exprs = json::array();
    for (std::uint64_t i = 0; i < 5; ++i)
        exprs.push_back(to_json(
            random_element(3, 3, Rng::substream(seed, "moduli-chain-expr", i).bits())));
    json checks = json::array();
    for (int i = 1; i <= 5; ++i)
        checks.push_back(check("modulus-chain", {{"expression", i}, {"epsilon", 0.1}}));
    checks.push_back(check("composition-bounds", {{"a", 1},
                                                  {"b", 2},
                                                  {"weights", json::array({0.5, 0.5})},
                                                  {"epsilon", 0.05}}));
    checks.push_back(check("beta-bound", {{"generator", 1}, {"epsilon", 0.2}}));
    json j;
    j["space"] = json{{"dim", dim}, {"p", 2.0}};
    j["generators"] = gens;
    j["expressions"] = exprs;
    j["checks"] = checks;
    return from_parts(std::move(j), seed, output);
}

RunConfig scenario_range_formula(std::uint64_t seed, const std::string& output) {
    const auto basis = [](std::initializer_list<int> coords) {
        json vectors = json::array();
        for (int c : coords) {
            json v = json::array();
            for (int i = 0; i < 3; ++i)
                v.push_back(json::array({i == c ? 1.0 : 0.0, 0.0}));
            vectors.push_back(v);
        }
        return vectors;
    };
    json gens = json::array({
        json{{"projection",
              json{{"kind", "hilbert-span"}, {"range_basis", basis({0, 1})}}}},
        json{{"projection",
              json{{"kind", "hilbert-span"}, {"range_basis", basis({1, 2})}}}},
    });
    json exprs = json::array(
        {json{{"product", json::array({json{{"leaf", 1}}, json{{"leaf", 2}}})}},
         json{{"convex", json::array({json::array({0.5, json{{"leaf", 1}}}),
                                      json::array({0.5, json{{"leaf", 2}}})})}}});
    json j;
    j["space"] = json{{"dim", 3}, {"p", 2.0}};
    j["generators"] = gens;
    j["expressions"] = exprs;
    j["checks"] = json::array({
        check("orthoprojection", {{"generator", 1}}),
        check("orthoprojection", {{"generator", 2}}),
        check("wprime", {{"generator", 1}, {"max_defect", 1e-6}}),
        check("wprime", {{"generator", 2}, {"max_defect", 1e-6}}),
        check("range-formula", {{"expression", 1}, {"tol", 1e-6}}),
        check("range-formula", {{"expression", 2}, {"tol", 1e-6}}),
        check("iterate", {{"expression", 1},
                          {"expect", "converge"},
                          {"limit", "ergodic"},
                          {"limit_tol", 1e-6}}),
        check("iterate", {{"expression", 2},
                          {"expect", "converge"},
                          {"limit", "ergodic"},
                          {"limit_tol", 1e-6}}),
        check("spectral", {{"expression", 1}, {"expect_primitive", true}}),
    });
    return from_parts(std::move(j), seed, output);
}

} // namespace

std::vector<std::string> scenario_names() {
    return {"counterexample", "halperin",     "lapidus",
            "decay-bounds",   "moduli-chain", "range-formula"};
}

RunConfig scenario(const std::string& name, std::uint64_t seed,
                   const std::string& output_dir) {
    const std::string out = output_dir.empty() ? "scenario-" + name : output_dir;
    if (name == "counterexample") return scenario_counterexample(seed, out);
    if (name == "halperin") return scenario_halperin(seed, out);
    if (name == "lapidus") return scenario_lapidus(seed, out);
    if (name == "decay-bounds") return scenario_decay_bounds(seed, out);
    if (name == "moduli-chain") return scenario_moduli_chain(seed, out);
    if (name == "range-formula") return scenario_range_formula(seed, out);
    std::string names;
    for (const std::string& n : scenario_names())
        names += (names.empty() ? "" : ", ") + n;
    throw input_error("unknown scenario \"" + name + "\" (available: " + names + ")");
}

} // namespace projlab
