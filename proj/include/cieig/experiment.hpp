// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cieig/contour.hpp"
#include "cieig/gallery.hpp"
#include "cieig/matrix_function.hpp"
#include "cieig/oracle.hpp"
#include "cieig/solver.hpp"

namespace cieig {

using Json = nlohmann::json;

/// Configuration problem: names the offending key with its full path.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& message, std::string key = {})
        : std::runtime_error(key.empty() ? message : message + " (key: " + key + ")"),
          key_(std::move(key))
    {
    }

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

struct ProblemConfig {
    std::string name;  ///< gallery name; empty when a polynomial is given
    GalleryParams params;
    std::optional<std::vector<ComplexMatrix>> coefficients;
    std::optional<std::string> coefficients_file;
};

struct ContourConfig {
    std::string kind;  ///< "circle" or "ellipse"
    Complex center = 0.0;
    double radius = 0.0;       ///< circle
    double semi_axis_x = 0.0;  ///< ellipse
    double semi_axis_y = 0.0;  ///< ellipse
};

/// Solver fields as given in the config; unset fields fall back to the
/// solver module defaults.
struct SolverOverrides {
    std::optional<int> probe_count;
    std::optional<int> hankel_depth;
    std::optional<int> node_count;
    std::optional<double> rank_tolerance;
    std::optional<double> residual_tolerance;
    std::optional<std::uint64_t> seed;
    std::optional<Complex> shift;
    std::optional<int> max_probe_count;
    std::optional<int> max_hankel_depth;
    std::optional<bool> adaptive;
    std::optional<bool> identity_probe;
};

struct ExperimentConfig {
    ProblemConfig problem;
    ContourConfig contour;
    SolverOverrides solver;
    std::vector<int> sweep;
    bool verify = false;
    std::string output = ".";
};

namespace detail {

inline void reject_unknown_keys(const Json& obj,
                                std::initializer_list<const char*> allowed,
                                const std::string& path)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ConfigError("unknown configuration key",
                              path.empty() ? it.key() : path + "." + it.key());
        }
    }
}

inline const Json& expect_object(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ConfigError("expected an object", path);
    }
    return j;
}

inline double parse_double(const Json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw ConfigError("expected a number", path);
    }
    return j.get<double>();
}

inline int parse_int(const Json& j, const std::string& path)
{
    if (!j.is_number_integer()) {
        throw ConfigError("expected an integer", path);
    }
    return j.get<int>();
}

inline bool parse_bool(const Json& j, const std::string& path)
{
    if (!j.is_boolean()) {
        throw ConfigError("expected a boolean", path);
    }
    return j.get<bool>();
}

inline Complex parse_complex(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw ConfigError("expected a complex number as [re, im]", path);
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Json complex_to_json(Complex z)
{
    return Json::array({z.real(), z.imag()});
}

inline std::vector<ComplexMatrix> parse_coefficients(const Json& j,
                                                     const std::string& path)
{
    if (!j.is_array() || j.empty()) {
        throw ConfigError("expected a non-empty array of matrices", path);
    }
    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(j.size());
    for (std::size_t c = 0; c < j.size(); ++c) {
        const Json& jm = j[c];
        const std::string mpath = path + "[" + std::to_string(c) + "]";
        if (!jm.is_array() || jm.empty()) {
            throw ConfigError("expected a matrix as an array of rows", mpath);
        }
        const std::size_t rows = jm.size();
        ComplexMatrix mat(static_cast<Index>(rows), static_cast<Index>(jm[0].size()));
        for (std::size_t r = 0; r < rows; ++r) {
            const Json& jr = jm[r];
            if (!jr.is_array() ||
                jr.size() != static_cast<std::size_t>(mat.cols())) {
                throw ConfigError("matrix rows must have equal length",
                                  mpath + "[" + std::to_string(r) + "]");
            }
            for (std::size_t cc = 0; cc < jr.size(); ++cc) {
                mat(static_cast<Index>(r), static_cast<Index>(cc)) = parse_complex(
                    jr[cc], mpath + "[" + std::to_string(r) + "][" +
                                std::to_string(cc) + "]");
            }
        }
        if (mat.rows() != mat.cols()) {
            throw ConfigError("matrix must be square", mpath);
        }
        if (!coeffs.empty() && mat.rows() != coeffs.front().rows()) {
            throw ConfigError("coefficient matrices must share one size", mpath);
        }
        coeffs.push_back(std::move(mat));
    }
    return coeffs;
}

inline Json coefficients_to_json(const std::vector<ComplexMatrix>& coeffs)
{
    Json out = Json::array();
    for (const ComplexMatrix& mat : coeffs) {
        Json jm = Json::array();
        for (Index r = 0; r < mat.rows(); ++r) {
            Json jr = Json::array();
            for (Index c = 0; c < mat.cols(); ++c) {
                jr.push_back(complex_to_json(mat(r, c)));
            }
            jm.push_back(std::move(jr));
        }
        out.push_back(std::move(jm));
    }
    return out;
}

inline ProblemConfig parse_problem(const Json& j)
{
    expect_object(j, "problem");
    reject_unknown_keys(j, {"name", "params", "polynomial"}, "problem");
    ProblemConfig out;
    const bool has_name = j.contains("name");
    const bool has_poly = j.contains("polynomial");
    if (has_name == has_poly) {
        throw ConfigError("problem needs exactly one of 'name' or 'polynomial'",
                          "problem");
    }
    if (has_name) {
        if (!j["name"].is_string()) {
            throw ConfigError("expected a string", "problem.name");
        }
        out.name = j["name"].get<std::string>();
        if (j.contains("params")) {
            const Json& jp = expect_object(j["params"], "problem.params");
            reject_unknown_keys(jp, {"m", "seed", "a", "b", "tau", "diagonal"},
                                "problem.params");
            if (jp.contains("m")) {
                out.params.dimension = parse_int(jp["m"], "problem.params.m");
            }
            if (jp.contains("seed")) {
                if (!jp["seed"].is_number_integer()) {
                    throw ConfigError("expected an integer", "problem.params.seed");
                }
                out.params.seed = jp["seed"].get<std::uint64_t>();
            }
            if (jp.contains("a")) {
                out.params.a = parse_double(jp["a"], "problem.params.a");
            }
            if (jp.contains("b")) {
                out.params.b = parse_double(jp["b"], "problem.params.b");
            }
            if (jp.contains("tau")) {
                out.params.tau = parse_double(jp["tau"], "problem.params.tau");
            }
            if (jp.contains("diagonal")) {
                const Json& jd = jp["diagonal"];
                if (!jd.is_array()) {
                    throw ConfigError("expected an array", "problem.params.diagonal");
                }
                for (std::size_t i = 0; i < jd.size(); ++i) {
                    out.params.diagonal.push_back(parse_complex(
                        jd[i],
                        "problem.params.diagonal[" + std::to_string(i) + "]"));
                }
            }
        }
    } else {
        const Json& jp = expect_object(j["polynomial"], "problem.polynomial");
        reject_unknown_keys(jp, {"coefficients", "coefficients_file"},
                            "problem.polynomial");
        const bool inline_coeffs = jp.contains("coefficients");
        const bool file_coeffs = jp.contains("coefficients_file");
        if (inline_coeffs == file_coeffs) {
            throw ConfigError(
                "polynomial needs exactly one of 'coefficients' or "
                "'coefficients_file'",
                "problem.polynomial");
        }
        if (inline_coeffs) {
            out.coefficients = parse_coefficients(jp["coefficients"],
                                                  "problem.polynomial.coefficients");
        } else {
            if (!jp["coefficients_file"].is_string()) {
                throw ConfigError("expected a string",
                                  "problem.polynomial.coefficients_file");
            }
            out.coefficients_file = jp["coefficients_file"].get<std::string>();
        }
    }
    return out;
}

inline ContourConfig parse_contour(const Json& j)
{
    expect_object(j, "contour");
    reject_unknown_keys(j, {"kind", "center", "radius", "semi_axes"}, "contour");
    ContourConfig out;
    if (!j.contains("kind") || !j["kind"].is_string()) {
        throw ConfigError("expected a string", "contour.kind");
    }
    out.kind = j["kind"].get<std::string>();
    if (j.contains("center")) {
        out.center = parse_complex(j["center"], "contour.center");
    }
    if (out.kind == "circle") {
        if (!j.contains("radius")) {
            throw ConfigError("circle contour needs a radius", "contour.radius");
        }
        out.radius = parse_double(j["radius"], "contour.radius");
        if (!(out.radius > 0.0)) {
            throw ConfigError("radius must be positive", "contour.radius");
        }
    } else if (out.kind == "ellipse") {
        if (!j.contains("semi_axes") || !j["semi_axes"].is_array() ||
            j["semi_axes"].size() != 2) {
            throw ConfigError("ellipse contour needs semi_axes as [a, b]",
                              "contour.semi_axes");
        }
        out.semi_axis_x = parse_double(j["semi_axes"][0], "contour.semi_axes[0]");
        out.semi_axis_y = parse_double(j["semi_axes"][1], "contour.semi_axes[1]");
        if (!(out.semi_axis_x > 0.0) || !(out.semi_axis_y > 0.0)) {
            throw ConfigError("semi-axes must be positive", "contour.semi_axes");
        }
    } else {
        throw ConfigError("contour kind must be 'circle' or 'ellipse'",
                          "contour.kind");
    }
    return out;
}

inline SolverOverrides parse_solver(const Json& j)
{
    expect_object(j, "solver");
    reject_unknown_keys(j,
                        {"probe_count", "hankel_depth", "node_count",
                         "rank_tolerance", "residual_tolerance", "seed", "shift",
                         "max_probe_count", "max_hankel_depth", "adaptive",
                         "identity_probe"},
                        "solver");
    SolverOverrides out;
    if (j.contains("probe_count")) {
        out.probe_count = parse_int(j["probe_count"], "solver.probe_count");
        if (*out.probe_count < 1) {
            throw ConfigError("probe count must be at least 1", "solver.probe_count");
        }
    }
    if (j.contains("hankel_depth")) {
        out.hankel_depth = parse_int(j["hankel_depth"], "solver.hankel_depth");
        if (*out.hankel_depth < 1) {
            throw ConfigError("hankel depth must be at least 1",
                              "solver.hankel_depth");
        }
    }
    if (j.contains("node_count")) {
        out.node_count = parse_int(j["node_count"], "solver.node_count");
        if (*out.node_count < 1) {
            throw ConfigError("node count must be at least 1", "solver.node_count");
        }
    }
    if (j.contains("rank_tolerance")) {
        out.rank_tolerance = parse_double(j["rank_tolerance"], "solver.rank_tolerance");
        if (!(*out.rank_tolerance > 0.0)) {
            throw ConfigError("rank tolerance must be positive",
                              "solver.rank_tolerance");
        }
    }
    if (j.contains("residual_tolerance")) {
        out.residual_tolerance =
            parse_double(j["residual_tolerance"], "solver.residual_tolerance");
        if (!(*out.residual_tolerance > 0.0)) {
            throw ConfigError("residual tolerance must be positive",
                              "solver.residual_tolerance");
        }
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer()) {
            throw ConfigError("expected an integer", "solver.seed");
        }
        out.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("shift")) {
        out.shift = parse_complex(j["shift"], "solver.shift");
    }
    if (j.contains("max_probe_count")) {
        out.max_probe_count =
            parse_int(j["max_probe_count"], "solver.max_probe_count");
    }
    if (j.contains("max_hankel_depth")) {
        out.max_hankel_depth =
            parse_int(j["max_hankel_depth"], "solver.max_hankel_depth");
    }
    if (j.contains("adaptive")) {
        out.adaptive = parse_bool(j["adaptive"], "solver.adaptive");
    }
    if (j.contains("identity_probe")) {
        out.identity_probe = parse_bool(j["identity_probe"], "solver.identity_probe");
    }
    return out;
}

}  // namespace detail

/// Parses and validates an experiment configuration. Unknown keys are
/// rejected with the full key path.
inline ExperimentConfig parse_config(const Json& j)
{
    detail::expect_object(j, "");
    detail::reject_unknown_keys(
        j, {"problem", "contour", "solver", "sweep", "verify", "output"}, "");
    if (!j.contains("problem")) {
        throw ConfigError("missing required section", "problem");
    }
    if (!j.contains("contour")) {
        throw ConfigError("missing required section", "contour");
    }
    ExperimentConfig out;
    out.problem = detail::parse_problem(j["problem"]);
    out.contour = detail::parse_contour(j["contour"]);
    if (j.contains("solver")) {
        out.solver = detail::parse_solver(j["solver"]);
    }
    if (j.contains("sweep")) {
        if (!j["sweep"].is_array()) {
            throw ConfigError("expected an array of node counts", "sweep");
        }
        for (std::size_t i = 0; i < j["sweep"].size(); ++i) {
            const int n = detail::parse_int(j["sweep"][i],
                                            "sweep[" + std::to_string(i) + "]");
            if (n < 1) {
                throw ConfigError("sweep node counts must be at least 1",
                                  "sweep[" + std::to_string(i) + "]");
            }
            out.sweep.push_back(n);
        }
    }
    if (j.contains("verify")) {
        out.verify = detail::parse_bool(j["verify"], "verify");
    }
    if (j.contains("output")) {
        if (!j["output"].is_string()) {
            throw ConfigError("expected a string", "output");
        }
        out.output = j["output"].get<std::string>();
    }
    return out;
}

inline ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file '" + path + "'");
    }
    Json j;
    try {
        in >> j;
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/// Serializes a configuration; only fields that were set are emitted, so
/// parse(to_json(parse(x))) == parse(x).
inline Json to_json(const ExperimentConfig& config)
{
    Json j;
    Json jp;
    if (!config.problem.name.empty()) {
        jp["name"] = config.problem.name;
        Json params = Json::object();
        const GalleryParams& gp = config.problem.params;
        if (gp.dimension) {
            params["m"] = static_cast<int>(*gp.dimension);
        }
        if (gp.seed) {
            params["seed"] = *gp.seed;
        }
        if (gp.a) {
            params["a"] = *gp.a;
        }
        if (gp.b) {
            params["b"] = *gp.b;
        }
        if (gp.tau) {
            params["tau"] = *gp.tau;
        }
        if (!gp.diagonal.empty()) {
            Json jd = Json::array();
            for (Complex z : gp.diagonal) {
                jd.push_back(detail::complex_to_json(z));
            }
            params["diagonal"] = std::move(jd);
        }
        if (!params.empty()) {
            jp["params"] = std::move(params);
        }
    } else {
        Json poly = Json::object();
        if (config.problem.coefficients) {
            poly["coefficients"] =
                detail::coefficients_to_json(*config.problem.coefficients);
        } else if (config.problem.coefficients_file) {
            poly["coefficients_file"] = *config.problem.coefficients_file;
        }
        jp["polynomial"] = std::move(poly);
    }
    j["problem"] = std::move(jp);

    Json jc;
    jc["kind"] = config.contour.kind;
    jc["center"] = detail::complex_to_json(config.contour.center);
    if (config.contour.kind == "circle") {
        jc["radius"] = config.contour.radius;
    } else {
        jc["semi_axes"] =
            Json::array({config.contour.semi_axis_x, config.contour.semi_axis_y});
    }
    j["contour"] = std::move(jc);

    Json js = Json::object();
    const SolverOverrides& so = config.solver;
    if (so.probe_count) {
        js["probe_count"] = *so.probe_count;
    }
    if (so.hankel_depth) {
        js["hankel_depth"] = *so.hankel_depth;
    }
    if (so.node_count) {
        js["node_count"] = *so.node_count;
    }
    if (so.rank_tolerance) {
        js["rank_tolerance"] = *so.rank_tolerance;
    }
    if (so.residual_tolerance) {
        js["residual_tolerance"] = *so.residual_tolerance;
    }
    if (so.seed) {
        js["seed"] = *so.seed;
    }
    if (so.shift) {
        js["shift"] = detail::complex_to_json(*so.shift);
    }
    if (so.max_probe_count) {
        js["max_probe_count"] = *so.max_probe_count;
    }
    if (so.max_hankel_depth) {
        js["max_hankel_depth"] = *so.max_hankel_depth;
    }
    if (so.adaptive) {
        js["adaptive"] = *so.adaptive;
    }
    if (so.identity_probe) {
        js["identity_probe"] = *so.identity_probe;
    }
    if (!js.empty()) {
        j["solver"] = std::move(js);
    }
    if (!config.sweep.empty()) {
        j["sweep"] = config.sweep;
    }
    if (config.verify) {
        j["verify"] = true;
    }
    j["output"] = config.output;
    return j;
}

/// Problem, contour and solver settings materialized from a parsed
/// configuration.
struct ResolvedExperiment {
    NonlinearMatrixFunction function;
    std::optional<PolynomialMatrixFunction> polynomial;
    Contour contour;
    SolverConfig solver;
};

inline ResolvedExperiment resolve_experiment(const ExperimentConfig& config)
{
    std::optional<GalleryProblem> gallery;
    std::optional<PolynomialMatrixFunction> poly;
    if (!config.problem.name.empty()) {
        try {
            gallery = make_gallery_problem(config.problem.name, config.problem.params);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), "problem");
        }
        poly = gallery->polynomial;
    } else {
        std::vector<ComplexMatrix> coeffs;
        if (config.problem.coefficients) {
            coeffs = *config.problem.coefficients;
        } else if (config.problem.coefficients_file) {
            std::ifstream in(*config.problem.coefficients_file);
            if (!in) {
                throw ConfigError("cannot open coefficients file '" +
                                      *config.problem.coefficients_file + "'",
                                  "problem.polynomial.coefficients_file");
            }
            Json j;
            try {
                in >> j;
            } catch (const Json::parse_error& e) {
                throw ConfigError(std::string("coefficients file is not valid JSON: ") +
                                      e.what(),
                                  "problem.polynomial.coefficients_file");
            }
            detail::expect_object(j, "coefficients file");
            detail::reject_unknown_keys(j, {"coefficients"}, "coefficients file");
            if (!j.contains("coefficients")) {
                throw ConfigError("coefficients file needs a 'coefficients' array",
                                  "problem.polynomial.coefficients_file");
            }
            coeffs = detail::parse_coefficients(j["coefficients"], "coefficients");
        } else {
            throw ConfigError("polynomial problem has no coefficients", "problem");
        }
        poly = PolynomialMatrixFunction(std::move(coeffs));
    }

    Contour contour = config.contour.kind == "circle"
                          ? Contour::circle(config.contour.center, config.contour.radius)
                          : Contour::ellipse(config.contour.center,
                                             config.contour.semi_axis_x,
                                             config.contour.semi_axis_y);

    SolverConfig solver;
    const SolverOverrides& so = config.solver;
    if (so.probe_count) {
        solver.probe_count = *so.probe_count;
    }
    if (so.hankel_depth) {
        solver.hankel_depth = *so.hankel_depth;
    }
    if (so.node_count) {
        solver.node_count = *so.node_count;
    }
    if (so.rank_tolerance) {
        solver.rank_tolerance = *so.rank_tolerance;
    }
    if (so.residual_tolerance) {
        solver.residual_tolerance = *so.residual_tolerance;
    }
    if (so.seed) {
        solver.seed = *so.seed;
    }
    if (so.shift) {
        solver.shift = *so.shift;
    }
    if (so.max_probe_count) {
        solver.max_probe_count = *so.max_probe_count;
    }
    if (so.max_hankel_depth) {
        solver.max_hankel_depth = *so.max_hankel_depth;
    }
    if (so.adaptive) {
        solver.adaptive = *so.adaptive;
    }
    if (so.identity_probe) {
        solver.identity_probe = *so.identity_probe;
    }

    NonlinearMatrixFunction fn =
        gallery ? gallery->function
                : static_cast<const NonlinearMatrixFunction&>(*poly);
    return ResolvedExperiment{std::move(fn), std::move(poly), std::move(contour),
                              solver};
}

struct VerificationReport {
    bool performed = false;
    bool ok = true;
    std::string method;  ///< "companion" or "newton"
    std::vector<std::string> mismatches;
    std::vector<Complex> reference;  ///< oracle or refined eigenvalues
};

struct RunReport {
    EigenResult result;
    VerificationReport verification;
    std::filesystem::path eigenvalues_csv;
    std::filesystem::path singular_values_csv;
    std::filesystem::path convergence_csv;
    std::filesystem::path summary_json;
    int exit_code = 0;  ///< 0 success, 4 verification mismatch
};

namespace detail {

inline std::string format_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline bool complex_less(Complex a, Complex b)
{
    if (a.real() != b.real()) {
        return a.real() < b.real();
    }
    return a.imag() < b.imag();
}

inline VerificationReport verify_against_oracle(
    const ResolvedExperiment& experiment, const EigenResult& result)
{
    VerificationReport report;
    report.performed = true;
    if (experiment.polynomial) {
        report.method = "companion";
        std::vector<Complex> oracle = polyeig_oracle(*experiment.polynomial);
        constexpr double match_tol = 1e-6;
        const double margin = 0.02;
        for (Complex mu : oracle) {
            if (!experiment.contour.contains(mu)) {
                continue;
            }
            report.reference.push_back(mu);
            // Eigenvalues hugging the contour are allowed to be missed.
            if (experiment.contour.boundary_coordinate(mu) >= 1.0 - margin) {
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            for (const Eigenpair& pair : result.accepted) {
                best = std::min(best, std::abs(pair.lambda - mu));
            }
            if (!(best <= match_tol)) {
                report.ok = false;
                report.mismatches.push_back("oracle eigenvalue " +
                                            detail::format_complex(mu) +
                                            " not recovered (best distance " +
                                            format_double(best) + ")");
            }
        }
        for (const Eigenpair& pair : result.accepted) {
            double best = std::numeric_limits<double>::infinity();
            for (Complex mu : oracle) {
                best = std::min(best, std::abs(pair.lambda - mu));
            }
            if (!(best <= match_tol)) {
                report.ok = false;
                report.mismatches.push_back("accepted eigenvalue " +
                                            detail::format_complex(pair.lambda) +
                                            " matches no oracle eigenvalue");
            }
        }
    } else if (experiment.function.has_derivative()) {
        report.method = "newton";
        for (const Eigenpair& pair : result.accepted) {
            try {
                const NewtonResult refined =
                    newton_refine(experiment.function, pair.lambda, pair.vector);
                report.reference.push_back(refined.lambda);
                const double dist = std::abs(refined.lambda - pair.lambda);
                if (!(dist <= 1e-6 * std::max(1.0, std::abs(pair.lambda)))) {
                    report.ok = false;
                    report.mismatches.push_back(
                        "accepted eigenvalue " + detail::format_complex(pair.lambda) +
                        " moved by " + format_double(dist) + " under refinement");
                }
            } catch (const std::exception& e) {
                report.ok = false;
                report.mismatches.push_back("refinement failed at " +
                                            detail::format_complex(pair.lambda) +
                                            ": " + e.what());
            }
        }
    } else {
        report.performed = false;
        report.method = "none";
    }
    return report;
}

}  // namespace detail

/// Runs the configured experiment and writes result files into the
/// output directory:
///   eigenvalues.csv      one row per accepted/rejected candidate
///   singular_values.csv  one row per run (config N, plus each sweep N)
///   convergence.csv      per sweep N, tracked eigenvalue errors
///   summary.json         resolved config echo, diagnostics, timings
inline RunReport run_experiment(const ExperimentConfig& config)
{
    namespace fs = std::filesystem;
    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();

    const ResolvedExperiment experiment = resolve_experiment(config);
    const fs::path out_dir(config.output.empty() ? "." : config.output);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory '" + out_dir.string() + "'",
                          "output");
    }

    RunReport report;
    report.result = solve(experiment.function, experiment.contour, experiment.solver);
    const auto t_solved = Clock::now();

    // Sweep runs: same configuration at each node count.
    std::vector<std::pair<int, EigenResult>> sweep_results;
    for (int n : config.sweep) {
        SolverConfig cfg = experiment.solver;
        cfg.node_count = n;
        sweep_results.emplace_back(
            n, solve(experiment.function, experiment.contour, cfg));
    }
    const auto t_swept = Clock::now();

    if (config.verify) {
        report.verification = detail::verify_against_oracle(experiment, report.result);
        if (report.verification.performed && !report.verification.ok) {
            report.exit_code = 4;
        }
    }
    const auto t_verified = Clock::now();

    // eigenvalues.csv
    report.eigenvalues_csv = out_dir / "eigenvalues.csv";
    {
        std::ofstream out(report.eigenvalues_csv);
        out << "re_lambda,im_lambda,residual,status\n";
        for (const Eigenpair& pair : report.result.accepted) {
            out << detail::format_double(pair.lambda.real()) << ","
                << detail::format_double(pair.lambda.imag()) << ","
                << detail::format_double(pair.residual) << ",accepted\n";
        }
        for (const RejectedCandidate& cand : report.result.rejected) {
            out << detail::format_double(cand.lambda.real()) << ","
                << detail::format_double(cand.lambda.imag()) << ","
                << detail::format_double(cand.residual) << ","
                << to_string(cand.reason) << "\n";
        }
    }

    // singular_values.csv (main run first, then sweep runs)
    report.singular_values_csv = out_dir / "singular_values.csv";
    {
        Eigen::Index max_count = report.result.singular_values.size();
        for (const auto& [n, res] : sweep_results) {
            max_count = std::max(max_count, res.singular_values.size());
        }
        std::ofstream out(report.singular_values_csv);
        out << "N";
        for (Eigen::Index i = 0; i < max_count; ++i) {
            out << ",sigma_" << (i + 1);
        }
        out << "\n";
        auto write_row = [&](int n, const EigenResult& res) {
            out << n;
            for (Eigen::Index i = 0; i < max_count; ++i) {
                out << ",";
                if (i < res.singular_values.size()) {
                    out << detail::format_double(res.singular_values(i));
                }
            }
            out << "\n";
        };
        write_row(report.result.config_used.node_count, report.result);
        for (const auto& [n, res] : sweep_results) {
            write_row(n, res);
        }
    }

    // convergence.csv: tracked eigenvalue errors against the reference
    // set (oracle when verifying a polynomial, otherwise the largest-N
    // sweep run). Candidates are matched by nearest neighbor within
    // 0.1 * contour radius.
    report.convergence_csv = out_dir / "convergence.csv";
    if (!sweep_results.empty()) {
        std::vector<Complex> reference;
        bool reference_is_oracle = false;
        if (config.verify && experiment.polynomial) {
            for (Complex mu : report.verification.reference) {
                reference.push_back(mu);
            }
            reference_is_oracle = true;
        } else {
            const auto largest = std::max_element(
                sweep_results.begin(), sweep_results.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
            for (const Eigenpair& pair : largest->second.accepted) {
                reference.push_back(pair.lambda);
            }
        }
        std::sort(reference.begin(), reference.end(), detail::complex_less);
        const double cutoff = 0.1 * experiment.contour.characteristic_radius();

        std::ofstream out(report.convergence_csv);
        out << "N";
        for (std::size_t i = 0; i < reference.size(); ++i) {
            out << ",err_" << (i + 1);
        }
        out << ",untracked\n";
        const int reference_n =
            reference_is_oracle
                ? -1
                : std::max_element(sweep_results.begin(), sweep_results.end(),
                                   [](const auto& a, const auto& b) {
                                       return a.first < b.first;
                                   })
                      ->first;
        for (const auto& [n, res] : sweep_results) {
            if (!reference_is_oracle && n == reference_n) {
                continue;  // the reference row itself would be all zeros
            }
            out << n;
            std::vector<bool> used(res.accepted.size(), false);
            for (Complex mu : reference) {
                double best = std::numeric_limits<double>::infinity();
                std::size_t best_index = 0;
                for (std::size_t i = 0; i < res.accepted.size(); ++i) {
                    const double d = std::abs(res.accepted[i].lambda - mu);
                    if (d < best) {
                        best = d;
                        best_index = i;
                    }
                }
                out << ",";
                if (best <= cutoff) {
                    used[best_index] = true;
                    out << detail::format_double(best);
                }
            }
            std::size_t untracked = 0;
            for (bool u : used) {
                if (!u) {
                    ++untracked;
                }
            }
            out << "," << untracked << "\n";
        }
    }

    // summary.json with the fully resolved configuration.
    report.summary_json = out_dir / "summary.json";
    {
        const Index m = experiment.function.dimension();
        SolverConfig resolved = experiment.solver;
        if (resolved.identity_probe) {
            resolved.probe_count = static_cast<int>(m);
        } else if (resolved.probe_count == 0) {
            resolved.probe_count = static_cast<int>(
                std::min<Index>(m, std::max<Index>(2, (m + 9) / 10)));
        }
        if (resolved.max_probe_count == 0) {
            resolved.max_probe_count = static_cast<int>(m);
        }
        if (resolved.max_hankel_depth == 0) {
            resolved.max_hankel_depth = resolved.hankel_depth;
        }
        const Complex shift =
            resolved.shift.value_or(default_shift(experiment.contour));

        Json summary;
        summary["config"] = to_json(config);
        Json js;
        js["probe_count"] = resolved.probe_count;
        js["hankel_depth"] = resolved.hankel_depth;
        js["node_count"] = resolved.node_count;
        js["rank_tolerance"] = resolved.rank_tolerance;
        js["residual_tolerance"] = resolved.residual_tolerance;
        js["seed"] = resolved.seed;
        js["shift"] = detail::complex_to_json(shift);
        js["max_probe_count"] = resolved.max_probe_count;
        js["max_hankel_depth"] = resolved.max_hankel_depth;
        js["adaptive"] = resolved.adaptive;
        js["identity_probe"] = resolved.identity_probe;
        summary["resolved_solver"] = std::move(js);
        summary["dimension"] = static_cast<int>(m);
        summary["rank"] = static_cast<int>(report.result.rank);
        summary["config_used"] = {
            {"probe_count", report.result.config_used.probe_count},
            {"hankel_depth", report.result.config_used.hankel_depth},
            {"node_count", report.result.config_used.node_count}};
        Json accepted = Json::array();
        for (const Eigenpair& pair : report.result.accepted) {
            accepted.push_back({{"lambda", detail::complex_to_json(pair.lambda)},
                                {"residual", pair.residual}});
        }
        summary["accepted"] = std::move(accepted);
        Json rejected = Json::array();
        for (const RejectedCandidate& cand : report.result.rejected) {
            rejected.push_back({{"lambda", detail::complex_to_json(cand.lambda)},
                                {"residual", cand.residual},
                                {"reason", to_string(cand.reason)}});
        }
        summary["rejected"] = std::move(rejected);
        summary["warnings"] = report.result.warnings;
        if (report.verification.performed) {
            Json jv;
            jv["method"] = report.verification.method;
            jv["ok"] = report.verification.ok;
            jv["mismatches"] = report.verification.mismatches;
            Json refs = Json::array();
            for (Complex mu : report.verification.reference) {
                refs.push_back(detail::complex_to_json(mu));
            }
            jv["reference"] = std::move(refs);
            summary["verification"] = std::move(jv);
        }
        auto ms = [](auto a, auto b) {
            return std::chrono::duration_cast<std::chrono::milliseconds>(b - a).count();
        };
        summary["timings_ms"] = {{"solve", ms(t_start, t_solved)},
                                 {"sweep", ms(t_solved, t_swept)},
                                 {"verify", ms(t_swept, t_verified)},
                                 {"total", ms(t_start, Clock::now())}};
        std::ofstream out(report.summary_json);
        out << summary.dump(2) << "\n";
    }

    return report;
}

}  // namespace cieig
