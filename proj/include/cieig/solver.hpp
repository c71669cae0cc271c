// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cieig/contour.hpp"
#include "cieig/matrix_function.hpp"
#include "cieig/moments.hpp"

namespace cieig {

/// Knobs for the contour-integral eigensolver. Zero-valued caps mean
/// "use the module default" (documented per field).
struct SolverConfig {
    int probe_count = 0;        ///< l; 0 selects ceil(m/10) clamped to [2, m]
    int hankel_depth = 1;       ///< K; 1 is the plain (non-Hankel) algorithm
    int node_count = 150;       ///< N quadrature nodes
    double rank_tolerance = 1e-4;      ///< cutoff on sigma_i / sigma_1
    double residual_tolerance = 1e-1;  ///< acceptance bound on ||T(lambda) v||
    std::uint64_t seed = 1;            ///< probe matrix seed
    std::optional<Complex> shift;      ///< expansion point; default per contour
    int max_probe_count = 0;    ///< adaptive cap on l; 0 means m
    int max_hankel_depth = 0;   ///< adaptive cap on K; 0 means the initial K
    bool adaptive = true;       ///< grow l (then K) while no rank gap appears
    bool identity_probe = false;  ///< many-eigenvalue mode: V = I_m, l = m
};

/// Rank-revealing part of the block-Hankel matrix B0 = U Sigma W^H,
/// truncated at the detected rank k.
struct ReducedBasis {
    ComplexMatrix left;    ///< (K m)-by-k, orthonormal columns
    Eigen::VectorXd sigma; ///< retained singular values, descending
    ComplexMatrix right;   ///< (K l)-by-k, orthonormal columns
    Index rank = 0;
    Eigen::VectorXd all_singular_values;  ///< full list, unscaled (diagnostic)
};

enum class RejectionReason { OutsideContour, ResidualTooLarge };

inline const char* to_string(RejectionReason reason)
{
    return reason == RejectionReason::OutsideContour ? "outside-contour"
                                                     : "residual-too-large";
}

struct Eigenpair {
    Complex lambda;
    ComplexVector vector;  ///< unit 2-norm
    double residual;       ///< ||T(lambda) vector||_2
};

struct RejectedCandidate {
    Complex lambda;
    ComplexVector vector;
    double residual;
    RejectionReason reason;
};

struct ResolvedConfig {
    int probe_count = 0;
    int hankel_depth = 0;
    int node_count = 0;
};

struct EigenResult {
    std::vector<Eigenpair> accepted;
    std::vector<RejectedCandidate> rejected;
    Index rank = 0;                      ///< detected k
    Eigen::VectorXd singular_values;     ///< all singular values of B0
    ResolvedConfig config_used;          ///< (l, K, N) after adaptation
    std::vector<std::string> warnings;
};

/// Raised when the adaptive loop exhausts its growth caps without finding
/// a gap in the singular values.
class RankGapError : public std::runtime_error {
public:
    RankGapError(Eigen::VectorXd singular_values, ResolvedConfig config)
        : std::runtime_error(
              "no rank gap found: all " + std::to_string(singular_values.size()) +
              " singular values above tolerance at l=" +
              std::to_string(config.probe_count) + ", K=" +
              std::to_string(config.hankel_depth)),
          singular_values_(std::move(singular_values)),
          config_(config)
    {
    }

    const Eigen::VectorXd& singular_values() const noexcept { return singular_values_; }
    ResolvedConfig config() const noexcept { return config_; }

private:
    Eigen::VectorXd singular_values_;
    ResolvedConfig config_;
};

/// Raised when the dense eigensolver fails on the reduced matrix.
class EigensolverError : public std::runtime_error {
public:
    explicit EigensolverError(ComplexMatrix reduced)
        : std::runtime_error("eigensolver failed on the reduced " +
                             std::to_string(reduced.rows()) + "x" +
                             std::to_string(reduced.cols()) + " matrix"),
          reduced_(std::move(reduced))
    {
    }

    const ComplexMatrix& reduced() const noexcept { return reduced_; }

private:
    ComplexMatrix reduced_;
};

/// Assembles the block-Hankel pair: block (i, j) of B0 is A_{i+j}, block
/// (i, j) of B1 is A_{i+j+1}. depth == 1 reproduces (A_0, A_1).
inline std::pair<ComplexMatrix, ComplexMatrix> build_hankel_pencil(
    const MomentSet& moments, int depth)
{
    if (depth < 1) {
        throw std::invalid_argument("hankel depth must be at least 1");
    }
    if (moments.order() < 2 * depth) {
        throw std::invalid_argument("hankel pencil of depth " + std::to_string(depth) +
                                    " needs " + std::to_string(2 * depth) +
                                    " moments, got " + std::to_string(moments.order()));
    }
    const Index m = moments.moments[0].rows();
    const Index l = moments.moments[0].cols();
    ComplexMatrix b0(depth * m, depth * l);
    ComplexMatrix b1(depth * m, depth * l);
    for (int i = 0; i < depth; ++i) {
        for (int j = 0; j < depth; ++j) {
            b0.block(i * m, j * l, m, l) =
                moments.moments[static_cast<std::size_t>(i + j)];
            b1.block(i * m, j * l, m, l) =
                moments.moments[static_cast<std::size_t>(i + j + 1)];
        }
    }
    return {std::move(b0), std::move(b1)};
}

/// Number of leading values strictly above the tolerance. Input must be
/// sorted descending.
inline Index rank_test(const Eigen::VectorXd& singular_values, double tolerance)
{
    Index k = 0;
    while (k < singular_values.size() && singular_values(k) > tolerance) {
        ++k;
    }
    return k;
}

struct Reduction {
    ReducedBasis basis;
    ComplexMatrix reduced;  ///< D = V0^H B1 W0 Sigma0^{-1}, k-by-k
};

/// SVD of B0 truncated at the detected rank, and the reduced matrix whose
/// eigenvalues are the (shifted) eigenvalues inside the contour. The rank
/// cutoff is relative: values are scaled by 1/sigma_1 before the test.
/// rank 0 is a valid outcome meaning no eigenvalues inside.
inline Reduction reduce(const ComplexMatrix& b0, const ComplexMatrix& b1,
                        double rank_tolerance)
{
    if (b0.rows() != b1.rows() || b0.cols() != b1.cols()) {
        throw std::invalid_argument("hankel pair must have matching shapes");
    }
    Eigen::BDCSVD<ComplexMatrix> svd(b0, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd sv = svd.singularValues();

    Reduction out;
    out.basis.all_singular_values = sv;
    Index k = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
        k = rank_test((sv / sv(0)).eval(), rank_tolerance);
    }
    out.basis.rank = k;
    if (k == 0) {
        out.basis.left = ComplexMatrix(b0.rows(), 0);
        out.basis.right = ComplexMatrix(b0.cols(), 0);
        out.basis.sigma = Eigen::VectorXd(0);
        out.reduced = ComplexMatrix(0, 0);
        return out;
    }
    out.basis.left = svd.matrixU().leftCols(k);
    out.basis.right = svd.matrixV().leftCols(k);
    out.basis.sigma = sv.head(k);

    ComplexMatrix d = out.basis.left.adjoint() * b1 * out.basis.right;
    for (Index i = 0; i < k; ++i) {
        d.col(i) /= out.basis.sigma(i);
    }
    out.reduced = std::move(d);
    return out;
}

/// Solves the reduced eigenproblem and maps candidates back: lambda_j is
/// the j-th eigenvalue plus the moment shift, v_j is the top m-by-k block
/// of the left basis applied to the j-th eigenvector, normalized to unit
/// length. Candidates are split into accepted and rejected by the
/// interior and residual tests.
inline EigenResult extract_eigenpairs(const ComplexMatrix& reduced,
                                      const ReducedBasis& basis,
                                      const NonlinearMatrixFunction& problem,
                                      const Contour& contour,
                                      double residual_tolerance, int hankel_depth,
                                      Complex shift = 0.0)
{
    EigenResult result;
    result.rank = basis.rank;
    result.singular_values = basis.all_singular_values;
    if (basis.rank == 0) {
        return result;
    }
    if (reduced.rows() != basis.rank || reduced.cols() != basis.rank) {
        throw std::invalid_argument("reduced matrix does not match basis rank");
    }
    if (basis.left.rows() % hankel_depth != 0) {
        throw std::invalid_argument("left basis rows not divisible by hankel depth");
    }

    Eigen::ComplexEigenSolver<ComplexMatrix> eig(reduced);
    if (eig.info() != Eigen::Success) {
        throw EigensolverError(reduced);
    }

    const Index m = problem.dimension();
    const ComplexMatrix top = basis.left.topRows(m);
    constexpr double inf = std::numeric_limits<double>::infinity();

    for (Index j = 0; j < basis.rank; ++j) {
        const Complex lambda = eig.eigenvalues()(j) + shift;
        ComplexVector v = top * eig.eigenvectors().col(j);
        const double norm = v.norm();
        double residual = inf;
        if (norm > 0.0) {
            v /= norm;
            if (!problem.near_singular_point(lambda)) {
                residual = (problem.evaluate(lambda) * v).norm();
            }
        }

        if (contour.kind() != Contour::Kind::Custom) {
            const double rho = contour.boundary_coordinate(lambda);
            if (std::abs(rho - 1.0) <= 1e-9) {
                result.warnings.push_back("candidate eigenvalue " +
                                          detail::format_complex(lambda) +
                                          " lies on the contour within tolerance");
            }
        }

        if (!contour.contains(lambda)) {
            result.rejected.push_back(
                {lambda, std::move(v), residual, RejectionReason::OutsideContour});
        } else if (!(residual <= residual_tolerance)) {
            result.rejected.push_back(
                {lambda, std::move(v), residual, RejectionReason::ResidualTooLarge});
        } else {
            result.accepted.push_back({lambda, std::move(v), residual});
        }
    }
    return result;
}

namespace detail {

inline std::uint64_t probe_seed(std::uint64_t base, int attempt)
{
    // Fresh deterministic probe per adaptive attempt; attempt 0 is the
    // user seed itself.
    return base + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(attempt);
}

inline void check_contour_clear_of_singular_points(
    const NonlinearMatrixFunction& problem, const Contour& contour)
{
    if (problem.singular_points().empty()) {
        return;
    }
    constexpr int samples = 256;
    const double scale = std::max(1.0, contour.characteristic_radius());
    for (Complex s : problem.singular_points()) {
        double dist = std::numeric_limits<double>::infinity();
        for (int j = 0; j < samples; ++j) {
            const double t = 2.0 * std::numbers::pi * j / samples;
            dist = std::min(dist, std::abs(contour.point(t) - s));
        }
        if (dist <= 1e-9 * scale) {
            throw std::invalid_argument("contour passes through singular point " +
                                        detail::format_complex(s));
        }
    }
}

}  // namespace detail

/// Full pipeline: probe construction, moment quadrature, block-Hankel
/// assembly, rank-revealing reduction, and eigenpair extraction. When no
/// rank gap shows up (k == K*l) and config.adaptive is set, the probe
/// count grows by half (up to max_probe_count), then the Hankel depth by
/// one (up to max_hankel_depth), regenerating the moments each time.
inline EigenResult solve(const NonlinearMatrixFunction& problem,
                         const Contour& contour, const SolverConfig& config = {})
{
    const Index m = problem.dimension();
    if (config.hankel_depth < 1) {
        throw std::invalid_argument("hankel depth must be at least 1");
    }
    if (config.node_count < 1) {
        throw std::invalid_argument("node count must be at least 1");
    }
    if (!(config.rank_tolerance > 0.0) || !(config.residual_tolerance > 0.0)) {
        throw std::invalid_argument("tolerances must be positive");
    }
    if (config.probe_count < 0 || config.probe_count > m) {
        throw std::invalid_argument("probe count must satisfy 1 <= l <= m");
    }
    detail::check_contour_clear_of_singular_points(problem, contour);

    int l = config.probe_count;
    if (config.identity_probe) {
        l = static_cast<int>(m);
    } else if (l == 0) {
        l = static_cast<int>(std::min<Index>(
            m, std::max<Index>(2, (m + 9) / 10)));
    }
    const int max_l = std::min<Index>(
        m, config.max_probe_count > 0 ? config.max_probe_count : m);
    int depth = config.hankel_depth;
    const int max_depth = std::max(depth, config.max_hankel_depth);
    const Complex shift = config.shift.value_or(default_shift(contour));

    for (int attempt = 0;; ++attempt) {
        const ProbeMatrix probe =
            config.identity_probe
                ? ProbeMatrix::identity(m)
                : ProbeMatrix::random(m, l, detail::probe_seed(config.seed, attempt));
        const MomentSet moments = compute_moments(problem, contour, probe,
                                                  config.node_count, 2 * depth, shift);
        auto [b0, b1] = build_hankel_pencil(moments, depth);
        Reduction red = reduce(b0, b1, config.rank_tolerance);

        const bool full_rank = red.basis.rank == static_cast<Index>(depth) * l;
        if (full_rank && config.adaptive) {
            if (!config.identity_probe && l < max_l) {
                l = std::min(max_l, l + std::max(1, (l + 1) / 2));
                continue;
            }
            if (depth < max_depth) {
                ++depth;
                continue;
            }
            throw RankGapError(red.basis.all_singular_values,
                               {l, depth, config.node_count});
        }

        EigenResult result =
            extract_eigenpairs(red.reduced, red.basis, problem, contour,
                               config.residual_tolerance, depth, shift);
        result.config_used = {l, depth, config.node_count};
        return result;
    }
}

/// Diagnostic for accepted simple eigenpairs: w^H T'(lambda) v with w the
/// smallest left singular vector of T(lambda) and both vectors unit norm.
/// A magnitude far from zero indicates a well-conditioned simple
/// eigenvalue that can be normalized to w^H T'(lambda) v = 1.
inline Complex normalization_diagnostic(const NonlinearMatrixFunction& problem,
                                        Complex lambda, const ComplexVector& v)
{
    if (!problem.has_derivative()) {
        throw std::invalid_argument("normalization diagnostic needs a derivative");
    }
    const ComplexMatrix t = problem.evaluate(lambda);
    Eigen::BDCSVD<ComplexMatrix> svd(t, Eigen::ComputeFullU);
    const ComplexVector w = svd.matrixU().col(t.rows() - 1);
    const ComplexVector vn = v / v.norm();
    return (w.adjoint() * problem.derivative(lambda) * vn)(0);
}

}  // namespace cieig
