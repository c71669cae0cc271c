// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cieig/contour.hpp"
#include "cieig/matrix_function.hpp"
#include "cieig/random.hpp"

namespace cieig {

/// Block of right-hand sides the resolvent is applied to: a random
/// m-by-l matrix, or the identity for the many-eigenvalue mode.
struct ProbeMatrix {
    enum class Origin { Random, Identity };

    ComplexMatrix columns;
    Origin origin = Origin::Random;

    Index rows() const noexcept { return columns.rows(); }
    Index count() const noexcept { return columns.cols(); }

    static ProbeMatrix random(Index rows, Index count, std::uint64_t seed)
    {
        if (count < 1 || count > rows) {
            throw std::invalid_argument("probe count must satisfy 1 <= l <= m");
        }
        UniformSampler rng(seed);
        return ProbeMatrix{rng.complex_matrix(rows, count), Origin::Random};
    }

    static ProbeMatrix identity(Index rows)
    {
        return ProbeMatrix{ComplexMatrix::Identity(rows, rows), Origin::Identity};
    }
};

/// Trapezoid approximations of the contour moments
///   A_p = 1/(2 pi i) * integral of (z - shift)^p T(z)^{-1} V dz,
/// for p = 0, ..., order-1.
struct MomentSet {
    std::vector<ComplexMatrix> moments;
    int node_count = 0;
    Complex shift = 0.0;
    long factorization_count = 0;  ///< instrumentation: LU factorizations performed

    int order() const noexcept { return static_cast<int>(moments.size()); }
};

/// Raised when T is numerically singular at a quadrature node, which
/// signals an eigenvalue on or very close to the contour.
class NodeFailureError : public std::runtime_error {
public:
    NodeFailureError(int node_index, Complex node_point, double rcond)
        : std::runtime_error("matrix numerically singular at quadrature node " +
                             std::to_string(node_index) + ", z = " +
                             detail::format_complex(node_point) + " (rcond " +
                             format_rcond(rcond) + ")"),
          node_index_(node_index),
          node_point_(node_point),
          rcond_(rcond)
    {
    }

    int node_index() const noexcept { return node_index_; }
    Complex node_point() const noexcept { return node_point_; }
    double rcond() const noexcept { return rcond_; }

private:
    static std::string format_rcond(double rcond)
    {
        std::ostringstream os;
        os.precision(2);
        os << std::scientific << rcond;
        return os.str();
    }

    int node_index_;
    Complex node_point_;
    double rcond_;
};

struct MomentOptions {
    bool parallel = false;  ///< solve nodes concurrently (same result bits)
};

/// Stabilizing shift used when none is requested: the center for circles
/// and ellipses, zero for custom curves.
inline Complex default_shift(const Contour& contour)
{
    return contour.kind() == Contour::Kind::Custom ? Complex(0.0) : contour.center();
}

namespace detail {

// Condition guard: reject nodes with cond(T) above ~1e-3 / machine eps.
inline constexpr double node_rcond_floor = 1e3 * std::numeric_limits<double>::epsilon();

// Nodes are accumulated in fixed chunks and chunk sums are combined in
// chunk order, so sequential and parallel runs produce identical bits.
inline constexpr int moment_chunk = 8;

struct ChunkResult {
    std::vector<ComplexMatrix> sums;
    long factorizations = 0;
};

inline ChunkResult accumulate_chunk(const NonlinearMatrixFunction& problem,
                                    const ProbeMatrix& probe,
                                    const std::vector<QuadratureNode>& nodes,
                                    int begin, int end, int total_nodes,
                                    int moment_count, Complex shift)
{
    const Index m = probe.rows();
    const Index l = probe.count();
    ChunkResult out;
    out.sums.assign(static_cast<std::size_t>(moment_count), ComplexMatrix::Zero(m, l));
    for (int j = begin; j < end; ++j) {
        const Complex z = nodes[static_cast<std::size_t>(j)].point;
        const ComplexMatrix t = problem.evaluate(z);
        Eigen::PartialPivLU<ComplexMatrix> lu(t);
        ++out.factorizations;
        const double rc = lu.rcond();
        if (!(rc >= node_rcond_floor)) {
            throw NodeFailureError(j, z, rc);
        }
        const ComplexMatrix x = lu.solve(probe.columns);
        const Complex base = nodes[static_cast<std::size_t>(j)].derivative /
                             Complex(0.0, static_cast<double>(total_nodes));
        const Complex y = z - shift;
        Complex power = 1.0;
        for (int p = 0; p < moment_count; ++p) {
            out.sums[static_cast<std::size_t>(p)].noalias() += x * (power * base);
            power *= y;
        }
    }
    return out;
}

}  // namespace detail

/// Computes the first moment_count trapezoid moments on node_count
/// equidistant nodes. One LU factorization per node is reused for all
/// probe columns and all moment orders.
inline MomentSet compute_moments(const NonlinearMatrixFunction& problem,
                                 const Contour& contour, const ProbeMatrix& probe,
                                 int node_count, int moment_count,
                                 Complex shift = 0.0, const MomentOptions& options = {})
{
    if (node_count < 1) {
        throw std::invalid_argument("node count must be at least 1");
    }
    if (moment_count < 1) {
        throw std::invalid_argument("moment count must be at least 1");
    }
    if (probe.rows() != problem.dimension()) {
        throw std::invalid_argument("probe rows must match the problem dimension");
    }

    const QuadratureNodes nodes = quadrature_nodes(contour, node_count);
    for (int j = 0; j < node_count; ++j) {
        if (problem.near_singular_point(nodes.nodes[static_cast<std::size_t>(j)].point)) {
            throw std::invalid_argument(
                "quadrature node " + std::to_string(j) + " hits a singular point at " +
                detail::format_complex(nodes.nodes[static_cast<std::size_t>(j)].point));
        }
    }

    const int chunk = detail::moment_chunk;
    const int chunk_count = (node_count + chunk - 1) / chunk;
    const unsigned workers =
        options.parallel && chunk_count > 1
            ? std::min<unsigned>(std::max(1u, std::thread::hardware_concurrency()),
                                 static_cast<unsigned>(chunk_count))
            : 1u;

    MomentSet out;
    out.node_count = node_count;
    out.shift = shift;
    out.moments.assign(static_cast<std::size_t>(moment_count),
                       ComplexMatrix::Zero(probe.rows(), probe.count()));

    // Chunks are processed in waves of `workers`; only the in-flight
    // chunk sums are held, and they fold into the totals in chunk order,
    // so parallel and sequential runs produce the same bits.
    std::vector<detail::ChunkResult> wave(workers);
    std::vector<std::exception_ptr> errors(workers);
    for (int wave_start = 0; wave_start < chunk_count;
         wave_start += static_cast<int>(workers)) {
        const int wave_size =
            std::min<int>(static_cast<int>(workers), chunk_count - wave_start);
        auto run_chunk = [&](int slot) {
            const int begin = (wave_start + slot) * chunk;
            const int end = std::min(node_count, begin + chunk);
            try {
                wave[static_cast<std::size_t>(slot)] =
                    detail::accumulate_chunk(problem, probe, nodes.nodes, begin, end,
                                             node_count, moment_count, shift);
            } catch (...) {
                errors[static_cast<std::size_t>(slot)] = std::current_exception();
            }
        };
        if (workers > 1) {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(wave_size));
            for (int slot = 0; slot < wave_size; ++slot) {
                pool.emplace_back(run_chunk, slot);
            }
            for (std::thread& t : pool) {
                t.join();
            }
        } else {
            run_chunk(0);
        }
        for (int slot = 0; slot < wave_size; ++slot) {
            if (errors[static_cast<std::size_t>(slot)]) {
                std::rethrow_exception(errors[static_cast<std::size_t>(slot)]);
            }
            detail::ChunkResult& r = wave[static_cast<std::size_t>(slot)];
            for (int p = 0; p < moment_count; ++p) {
                out.moments[static_cast<std::size_t>(p)] +=
                    r.sums[static_cast<std::size_t>(p)];
            }
            out.factorization_count += r.factorizations;
            r.sums.clear();
        }
    }
    return out;
}

/// Re-expands unshifted moments around a new expansion point:
/// A~_p = sum_{q<=p} C(p,q) (-z0)^{p-q} A_q. Equivalent to recomputing
/// the quadrature with the shift applied.
inline MomentSet apply_shift(const MomentSet& input, Complex shift)
{
    if (input.shift != Complex(0.0)) {
        throw std::invalid_argument("apply_shift expects moments computed with shift 0");
    }
    MomentSet out;
    out.node_count = input.node_count;
    out.shift = shift;
    out.factorization_count = input.factorization_count;
    const int order = input.order();
    out.moments.reserve(static_cast<std::size_t>(order));
    for (int p = 0; p < order; ++p) {
        ComplexMatrix acc = ComplexMatrix::Zero(input.moments[0].rows(),
                                                input.moments[0].cols());
        // Binomial weights kept in exact integer arithmetic.
        long long binom = 1;
        Complex factor = 1.0;  // (-z0)^(p-q), built from q=p downwards
        for (int q = p; q >= 0; --q) {
            acc += (static_cast<double>(binom) * factor) *
                   input.moments[static_cast<std::size_t>(q)];
            binom = binom * q / (p - q + 1);
            factor *= -shift;
        }
        out.moments.push_back(std::move(acc));
    }
    return out;
}

}  // namespace cieig
