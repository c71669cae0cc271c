// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cieig/matrix_function.hpp"
#include "cieig/random.hpp"

namespace cieig {

/// Parameters for gallery problems. Which fields are required depends on
/// the problem; see make_gallery_problem.
struct GalleryParams {
    std::optional<Index> dimension;       ///< m
    std::optional<std::uint64_t> seed;    ///< RNG seed for random entries
    std::optional<double> a;              ///< rank-deficient-quadratic
    std::optional<double> b;              ///< rank-deficient-quadratic
    std::optional<double> tau = {};       ///< delay-2x2 (default 1)
    std::vector<Complex> diagonal;        ///< linear-diagonal entries
};

/// A gallery member. `function` is always usable; `polynomial` is set for
/// members that are matrix polynomials so that companion-based reference
/// solvers apply.
struct GalleryProblem {
    NonlinearMatrixFunction function;
    std::optional<PolynomialMatrixFunction> polynomial;
};

namespace detail {

inline Index require_dimension(const GalleryParams& params, const std::string& name)
{
    if (!params.dimension || *params.dimension <= 0) {
        throw std::invalid_argument("gallery problem '" + name +
                                    "' requires a positive dimension");
    }
    return *params.dimension;
}

inline std::uint64_t require_seed(const GalleryParams& params, const std::string& name)
{
    if (!params.seed) {
        throw std::invalid_argument("gallery problem '" + name + "' requires a seed");
    }
    return *params.seed;
}

inline GalleryProblem from_polynomial(std::vector<ComplexMatrix> coefficients)
{
    PolynomialMatrixFunction poly(std::move(coefficients));
    NonlinearMatrixFunction fn = poly;
    return GalleryProblem{std::move(fn), std::move(poly)};
}

inline GalleryProblem make_random_quadratic(const GalleryParams& params,
                                            const std::string& name, bool complex_entries)
{
    const Index m = require_dimension(params, name);
    UniformSampler rng(require_seed(params, name));
    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(3);
    for (int j = 0; j < 3; ++j) {
        coeffs.push_back(complex_entries ? rng.complex_matrix(m, m)
                                         : rng.real_matrix(m, m));
    }
    return from_polynomial(std::move(coeffs));
}

// T(z) = T0 + (z-a)(b-z) T1 with the first column of T0 zeroed, so that
// z=a and z=b are eigenvalues sharing the eigenvector e_1. Evaluation
// keeps the factored form, which makes T(a) e_1 and T(b) e_1 exact
// zeros; the expanded monomial coefficients are attached for companion
// linearization.
inline GalleryProblem make_rank_deficient_quadratic(const GalleryParams& params,
                                                    const std::string& name)
{
    const Index m = require_dimension(params, name);
    if (!params.a || !params.b) {
        throw std::invalid_argument("gallery problem '" + name +
                                    "' requires parameters a and b");
    }
    const double a = *params.a;
    const double b = *params.b;
    UniformSampler rng(require_seed(params, name));
    auto t0 = std::make_shared<ComplexMatrix>(rng.real_matrix(m, m));
    auto t1 = std::make_shared<ComplexMatrix>(rng.real_matrix(m, m));
    t0->col(0).setZero();

    auto eval = [t0, t1, a, b](Complex z) {
        ComplexMatrix out = *t0;
        out += ((z - a) * (b - z)) * (*t1);
        return out;
    };
    auto deriv = [t1, a, b](Complex z) {
        ComplexMatrix out = ((a + b) - 2.0 * z) * (*t1);
        return out;
    };

    std::vector<ComplexMatrix> coeffs;
    coeffs.reserve(3);
    coeffs.push_back(*t0 - (a * b) * (*t1));
    coeffs.push_back((a + b) * (*t1));
    coeffs.push_back(-(*t1));
    return GalleryProblem{NonlinearMatrixFunction(m, eval, deriv),
                          PolynomialMatrixFunction(std::move(coeffs))};
}

// Finite element discretization of a boundary eigenvalue problem with a
// rational boundary term: T(z) = T1 + z/(z-1) e_m e_m^T - z T3, where T1
// is m * tridiag(-1, 2, -1) with last diagonal entry m, and T3 is
// 1/(6m) * tridiag(1, 4, 1) with last diagonal entry 2/(6m). The first
// real eigenvalues sit near 4.48, 24.2, 63.7, 123.0, 202.2.
inline GalleryProblem make_fem_boundary(const GalleryParams& params,
                                        const std::string& name)
{
    const Index m = require_dimension(params, name);
    auto t1 = std::make_shared<ComplexMatrix>(ComplexMatrix::Zero(m, m));
    auto t3 = std::make_shared<ComplexMatrix>(ComplexMatrix::Zero(m, m));
    const double dm = static_cast<double>(m);
    for (Index i = 0; i < m; ++i) {
        (*t1)(i, i) = 2.0 * dm;
        (*t3)(i, i) = 4.0 / (6.0 * dm);
        if (i + 1 < m) {
            (*t1)(i, i + 1) = -dm;
            (*t1)(i + 1, i) = -dm;
            (*t3)(i, i + 1) = 1.0 / (6.0 * dm);
            (*t3)(i + 1, i) = 1.0 / (6.0 * dm);
        }
    }
    (*t1)(m - 1, m - 1) = dm;
    (*t3)(m - 1, m - 1) = 2.0 / (6.0 * dm);

    auto eval = [t1, t3, m](Complex z) {
        ComplexMatrix out = *t1 - z * (*t3);
        out(m - 1, m - 1) += z / (z - 1.0);
        return out;
    };
    auto deriv = [t3, m](Complex z) {
        ComplexMatrix out = -(*t3);
        const Complex w = z - 1.0;
        out(m - 1, m - 1) -= 1.0 / (w * w);
        return out;
    };
    return GalleryProblem{
        NonlinearMatrixFunction(m, eval, deriv, {Complex(1.0, 0.0)}), {}};
}

// Characteristic function of a two-dimensional delay system:
// T(z) = z I - T0 - T1 exp(-z tau).
inline GalleryProblem make_delay_2x2(const GalleryParams& params)
{
    const double tau = params.tau.value_or(1.0);
    auto t0 = std::make_shared<ComplexMatrix>(2, 2);
    auto t1 = std::make_shared<ComplexMatrix>(2, 2);
    *t0 << Complex(-5, 0), Complex(1, 0), Complex(2, 0), Complex(-6, 0);
    *t1 << Complex(-2, 0), Complex(1, 0), Complex(4, 0), Complex(-1, 0);

    auto eval = [t0, t1, tau](Complex z) {
        ComplexMatrix out = z * ComplexMatrix::Identity(2, 2);
        out -= *t0;
        out -= std::exp(-z * tau) * (*t1);
        return out;
    };
    auto deriv = [t1, tau](Complex z) {
        ComplexMatrix out = ComplexMatrix::Identity(2, 2);
        out += tau * std::exp(-z * tau) * (*t1);
        return out;
    };
    return GalleryProblem{NonlinearMatrixFunction(2, eval, deriv), {}};
}

// T(z) = z I - diag(d_1, ..., d_m), degree-one matrix polynomial.
inline GalleryProblem make_linear_diagonal(const GalleryParams& params,
                                           const std::string& name)
{
    if (params.diagonal.empty()) {
        throw std::invalid_argument("gallery problem '" + name +
                                    "' requires diagonal entries");
    }
    const Index m = static_cast<Index>(params.diagonal.size());
    if (params.dimension && *params.dimension != m) {
        throw std::invalid_argument("gallery problem '" + name +
                                    "': dimension does not match diagonal length");
    }
    ComplexMatrix c0 = ComplexMatrix::Zero(m, m);
    for (Index i = 0; i < m; ++i) {
        c0(i, i) = -params.diagonal[static_cast<std::size_t>(i)];
    }
    std::vector<ComplexMatrix> coeffs;
    coeffs.push_back(std::move(c0));
    coeffs.push_back(ComplexMatrix::Identity(m, m));
    return from_polynomial(std::move(coeffs));
}

}  // namespace detail

/// Construct one of the named test problems. Random entries are uniform
/// on [0,1) per entry (independent real and imaginary parts in the
/// complex case), drawn row by row per coefficient, so a fixed seed
/// reproduces the problem exactly.
///
/// Names and their required parameters:
///   random-quadratic-real     dimension, seed
///   random-quadratic-complex  dimension, seed
///   fem-boundary              dimension
///   rank-deficient-quadratic  dimension, seed, a, b
///   delay-2x2                 tau (optional, default 1)
///   linear-diagonal           diagonal
inline GalleryProblem make_gallery_problem(const std::string& name,
                                           const GalleryParams& params = {})
{
    if (name == "random-quadratic-real") {
        return detail::make_random_quadratic(params, name, false);
    }
    if (name == "random-quadratic-complex") {
        return detail::make_random_quadratic(params, name, true);
    }
    if (name == "fem-boundary") {
        return detail::make_fem_boundary(params, name);
    }
    if (name == "rank-deficient-quadratic") {
        return detail::make_rank_deficient_quadratic(params, name);
    }
    if (name == "delay-2x2") {
        return detail::make_delay_2x2(params);
    }
    if (name == "linear-diagonal") {
        return detail::make_linear_diagonal(params, name);
    }
    throw std::invalid_argument("unknown gallery problem '" + name + "'");
}

}  // namespace cieig
