// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <quadmath.h>

#include <Eigen/Dense>

#include "cieig/matrix_function.hpp"

namespace cieig {

/// Generalized pencil A - z B linearizing a matrix polynomial: identity
/// blocks on the first superdiagonal of A, the negated coefficients
/// -T_0, ..., -T_{p-1} in the last block row, and B = blockdiag(I, ...,
/// I, T_p).
struct CompanionPencil {
    ComplexMatrix a;
    ComplexMatrix b;
};

inline CompanionPencil companion_pencil(const PolynomialMatrixFunction& poly)
{
    const Index p = poly.degree();
    if (p < 1) {
        throw std::invalid_argument("companion pencil needs degree >= 1");
    }
    const auto& coeffs = poly.coefficients();
    if (coeffs.back().norm() == 0.0) {
        throw std::invalid_argument("leading coefficient is zero");
    }
    const Index m = poly.dimension();
    const Index n = p * m;

    CompanionPencil pencil;
    pencil.a = ComplexMatrix::Zero(n, n);
    pencil.b = ComplexMatrix::Identity(n, n);
    for (Index i = 0; i + 1 < p; ++i) {
        pencil.a.block(i * m, (i + 1) * m, m, m) = ComplexMatrix::Identity(m, m);
    }
    for (Index j = 0; j < p; ++j) {
        pencil.a.block((p - 1) * m, j * m, m, m) = -coeffs[static_cast<std::size_t>(j)];
    }
    pencil.b.block((p - 1) * m, (p - 1) * m, m, m) = coeffs.back();
    return pencil;
}

namespace detail {

// Eigenvalues of the pencil A - z B via a spectral transformation of the
// pencil to an ordinary eigenproblem. Infinite eigenvalues (singular
// leading coefficient) map to zero and are filtered.
inline std::vector<Complex> pencil_eigenvalues(const CompanionPencil& pencil,
                                               const ComplexMatrix& leading)
{
    const Index n = pencil.a.rows();
    Eigen::PartialPivLU<ComplexMatrix> lu_leading(leading);
    if (lu_leading.rcond() > 1e-12) {
        // Leading coefficient invertible: C = B^{-1} A touches only the
        // last block row.
        const Index m = leading.rows();
        ComplexMatrix c = pencil.a;
        c.bottomRows(m) = lu_leading.solve(pencil.a.bottomRows(m));
        Eigen::ComplexEigenSolver<ComplexMatrix> eig(c);
        if (eig.info() != Eigen::Success) {
            throw std::runtime_error("companion eigensolver failed");
        }
        std::vector<Complex> out;
        out.reserve(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i) {
            const Complex lambda = eig.eigenvalues()(i);
            if (std::abs(lambda) <= 1e12) {
                out.push_back(lambda);
            }
        }
        return out;
    }

    // Shift-and-invert guard: eigenvalues of (A - mu B)^{-1} B are
    // 1 / (lambda - mu); theta near zero marks infinite eigenvalues.
    const Complex candidates[] = {Complex(0.376, 0.283), Complex(-1.31, 0.717),
                                  Complex(2.11, -1.73), Complex(-0.57, -2.39)};
    for (Complex mu : candidates) {
        Eigen::PartialPivLU<ComplexMatrix> lu(pencil.a - mu * pencil.b);
        if (lu.rcond() <= 1e-12) {
            continue;
        }
        const ComplexMatrix c = lu.solve(pencil.b);
        Eigen::ComplexEigenSolver<ComplexMatrix> eig(c);
        if (eig.info() != Eigen::Success) {
            continue;
        }
        std::vector<Complex> out;
        for (Index i = 0; i < n; ++i) {
            const Complex theta = eig.eigenvalues()(i);
            if (std::abs(theta) > 1e-12) {
                const Complex lambda = mu + 1.0 / theta;
                if (std::abs(lambda) <= 1e12) {
                    out.push_back(lambda);
                }
            }
        }
        return out;
    }
    throw std::runtime_error("pencil eigenvalue transformation failed");
}

}  // namespace detail

/// Backward-error scale of the polynomial at lambda: sum of the
/// coefficient norms weighted by the powers of |lambda|.
inline double polynomial_scale(const PolynomialMatrixFunction& poly, Complex lambda)
{
    double scale = 0.0;
    double power = 1.0;
    for (const ComplexMatrix& c : poly.coefficients()) {
        scale += c.norm() * power;
        power *= std::abs(lambda);
    }
    return scale;
}

/// All finite eigenvalues of the matrix polynomial via its companion
/// linearization. Each returned value passes the backward-error
/// self-check sigma_min(T(lambda)) <= 1e-8 * polynomial_scale(lambda)
/// (for dimension 1 the value |T(lambda)| itself is the smallest
/// singular value, so the scale has to come from the coefficients).
inline std::vector<Complex> polyeig_oracle(const PolynomialMatrixFunction& poly)
{
    const CompanionPencil pencil = companion_pencil(poly);
    std::vector<Complex> raw =
        detail::pencil_eigenvalues(pencil, poly.coefficients().back());

    std::vector<Complex> checked;
    checked.reserve(raw.size());
    for (Complex lambda : raw) {
        const ComplexMatrix t = poly.evaluate(lambda);
        Eigen::BDCSVD<ComplexMatrix> svd(t);
        const Eigen::VectorXd& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 1e-8 * polynomial_scale(poly, lambda)) {
            checked.push_back(lambda);
        }
    }
    return checked;
}

namespace detail {

// Minimal quad-precision complex arithmetic. The trapezoid sum below
// cancels to a value that can be ~1e12 times smaller than its terms, so
// double (and even long double) accumulation would lose it.
struct QComplex {
    __float128 re = 0;
    __float128 im = 0;

    QComplex() = default;
    QComplex(__float128 r, __float128 i) : re(r), im(i) {}
    explicit QComplex(Complex z) : re(z.real()), im(z.imag()) {}

    Complex to_double() const
    {
        return {static_cast<double>(re), static_cast<double>(im)};
    }
};

inline QComplex operator+(QComplex x, QComplex y) { return {x.re + y.re, x.im + y.im}; }
inline QComplex operator-(QComplex x, QComplex y) { return {x.re - y.re, x.im - y.im}; }
inline QComplex operator*(QComplex x, QComplex y)
{
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
}
inline QComplex operator/(QComplex x, QComplex y)
{
    const __float128 d = y.re * y.re + y.im * y.im;
    return {(x.re * y.re + x.im * y.im) / d, (x.im * y.re - x.re * y.im) / d};
}

}  // namespace detail

/// Trapezoid-sum error for the pole function f(z) = (z - pole)^{-order}
/// on the circle |z| = radius: the exact contour integral minus the
/// N-node trapezoid sum, both evaluated directly. The exact integral is
/// 1 for a simple pole inside the circle and 0 otherwise (for order >= 2
/// the integrand has an antiderivative, so its residue vanishes).
inline Complex scalar_pole_error(Complex pole, double radius, int order,
                                 int node_count)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("radius must be positive");
    }
    if (order < 1) {
        throw std::invalid_argument("pole order must be at least 1");
    }
    if (node_count < 1) {
        throw std::invalid_argument("node count must be at least 1");
    }
    if (std::abs(std::abs(pole) - radius) <= 1e-12 * std::max(1.0, radius)) {
        throw std::domain_error("pole lies on the quadrature circle");
    }

    const bool inside = std::abs(pole) < radius;
    const detail::QComplex exact{(order == 1 && inside) ? __float128(1) : __float128(0),
                                 0};

    const detail::QComplex q_pole(pole);
    const __float128 q_radius = radius;
    const __float128 two_pi = 4 * acosq(0);
    detail::QComplex sum;
    for (int n = 0; n < node_count; ++n) {
        const __float128 theta = two_pi * n / node_count;
        const detail::QComplex omega{cosq(theta), sinq(theta)};
        const detail::QComplex z{q_radius * omega.re, q_radius * omega.im};
        detail::QComplex denom{1, 0};
        for (int j = 0; j < order; ++j) {
            denom = denom * (z - q_pole);
        }
        sum = sum + omega / denom;
    }
    const detail::QComplex trap{sum.re * q_radius / node_count,
                                sum.im * q_radius / node_count};
    return (exact - trap).to_double();
}

/// Raised when an iterative refinement fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NewtonResult {
    Complex lambda;
    ComplexVector vector;  ///< unit norm
    double residual;       ///< ||T(lambda) vector||
    int iterations = 0;
    std::vector<double> residual_history;  ///< residual before each step
};

/// Newton iteration on the bordered system [T(lambda) v; c^H v - 1] = 0
/// with the normalization direction c fixed to the (normalized) starting
/// vector. Stops when ||T(lambda) v|| <= 1e-12, throws after 50 steps.
inline NewtonResult newton_refine(const NonlinearMatrixFunction& problem,
                                  Complex lambda0, const ComplexVector& v0)
{
    if (!problem.has_derivative()) {
        throw std::invalid_argument("newton refinement needs a derivative");
    }
    const Index m = problem.dimension();
    if (v0.size() != m || v0.norm() == 0.0) {
        throw std::invalid_argument("starting vector must be nonzero of length m");
    }

    constexpr int max_iterations = 50;
    constexpr double tolerance = 1e-12;

    NewtonResult result;
    ComplexVector v = v0 / v0.norm();
    const ComplexVector c = v;
    Complex lambda = lambda0;

    for (int it = 0; it <= max_iterations; ++it) {
        const ComplexMatrix t = problem.evaluate(lambda);
        const ComplexVector r = t * v;
        const double residual = r.norm();
        result.residual_history.push_back(residual);
        if (residual <= tolerance) {
            result.lambda = lambda;
            const double norm = v.norm();
            result.vector = v / norm;
            result.residual = (problem.evaluate(lambda) * result.vector).norm();
            result.iterations = it;
            return result;
        }
        if (it == max_iterations) {
            break;
        }

        ComplexMatrix jac(m + 1, m + 1);
        jac.topLeftCorner(m, m) = t;
        jac.block(0, m, m, 1) = problem.derivative(lambda) * v;
        jac.block(m, 0, 1, m) = c.adjoint();
        jac(m, m) = 0.0;

        ComplexVector rhs(m + 1);
        rhs.head(m) = -r;
        rhs(m) = -(c.adjoint() * v)(0) + 1.0;

        const ComplexVector step = jac.partialPivLu().solve(rhs);
        if (!step.allFinite()) {
            throw ConvergenceError("newton step is not finite");
        }
        v += step.head(m);
        lambda += step(m);
    }
    throw ConvergenceError("newton refinement did not converge in 50 iterations");
}

}  // namespace cieig
