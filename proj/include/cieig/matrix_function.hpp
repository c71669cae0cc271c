// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace cieig {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

namespace detail {

inline std::string format_complex(Complex z)
{
    std::ostringstream os;
    os.precision(17);
    os << "(" << z.real();
    if (z.imag() >= 0) {
        os << "+" << z.imag();
    } else {
        os << z.imag();
    }
    os << "i)";
    return os.str();
}

}  // namespace detail

/// Thrown when a matrix function is evaluated at one of its declared
/// singular points.
class SingularPointError : public std::domain_error {
public:
    explicit SingularPointError(Complex point)
        : std::domain_error("matrix function evaluated at singular point " +
                            detail::format_complex(point)),
          point_(point)
    {
    }

    Complex point() const noexcept { return point_; }

private:
    Complex point_;
};

/// A holomorphic matrix-valued function z -> T(z) on a domain of the
/// complex plane, given by an evaluation callback, an optional exact
/// derivative callback, and an explicit list of points where T is not
/// defined. Instances are immutable after construction and safe to
/// evaluate concurrently.
class NonlinearMatrixFunction {
public:
    using MatrixFn = std::function<ComplexMatrix(Complex)>;

    NonlinearMatrixFunction(Index dimension, MatrixFn evaluate,
                            MatrixFn derivative = {},
                            std::vector<Complex> singular_points = {})
        : dimension_(dimension),
          evaluate_(std::move(evaluate)),
          derivative_(std::move(derivative)),
          singular_points_(std::move(singular_points))
    {
        if (dimension_ <= 0) {
            throw std::invalid_argument("matrix dimension must be positive");
        }
        if (!evaluate_) {
            throw std::invalid_argument("evaluation callback must be set");
        }
    }

    Index dimension() const noexcept { return dimension_; }

    /// T(z). Throws SingularPointError when z coincides with a declared
    /// singular point (up to a relative tolerance of 1e-12).
    ComplexMatrix evaluate(Complex z) const
    {
        check_domain(z);
        ComplexMatrix out = evaluate_(z);
        if (out.rows() != dimension_ || out.cols() != dimension_) {
            throw std::logic_error("evaluation callback returned a matrix of size " +
                                   std::to_string(out.rows()) + "x" +
                                   std::to_string(out.cols()) + ", expected " +
                                   std::to_string(dimension_));
        }
        return out;
    }

    bool has_derivative() const noexcept { return static_cast<bool>(derivative_); }

    /// T'(z). Only available when an exact derivative was supplied.
    ComplexMatrix derivative(Complex z) const
    {
        if (!derivative_) {
            throw std::logic_error("matrix function has no derivative callback");
        }
        check_domain(z);
        return derivative_(z);
    }

    const std::vector<Complex>& singular_points() const noexcept
    {
        return singular_points_;
    }

    /// True when z is within relative distance 1e-12 of a singular point.
    bool near_singular_point(Complex z) const noexcept
    {
        for (Complex s : singular_points_) {
            if (std::abs(z - s) <= 1e-12 * (1.0 + std::abs(s))) {
                return true;
            }
        }
        return false;
    }

private:
    void check_domain(Complex z) const
    {
        for (Complex s : singular_points_) {
            if (std::abs(z - s) <= 1e-12 * (1.0 + std::abs(s))) {
                throw SingularPointError(s);
            }
        }
    }

    Index dimension_;
    MatrixFn evaluate_;
    MatrixFn derivative_;
    std::vector<Complex> singular_points_;
};

/// Matrix polynomial T(z) = sum_j T_j z^j, evaluated by Horner's scheme.
/// Keeps the coefficient list accessible so that companion-based
/// reference solvers can linearize it.
class PolynomialMatrixFunction : public NonlinearMatrixFunction {
public:
    explicit PolynomialMatrixFunction(std::vector<ComplexMatrix> coefficients)
        : PolynomialMatrixFunction(
              std::make_shared<const std::vector<ComplexMatrix>>(
                  std::move(coefficients)))
    {
    }

    const std::vector<ComplexMatrix>& coefficients() const noexcept
    {
        return *coefficients_;
    }

    /// Polynomial degree p (coefficient list has p+1 entries).
    Index degree() const noexcept
    {
        return static_cast<Index>(coefficients_->size()) - 1;
    }

private:
    using CoefficientPtr = std::shared_ptr<const std::vector<ComplexMatrix>>;

    explicit PolynomialMatrixFunction(CoefficientPtr coeffs)
        : NonlinearMatrixFunction(checked_dimension(*coeffs),
                                  make_evaluator(coeffs),
                                  make_derivative(coeffs)),
          coefficients_(std::move(coeffs))
    {
    }

    static Index checked_dimension(const std::vector<ComplexMatrix>& coeffs)
    {
        if (coeffs.empty()) {
            throw std::invalid_argument("polynomial needs at least one coefficient");
        }
        const Index m = coeffs.front().rows();
        for (const ComplexMatrix& c : coeffs) {
            if (c.rows() != m || c.cols() != m) {
                throw std::invalid_argument(
                    "polynomial coefficients must be square and of equal size");
            }
        }
        return m;
    }

    static MatrixFn make_evaluator(const CoefficientPtr& coeffs)
    {
        return [coeffs](Complex z) {
            const auto& c = *coeffs;
            ComplexMatrix acc = c.back();
            for (auto it = c.rbegin() + 1; it != c.rend(); ++it) {
                acc = (acc * z + *it).eval();
            }
            return acc;
        };
    }

    static MatrixFn make_derivative(const CoefficientPtr& coeffs)
    {
        return [coeffs](Complex z) {
            const auto& c = *coeffs;
            const Index m = c.front().rows();
            if (c.size() == 1) {
                return ComplexMatrix(ComplexMatrix::Zero(m, m));
            }
            // Horner on the formally differentiated coefficients j*T_j.
            ComplexMatrix acc =
                static_cast<double>(c.size() - 1) * c.back();
            for (std::size_t j = c.size() - 2; j >= 1; --j) {
                acc = (acc * z + static_cast<double>(j) * c[j]).eval();
            }
            return acc;
        };
    }

    CoefficientPtr coefficients_;
};

}  // namespace cieig
