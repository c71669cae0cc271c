// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "cieig/matrix_function.hpp"

namespace cieig {

/// Reproducible matrix entries: mt19937_64 mapped to [0,1) through the
/// top 53 bits, so results do not depend on the standard library's
/// distribution implementation.
class UniformSampler {
public:
    explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw from [0, 1).
    double real()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Independent uniform real and imaginary parts, each in [0, 1).
    Complex complex_unit_square()
    {
        const double re = real();
        const double im = real();
        return {re, im};
    }

    /// m-by-n real matrix with uniform [0,1) entries, filled row by row.
    ComplexMatrix real_matrix(Index rows, Index cols)
    {
        ComplexMatrix out(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                out(i, j) = Complex(real(), 0.0);
            }
        }
        return out;
    }

    /// m-by-n complex matrix, entries drawn from the unit square, row by row.
    ComplexMatrix complex_matrix(Index rows, Index cols)
    {
        ComplexMatrix out(rows, cols);
        for (Index i = 0; i < rows; ++i) {
            for (Index j = 0; j < cols; ++j) {
                out(i, j) = complex_unit_square();
            }
        }
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace cieig
