// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cieig/matrix_function.hpp"

namespace cieig {

/// A smooth closed curve with 2*pi-periodic parameterization phi(t) and
/// derivative dphi(t). Circles and ellipses get closed-form membership
/// tests; custom curves fall back to a discrete winding number.
/// Immutable after construction.
class Contour {
public:
    enum class Kind { Circle, Ellipse, Custom };

    using PathFn = std::function<Complex(double)>;

    static Contour circle(Complex center, double radius)
    {
        if (!(radius > 0.0)) {
            throw std::invalid_argument("circle radius must be positive");
        }
        Contour c;
        c.kind_ = Kind::Circle;
        c.center_ = center;
        c.axis_x_ = radius;
        c.axis_y_ = radius;
        return c;
    }

    static Contour ellipse(Complex center, double semi_axis_x, double semi_axis_y)
    {
        if (!(semi_axis_x > 0.0) || !(semi_axis_y > 0.0)) {
            throw std::invalid_argument("ellipse semi-axes must be positive");
        }
        Contour c;
        c.kind_ = Kind::Ellipse;
        c.center_ = center;
        c.axis_x_ = semi_axis_x;
        c.axis_y_ = semi_axis_y;
        return c;
    }

    static Contour custom(PathFn phi, PathFn dphi)
    {
        if (!phi || !dphi) {
            throw std::invalid_argument("custom contour needs phi and dphi");
        }
        Contour c;
        c.kind_ = Kind::Custom;
        c.phi_ = std::move(phi);
        c.dphi_ = std::move(dphi);
        // Scale estimate for membership tolerances and CLI bookkeeping.
        Complex mean = 0.0;
        constexpr int samples = 64;
        std::vector<Complex> pts(samples);
        for (int j = 0; j < samples; ++j) {
            pts[j] = c.phi_(2.0 * std::numbers::pi * j / samples);
            mean += pts[j];
        }
        mean /= static_cast<double>(samples);
        double radius = 0.0;
        for (const Complex& p : pts) {
            radius = std::max(radius, std::abs(p - mean));
        }
        c.center_ = mean;
        c.axis_x_ = radius;
        c.axis_y_ = radius;
        return c;
    }

    Kind kind() const noexcept { return kind_; }

    Complex center() const noexcept { return center_; }

    /// Circle radius, largest ellipse semi-axis, or the sampled radius of
    /// a custom curve. Used as the length scale for tolerances.
    double characteristic_radius() const noexcept { return std::max(axis_x_, axis_y_); }

    Complex point(double t) const
    {
        switch (kind_) {
            case Kind::Circle:
                return center_ + axis_x_ * Complex(std::cos(t), std::sin(t));
            case Kind::Ellipse:
                return center_ + Complex(axis_x_ * std::cos(t), axis_y_ * std::sin(t));
            case Kind::Custom:
                return phi_(t);
        }
        return {};
    }

    Complex derivative(double t) const
    {
        switch (kind_) {
            case Kind::Circle:
                return axis_x_ * Complex(-std::sin(t), std::cos(t));
            case Kind::Ellipse:
                return Complex(-axis_x_ * std::sin(t), axis_y_ * std::cos(t));
            case Kind::Custom:
                return dphi_(t);
        }
        return {};
    }

    /// Interior membership. Points within relative distance 1e-9 of the
    /// curve count as outside; callers that care should check proximity
    /// separately (see boundary_coordinate).
    bool contains(Complex z) const
    {
        constexpr double on_curve_tol = 1e-9;
        switch (kind_) {
            case Kind::Circle:
            case Kind::Ellipse:
                return boundary_coordinate(z) < 1.0 - on_curve_tol;
            case Kind::Custom:
                return winding_number(z) != 0;
        }
        return false;
    }

    /// Normalized radial coordinate: < 1 inside, 1 on the curve, > 1
    /// outside. Only defined for circle and ellipse kinds.
    double boundary_coordinate(Complex z) const
    {
        const Complex d = z - center_;
        if (kind_ == Kind::Circle) {
            return std::abs(d) / axis_x_;
        }
        if (kind_ == Kind::Ellipse) {
            return std::hypot(d.real() / axis_x_, d.imag() / axis_y_);
        }
        throw std::logic_error("boundary_coordinate needs a circle or ellipse");
    }

    /// Discrete winding number of the curve around z, by the trapezoid
    /// sum of phi'/(phi - z). Starts at initial_nodes nodes and doubles
    /// until two consecutive node counts land within 0.25 of the same
    /// integer; a single near-integer value can be spurious for points
    /// moderately close to the curve.
    int winding_number(Complex z, int initial_nodes = 64) const
    {
        if (initial_nodes < 1) {
            throw std::invalid_argument("winding number needs at least one node");
        }
        long previous = std::numeric_limits<long>::max();
        long rounded = 0;
        for (int n = initial_nodes; n <= 32768; n *= 2) {
            Complex sum = 0.0;
            for (int j = 0; j < n; ++j) {
                const double t = 2.0 * std::numbers::pi * j / n;
                sum += derivative(t) / (point(t) - z);
            }
            const double value = (sum / Complex(0.0, static_cast<double>(n))).real();
            rounded = std::lround(value);
            const bool settled = std::abs(value - static_cast<double>(rounded)) <= 0.25;
            if (settled && rounded == previous) {
                break;
            }
            previous = settled ? rounded : std::numeric_limits<long>::max();
        }
        return static_cast<int>(rounded);
    }

private:
    Contour() = default;

    Kind kind_ = Kind::Circle;
    Complex center_ = 0.0;
    double axis_x_ = 1.0;
    double axis_y_ = 1.0;
    PathFn phi_;
    PathFn dphi_;
};

struct QuadratureNode {
    double t;
    Complex point;
    Complex derivative;
};

/// Equidistant parameter nodes t_j = 2*pi*j/N with the curve values and
/// tangents evaluated at each node.
struct QuadratureNodes {
    int count = 0;
    std::vector<QuadratureNode> nodes;
};

inline QuadratureNodes quadrature_nodes(const Contour& contour, int count)
{
    if (count < 1) {
        throw std::invalid_argument("node count must be at least 1");
    }
    QuadratureNodes out;
    out.count = count;
    out.nodes.reserve(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j) {
        const double t = 2.0 * std::numbers::pi * j / count;
        out.nodes.push_back({t, contour.point(t), contour.derivative(t)});
    }
    return out;
}

}  // namespace cieig
