// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include "cieig/contour.hpp"
#include "cieig/random.hpp"

using namespace cieig;

TEST_CASE("unit circle quarter nodes are exact")
{
    const Contour c = Contour::circle(0.0, 1.0);
    const QuadratureNodes nodes = quadrature_nodes(c, 4);
    REQUIRE(nodes.count == 4);
    const Complex points[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const Complex tangents[] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
    for (int j = 0; j < 4; ++j) {
        REQUIRE(std::abs(nodes.nodes[j].point - points[j]) < 1e-15);
        REQUIRE(std::abs(nodes.nodes[j].derivative - tangents[j]) < 1e-15);
        REQUIRE(nodes.nodes[j].t == Approx(2.0 * std::numbers::pi * j / 4));
    }
}

TEST_CASE("single node sits at the rightmost point")
{
    const Contour c = Contour::circle(Complex(-1, 0), 6.0);
    const QuadratureNodes nodes = quadrature_nodes(c, 1);
    REQUIRE(nodes.count == 1);
    REQUIRE(nodes.nodes[0].t == 0.0);
    REQUIRE(std::abs(nodes.nodes[0].point - Complex(5, 0)) < 1e-15);
    REQUIRE(std::abs(nodes.nodes[0].derivative - Complex(0, 6)) < 1e-15);
}

TEST_CASE("ellipse nodes at t = 0 and pi")
{
    const Contour c = Contour::ellipse(0.0, 2.0, 1.0);
    const QuadratureNodes nodes = quadrature_nodes(c, 2);
    REQUIRE(std::abs(nodes.nodes[0].point - Complex(2, 0)) < 1e-15);
    REQUIRE(std::abs(nodes.nodes[1].point - Complex(-2, 0)) < 2e-15);
}

TEST_CASE("degenerate contours and node counts are rejected")
{
    const Contour c = Contour::circle(0.0, 1.0);
    REQUIRE_THROWS_AS(quadrature_nodes(c, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(Contour::circle(0.0, 0.0), std::invalid_argument);
    REQUIRE_THROWS_AS(Contour::ellipse(0.0, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("parameterizations close up and match finite differences")
{
    const auto phi = [](double t) {
        return Complex(0.3, -0.1) + 1.4 * Complex(std::cos(t), std::sin(t));
    };
    const auto dphi = [](double t) {
        return 1.4 * Complex(-std::sin(t), std::cos(t));
    };
    const Contour contours[] = {Contour::circle(Complex(0.5, 0.5), 2.0),
                                Contour::ellipse(Complex(-1, 0), 2.0, 0.5),
                                Contour::custom(phi, dphi)};
    UniformSampler rng(7);
    for (const Contour& c : contours) {
        REQUIRE(std::abs(c.point(0.0) - c.point(2.0 * std::numbers::pi)) < 1e-13);
        for (int trial = 0; trial < 8; ++trial) {
            const double t = 2.0 * std::numbers::pi * rng.real();
            const double h = 1e-6;
            const Complex fd = (c.point(t + h) - c.point(t - h)) / (2.0 * h);
            REQUIRE(std::abs(fd - c.derivative(t)) / std::abs(c.derivative(t)) < 1e-6);
        }
    }
}

TEST_CASE("circle nodes equal center plus radius times roots of unity")
{
    const Complex center(0.7, -0.3);
    const double radius = 2.5;
    const Contour c = Contour::circle(center, radius);
    const int n = 12;
    const QuadratureNodes nodes = quadrature_nodes(c, n);
    for (int j = 0; j < n; ++j) {
        const Complex expected =
            center + radius * std::polar(1.0, 2.0 * std::numbers::pi * j / n);
        REQUIRE(std::abs(nodes.nodes[j].point - expected) < 1e-14 * radius);
    }
}

TEST_CASE("closed-form membership tests")
{
    REQUIRE(Contour::circle(0.0, 0.33).contains(Complex(0.1, 0)));
    REQUIRE_FALSE(Contour::circle(Complex(-1, 0), 6.0).contains(Complex(10, 0)));
    REQUIRE_FALSE(Contour::ellipse(0.0, 2.0, 1.0).contains(Complex(0, 1.5)));
    REQUIRE(Contour::ellipse(0.0, 2.0, 1.0).contains(Complex(1.5, 0)));
    // Points on the curve count as outside.
    REQUIRE_FALSE(Contour::circle(0.0, 1.0).contains(Complex(1.0, 0)));
}

TEST_CASE("winding number agrees with the closed-form circle test")
{
    const Complex center(0.3, 0.2);
    const double radius = 1.7;
    const Contour closed_form = Contour::circle(center, radius);
    const Contour as_custom = Contour::custom(
        [=](double t) { return center + radius * Complex(std::cos(t), std::sin(t)); },
        [=](double t) { return radius * Complex(-std::sin(t), std::cos(t)); });

    UniformSampler rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const Complex z = center + Complex(5.0 * rng.real() - 2.5, 5.0 * rng.real() - 2.5);
        const double rho = std::abs(z - center) / radius;
        if (std::abs(rho - 1.0) <= 1e-9) {
            continue;
        }
        CAPTURE(z, rho);
        REQUIRE(as_custom.contains(z) == closed_form.contains(z));
    }

    // Deliberately close to the curve: the node-doubling must resolve it.
    for (double rho : {0.99, 0.999, 0.9999, 1.0001, 1.001, 1.01}) {
        for (double angle : {0.1, 2.3, 4.0}) {
            const Complex z = center + radius * rho * std::polar(1.0, angle);
            CAPTURE(rho, angle);
            REQUIRE(as_custom.contains(z) == closed_form.contains(z));
        }
    }
}

TEST_CASE("winding number of an ellipse traced as a custom curve")
{
    const Contour e = Contour::ellipse(Complex(1, 1), 2.0, 0.5);
    const Contour as_custom = Contour::custom(
        [](double t) {
            return Complex(1, 1) + Complex(2.0 * std::cos(t), 0.5 * std::sin(t));
        },
        [](double t) { return Complex(-2.0 * std::sin(t), 0.5 * std::cos(t)); });
    REQUIRE(as_custom.winding_number(Complex(1, 1)) == 1);
    REQUIRE(as_custom.winding_number(Complex(1, 1.65)) == 0);
    REQUIRE(as_custom.contains(Complex(1, 1.4)) == e.contains(Complex(1, 1.4)));
    REQUIRE(as_custom.contains(Complex(2.5, 1.2)) == e.contains(Complex(2.5, 1.2)));
}
