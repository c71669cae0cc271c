// Copyright (c) 2026 The cieig Authors.
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include "cieig/gallery.hpp"
#include "cieig/moments.hpp"
#include "test_helpers.hpp"

using namespace cieig;
using cieig_test::reference_moment;

namespace {

NonlinearMatrixFunction scalar_problem(Complex root)
{
    return NonlinearMatrixFunction(
        1,
        [root](Complex z) {
            ComplexMatrix t(1, 1);
            t(0, 0) = z - root;
            return t;
        },
        [root](Complex) {
            ComplexMatrix t(1, 1);
            t(0, 0) = 1.0;
            return t;
        });
}

NonlinearMatrixFunction shifted_identity(Index m, ComplexVector diag)
{
    return NonlinearMatrixFunction(m, [diag](Complex z) {
        ComplexMatrix t = ComplexMatrix::Zero(diag.size(), diag.size());
        for (Index i = 0; i < diag.size(); ++i) {
            t(i, i) = z - diag(i);
        }
        return t;
    });
}

}  // namespace

TEST_CASE("trapezoid moments are exact for the pure resolvent of zI")
{
    const NonlinearMatrixFunction problem = shifted_identity(2, ComplexVector::Zero(2));
    const Contour circle = Contour::circle(0.0, 1.0);
    const MomentSet moments =
        compute_moments(problem, circle, ProbeMatrix::identity(2), 8, 2);
    REQUIRE((moments.moments[0] - ComplexMatrix::Identity(2, 2)).norm() < 1e-14);
    REQUIRE(moments.moments[1].norm() < 1e-15);
}

TEST_CASE("scalar moment reproduces the geometric sum")
{
    const NonlinearMatrixFunction problem = scalar_problem(Complex(0.5, 0));
    const Contour circle = Contour::circle(0.0, 1.0);
    ProbeMatrix probe{ComplexMatrix::Ones(1, 1), ProbeMatrix::Origin::Identity};
    const MomentSet moments = compute_moments(problem, circle, probe, 10, 1);

    // 1/(1 - 0.5^10) = 1024/1023 by the geometric-sum identity.
    const Complex expected(1024.0 / 1023.0, 0.0);
    REQUIRE(std::abs(moments.moments[0](0, 0) - expected) < 1e-14);

    const ComplexMatrix reference =
        reference_moment(problem, circle, probe.columns, 10, 0);
    REQUIRE(std::abs(moments.moments[0](0, 0) - reference(0, 0)) < 1e-13);
}

TEST_CASE("diagonal linear problem matches the direct-summation reference")
{
    ComplexVector diag(2);
    diag << Complex(0.1, 0), Complex(2.0, 0);
    const NonlinearMatrixFunction problem = shifted_identity(2, diag);
    const Contour circle = Contour::circle(0.0, 1.0);
    const ProbeMatrix probe = ProbeMatrix::identity(2);
    const MomentSet moments = compute_moments(problem, circle, probe, 16, 2);

    for (int p = 0; p < 2; ++p) {
        const ComplexMatrix reference =
            reference_moment(problem, circle, probe.columns, 16, p);
        REQUIRE((moments.moments[p] - reference).norm() < 1e-13);
    }
    // Interior eigenvalue: filter weight 1/(1 - 0.1^16) is 1 to machine
    // precision. Exterior eigenvalue: weight 1/(1 - 2^16) = -1/65535.
    REQUIRE(std::abs(moments.moments[0](0, 0) - 1.0) < 1e-14);
    REQUIRE(moments.moments[0](1, 1).real() == Approx(-1.0 / 65535.0));
    REQUIRE(std::abs(moments.moments[1](0, 0) - Complex(0.1, 0)) < 1e-14);
}

TEST_CASE("one factorization per node regardless of probes and orders")
{
    GalleryParams params;
    params.tau = 1.0;
    const auto delay = make_gallery_problem("delay-2x2", params);
    const Contour circle = Contour::circle(Complex(-1, 0), 6.0);

    const MomentSet a =
        compute_moments(delay.function, circle, ProbeMatrix::identity(2), 37, 4);
    REQUIRE(a.factorization_count == 37);
    const MomentSet b = compute_moments(delay.function, circle,
                                        ProbeMatrix::random(2, 1, 5), 37, 2);
    REQUIRE(b.factorization_count == 37);
}

TEST_CASE("singular node reports its index and location")
{
    const NonlinearMatrixFunction problem = scalar_problem(Complex(1.0, 0));
    const Contour circle = Contour::circle(0.0, 1.0);
    ProbeMatrix probe{ComplexMatrix::Ones(1, 1), ProbeMatrix::Origin::Identity};
    try {
        compute_moments(problem, circle, probe, 8, 1);
        FAIL("expected NodeFailureError");
    } catch (const NodeFailureError& e) {
        REQUIRE(e.node_index() == 0);
        REQUIRE(std::abs(e.node_point() - Complex(1.0, 0)) < 1e-15);
    }
}

TEST_CASE("quadrature nodes must avoid declared singular points")
{
    const NonlinearMatrixFunction problem(
        1,
        [](Complex z) {
            ComplexMatrix t(1, 1);
            t(0, 0) = z + 2.0;
            return t;
        },
        {}, {Complex(1.0, 0.0)});
    const Contour circle = Contour::circle(0.0, 1.0);
    ProbeMatrix probe{ComplexMatrix::Ones(1, 1), ProbeMatrix::Origin::Identity};
    REQUIRE_THROWS_AS(compute_moments(problem, circle, probe, 8, 1),
                      std::invalid_argument);
}

TEST_CASE("shift re-expansion matches direct recomputation")
{
    GalleryParams params;
    params.tau = 1.0;
    const auto delay = make_gallery_problem("delay-2x2", params);
    const Contour circle = Contour::circle(Complex(-1, 0), 6.0);
    const ProbeMatrix probe = ProbeMatrix::identity(2);
    const Complex z0(-1.0, 0.0);

    const MomentSet plain = compute_moments(delay.function, circle, probe, 60, 4);
    const MomentSet shifted = apply_shift(plain, z0);
    REQUIRE(shifted.shift == z0);

    // First order: A~_1 = A_1 - z0 A_0 exactly.
    const ComplexMatrix expected1 = plain.moments[1] - z0 * plain.moments[0];
    REQUIRE((shifted.moments[1] - expected1).norm() < 1e-15 * expected1.norm());

    // All orders against recomputation with the shift applied in the sum.
    const MomentSet recomputed =
        compute_moments(delay.function, circle, probe, 60, 4, z0);
    for (int p = 0; p < 4; ++p) {
        const double scale = recomputed.moments[p].norm();
        REQUIRE((shifted.moments[p] - recomputed.moments[p]).norm() < 1e-13 * scale);
    }

    // Zero shift is the identity.
    const MomentSet zero = apply_shift(plain, 0.0);
    for (int p = 0; p < 4; ++p) {
        REQUIRE((zero.moments[p] - plain.moments[p]).norm() == 0.0);
    }

    REQUIRE_THROWS_AS(apply_shift(shifted, Complex(1.0, 0)), std::invalid_argument);
}

TEST_CASE("scalar shift example agrees with the recomputation oracle")
{
    const NonlinearMatrixFunction problem = scalar_problem(Complex(0.5, 0));
    const Contour circle = Contour::circle(0.0, 1.0);
    ProbeMatrix probe{ComplexMatrix::Ones(1, 1), ProbeMatrix::Origin::Identity};

    const MomentSet plain = compute_moments(problem, circle, probe, 10, 2);

    // Shift onto the root: the shifted first moment is the integral of
    // the constant 1, which is zero; compare on the unshifted scale.
    {
        const Complex z0(0.5, 0.0);
        const MomentSet shifted = apply_shift(plain, z0);
        const ComplexMatrix reference =
            reference_moment(problem, circle, probe.columns, 10, 1, z0);
        REQUIRE(std::abs(shifted.moments[1](0, 0) - reference(0, 0)) <
                1e-13 * std::abs(plain.moments[1](0, 0)));
    }

    // Generic shift with a nonzero result: residue of (z-0.3)/(z-0.5).
    {
        const Complex z0(0.3, 0.0);
        const MomentSet shifted = apply_shift(plain, z0);
        const ComplexMatrix reference =
            reference_moment(problem, circle, probe.columns, 10, 1, z0);
        REQUIRE(std::abs(reference(0, 0) - Complex(0.2, 0)) < 1e-3);
        REQUIRE(std::abs(shifted.moments[1](0, 0) - reference(0, 0)) <
                1e-13 * std::abs(reference(0, 0)));
    }
}

TEST_CASE("parallel node solves reproduce the sequential bits")
{
    GalleryParams params;
    params.tau = 1.0;
    const auto delay = make_gallery_problem("delay-2x2", params);
    const Contour circle = Contour::circle(Complex(-1, 0), 6.0);
    const ProbeMatrix probe = ProbeMatrix::identity(2);

    const MomentSet sequential =
        compute_moments(delay.function, circle, probe, 37, 4, Complex(-1, 0));
    MomentOptions options;
    options.parallel = true;
    const MomentSet parallel =
        compute_moments(delay.function, circle, probe, 37, 4, Complex(-1, 0), options);
    REQUIRE(sequential.factorization_count == parallel.factorization_count);
    for (int p = 0; p < 4; ++p) {
        REQUIRE((sequential.moments[p] - parallel.moments[p]).norm() == 0.0);
    }
}

TEST_CASE("moment error decays roughly exponentially in the node count")
{
    GalleryParams params;
    params.tau = 1.0;
    const auto delay = make_gallery_problem("delay-2x2", params);
    const Contour circle = Contour::circle(Complex(-1, 0), 6.0);
    const ProbeMatrix probe = ProbeMatrix::identity(2);

    std::vector<double> nodes;
    std::vector<double> gaps;
    for (int n : {10, 20, 40, 80}) {
        const MomentSet coarse = compute_moments(delay.function, circle, probe, n, 1);
        const MomentSet fine = compute_moments(delay.function, circle, probe, 2 * n, 1);
        nodes.push_back(n);
        gaps.push_back((coarse.moments[0] - fine.moments[0]).norm());
    }
    std::vector<double> log_gaps;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        if (i > 0) {
            REQUIRE(gaps[i] < gaps[i - 1]);
        }
        log_gaps.push_back(std::log(gaps[i]));
    }
    REQUIRE(cieig_test::fit_slope(nodes, log_gaps) < 0.0);
    REQUIRE(gaps.back() < 1e-3 * gaps.front());
}

TEST_CASE("probe matrices validate their shape")
{
    REQUIRE_THROWS_AS(ProbeMatrix::random(4, 5, 1), std::invalid_argument);
    REQUIRE_THROWS_AS(ProbeMatrix::random(4, 0, 1), std::invalid_argument);
    const ProbeMatrix identity = ProbeMatrix::identity(3);
    REQUIRE(identity.origin == ProbeMatrix::Origin::Identity);
    REQUIRE((identity.columns - ComplexMatrix::Identity(3, 3)).norm() == 0.0);
    const ProbeMatrix random = ProbeMatrix::random(4, 2, 9);
    REQUIRE(random.rows() == 4);
    REQUIRE(random.count() == 2);
    REQUIRE((random.columns - ProbeMatrix::random(4, 2, 9).columns).norm() == 0.0);
}
