#include "doctest.h"
#include "subrecoil/hilbert.hpp"

using namespace subrecoil;

TEST_CASE("dimension formula") {
    CHECK(HilbertDims::ring(8, 3, 3).dim() == 17 * 17 * 3 * 3);
    CHECK(HilbertDims::ring(2, 2, 2).dim() == 100);
    CHECK(HilbertDims::linear(8, 3).dim() == 17 * 17 * 3);
    CHECK(HilbertDims::linear(2, 2).dim() == 50);
}

TEST_CASE("dimension validation") {
    CHECK_THROWS_WITH_AS(HilbertDims::ring(0, 2, 2).validate(),
                         "n_max >= 1 violated", ConfigError);
    CHECK_THROWS_AS(HilbertDims::ring(2, 1, 2), ConfigError);
    CHECK_THROWS_AS(HilbertDims::ring(2, 2, 1), ConfigError);
    HilbertDims bad_linear{2, 2, 2, Geometry::Linear};
    CHECK_THROWS_AS(bad_linear.validate(), ConfigError);
}

TEST_CASE("flatten corner states") {
    const HilbertDims dims = HilbertDims::ring(2, 2, 2);
    CHECK(flatten({-2, -2, 0, 0}, dims) == 0);
    CHECK(flatten({2, 2, 1, 1}, dims) == dims.dim() - 1);
    // k_s is the fastest index, n1 the slowest.
    CHECK(flatten({-2, -2, 0, 1}, dims) == 1);
    CHECK(flatten({-2, -2, 1, 0}, dims) == 2);
    CHECK(flatten({-2, -1, 0, 0}, dims) == 4);
    CHECK(flatten({-1, -2, 0, 0}, dims) == 20);
}

TEST_CASE("flatten/unflatten bijection") {
    const HilbertDims dims = HilbertDims::ring(2, 2, 2);
    for (Index i = 0; i < dims.dim(); ++i) {
        const BasisIndex b = unflatten(i, dims);
        CHECK(flatten(b, dims) == i);
    }
    for (int n1 = -2; n1 <= 2; ++n1)
        for (int n2 = -2; n2 <= 2; ++n2)
            for (int kc = 0; kc < 2; ++kc)
                for (int ks = 0; ks < 2; ++ks) {
                    const BasisIndex b{n1, n2, kc, ks};
                    CHECK(unflatten(flatten(b, dims), dims) == b);
                }
}

TEST_CASE("flatten bounds checking") {
    const HilbertDims dims = HilbertDims::ring(2, 2, 2);
    CHECK_THROWS_AS(flatten({3, 0, 0, 0}, dims), BoundsError);
    CHECK_THROWS_AS(flatten({0, -3, 0, 0}, dims), BoundsError);
    CHECK_THROWS_AS(flatten({0, 0, 2, 0}, dims), BoundsError);
    CHECK_THROWS_AS(flatten({0, 0, 0, -1}, dims), BoundsError);
    CHECK_THROWS_AS(unflatten(-1, dims), BoundsError);
    CHECK_THROWS_AS(unflatten(dims.dim(), dims), BoundsError);
}

TEST_CASE("particle swap") {
    const HilbertDims dims = HilbertDims::ring(2, 2, 2);
    StateVector psi(dims);
    psi.amps[flatten({1, -2, 1, 0}, dims)] = Complex(0.6, 0.0);
    psi.amps[flatten({0, 0, 0, 1}, dims)] = Complex(0.0, 0.8);

    const StateVector swapped = swap_particles(psi);
    CHECK(swapped.amps[flatten({-2, 1, 1, 0}, dims)] == Complex(0.6, 0.0));
    CHECK(swapped.amps[flatten({0, 0, 0, 1}, dims)] == Complex(0.0, 0.8));
    CHECK(swapped.norm2() == doctest::Approx(psi.norm2()));

    const StateVector twice = swap_particles(swapped);
    CHECK((twice.amps - psi.amps).norm() == 0.0);
}

TEST_CASE("normalization") {
    const HilbertDims dims = HilbertDims::ring(1, 2, 2);
    StateVector psi(dims);
    CHECK_THROWS_AS(psi.normalize(), NormalizationError);
    psi.amps[0] = Complex(3.0, 4.0);
    psi.normalize();
    CHECK(psi.norm2() == doctest::Approx(1.0));
}

TEST_CASE("momentum parity helper") {
    CHECK(is_even(0));
    CHECK(is_even(-2));
    CHECK_FALSE(is_even(1));
    CHECK_FALSE(is_even(-3));
}
