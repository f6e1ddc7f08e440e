#include <cmath>

#include "doctest.h"
#include "subrecoil/initial_state.hpp"
#include "subrecoil/observables.hpp"
#include "subrecoil/rng.hpp"

using namespace subrecoil;

namespace {

const HilbertDims kDims = HilbertDims::ring(2, 2, 2);

StateVector from_amps(
    const std::vector<std::pair<BasisIndex, Complex>>& entries,
    const HilbertDims& dims = kDims) {
    StateVector psi(dims);
    for (const auto& [b, v] : entries) psi.amps[flatten(b, dims)] = v;
    psi.normalize();
    return psi;
}

}  // namespace

TEST_CASE("kinetic energy") {
    CHECK(kinetic_energy(from_amps({{{0, 0, 0, 0}, 1.0}})) == 0.0);
    CHECK(kinetic_energy(symmetrize(2, 0, ExchangeSymmetry::Boson, kDims)) ==
          doctest::Approx(2.0));
    CHECK(kinetic_energy(symmetrize(1, 0, ExchangeSymmetry::Fermion, kDims)) ==
          doctest::Approx(0.5));
    // Invariant under norm and global phase.
    StateVector scaled = symmetrize(2, 0, ExchangeSymmetry::Boson, kDims);
    scaled.amps *= Complex(0.0, 3.0);
    CHECK(kinetic_energy(scaled) == doctest::Approx(2.0));
}

TEST_CASE("momentum distributions") {
    SUBCASE("doubly occupied pair") {
        const Eigen::VectorXd p =
            momentum_marginal(symmetrize(1, 1, ExchangeSymmetry::Boson, kDims));
        CHECK(p[1 + 2] == doctest::Approx(1.0));
        CHECK(p.sum() == doctest::Approx(1.0));
    }
    SUBCASE("fermion ground doublet") {
        const Eigen::VectorXd p = momentum_marginal(
            symmetrize(1, 0, ExchangeSymmetry::Fermion, kDims));
        CHECK(p[0 + 2] == doctest::Approx(0.5));
        CHECK(p[1 + 2] == doctest::Approx(0.5));
    }
    SUBCASE("joint is symmetric and photon sectors pool") {
        const StateVector psi = from_amps({{{1, -1, 0, 0}, {0.5, 0.0}},
                                           {{1, -1, 1, 0}, {0.0, 0.5}},
                                           {{-1, 1, 0, 1}, {0.5, 0.5}}});
        const Eigen::MatrixXd j = momentum_joint(psi);
        CHECK(j.sum() == doctest::Approx(1.0));
        CHECK(j(3, 1) == doctest::Approx(0.5));
        CHECK(j(1, 3) == doctest::Approx(0.5));
        for (int a = 0; a < j.rows(); ++a)
            for (int b = 0; b < j.cols(); ++b)
                if (!(a == 3 && b == 1) && !(a == 1 && b == 3))
                    CHECK(j(a, b) == 0.0);
    }
    SUBCASE("joint/marginal consistency") {
        TrajectoryRng rng(5, 0);
        const StateVector psi =
            initial_state(ExchangeSymmetry::Boson, 0.8, kDims, rng);
        const Eigen::MatrixXd j = momentum_joint(psi);
        const Eigen::VectorXd p = momentum_marginal(psi);
        for (int n = 0; n < p.size(); ++n)
            CHECK(p[n] == doctest::Approx(0.5 * (j.row(n).sum() +
                                                 j.col(n).sum()))
                              .epsilon(1e-10));
    }
}

TEST_CASE("momentum correlation") {
    SUBCASE("perfectly correlated pair") {
        const StateVector psi = from_amps(
            {{{1, 1, 0, 0}, {1.0, 0.0}}, {{-1, -1, 0, 0}, {1.0, 0.0}}});
        CHECK(momentum_correlation(psi).value() == doctest::Approx(1.0));
    }
    SUBCASE("perfectly anticorrelated fermion pair") {
        CHECK(momentum_correlation(
                  symmetrize(1, -1, ExchangeSymmetry::Fermion, kDims))
                  .value() == doctest::Approx(-1.0));
    }
    SUBCASE("product state decorrelates") {
        const StateVector psi = from_amps({{{1, 1, 0, 0}, {0.5, 0.0}},
                                           {{1, -1, 0, 0}, {0.5, 0.0}},
                                           {{-1, 1, 0, 0}, {0.5, 0.0}},
                                           {{-1, -1, 0, 0}, {0.5, 0.0}}});
        CHECK(std::abs(momentum_correlation(psi).value()) < 1e-12);
    }
    SUBCASE("frozen state is undefined") {
        CHECK_FALSE(momentum_correlation(from_amps({{{0, 0, 0, 0}, 1.0}}))
                        .has_value());
    }
}

TEST_CASE("ground state projection") {
    SUBCASE("boson") {
        CHECK(ground_state_projection(from_amps({{{0, 0, 0, 0}, 1.0}}),
                                      ExchangeSymmetry::Boson) ==
              doctest::Approx(1.0));
        // Photon sectors are summed over.
        CHECK(ground_state_projection(
                  from_amps({{{0, 0, 0, 0}, {0.6, 0.0}},
                             {{0, 0, 1, 1}, {0.0, 0.8}}}),
                  ExchangeSymmetry::Boson) == doctest::Approx(1.0));
        CHECK(ground_state_projection(
                  symmetrize(2, 0, ExchangeSymmetry::Boson, kDims),
                  ExchangeSymmetry::Boson) == doctest::Approx(0.0));
    }
    SUBCASE("fermion doublet") {
        CHECK(ground_state_projection(
                  symmetrize(1, 0, ExchangeSymmetry::Fermion, kDims),
                  ExchangeSymmetry::Fermion) == doctest::Approx(1.0));
        CHECK(ground_state_projection(
                  symmetrize(-1, 0, ExchangeSymmetry::Fermion, kDims),
                  ExchangeSymmetry::Fermion) == doctest::Approx(1.0));
        CHECK(ground_state_projection(
                  symmetrize(2, 0, ExchangeSymmetry::Fermion, kDims),
                  ExchangeSymmetry::Fermion) == doctest::Approx(0.0));
        // The doublet is degenerate: any superposition projects fully.
        StateVector mix(kDims);
        mix.amps = (symmetrize(1, 0, ExchangeSymmetry::Fermion, kDims).amps +
                    symmetrize(-1, 0, ExchangeSymmetry::Fermion, kDims).amps);
        mix.normalize();
        CHECK(ground_state_projection(mix, ExchangeSymmetry::Fermion) ==
              doctest::Approx(1.0));
    }
}

TEST_CASE("bunching parameter") {
    CHECK(bunching_parameter(symmetrize(1, -1, ExchangeSymmetry::Boson,
                                        kDims)) == doctest::Approx(0.5));
    // Particle one in (|0>+|2>)/sqrt(2) has <sin^2> = 1/4; particle two in
    // a plane wave contributes 1/2.
    const StateVector psi = from_amps(
        {{{0, 0, 0, 0}, {1.0, 0.0}}, {{2, 0, 0, 0}, {1.0, 0.0}}});
    CHECK(bunching_parameter(psi) == doctest::Approx(0.375));
}

TEST_CASE("effective temperature") {
    CHECK(effective_temperature(0.4, 0.4 * std::exp(-4.0)).value() ==
          doctest::Approx(1.0));
    CHECK(effective_temperature(0.4, 0.4 * std::exp(-8.0)).value() ==
          doctest::Approx(0.5));
    CHECK_FALSE(effective_temperature(0.4, 0.0).has_value());
    CHECK_FALSE(effective_temperature(0.4, 0.4).has_value());
    CHECK_FALSE(effective_temperature(0.4, 0.5).has_value());
    CHECK_THROWS_AS(effective_temperature(0.0, 0.1), DomainError);
}

TEST_CASE("parity fractions") {
    const StateVector psi = from_amps(
        {{{0, 0, 0, 0}, {1.0, 0.0}}, {{1, 1, 0, 0}, {1.0, 0.0}}});
    const auto f = parity_fractions(psi);
    CHECK(f[0] == doctest::Approx(0.5));
    CHECK(f[1] == doctest::Approx(0.5));
    CHECK(f[2] == doctest::Approx(0.0));

    const HilbertDims dims = HilbertDims::ring(4, 2, 2);
    TrajectoryRng rng_b(3, 0), rng_f(3, 0);
    const auto boson = parity_fractions(
        initial_state(ExchangeSymmetry::Boson, 1.2, dims, rng_b));
    CHECK(boson[2] == doctest::Approx(0.0));
    CHECK(boson[0] + boson[1] == doctest::Approx(1.0));
    const auto fermion = parity_fractions(
        initial_state(ExchangeSymmetry::Fermion, 1.2, dims, rng_f));
    CHECK(fermion[0] == doctest::Approx(0.0));
    CHECK(fermion[1] == doctest::Approx(0.0));
    CHECK(fermion[2] == doctest::Approx(1.0));
}

TEST_CASE("full record assembly") {
    const StateVector psi = symmetrize(1, -1, ExchangeSymmetry::Boson, kDims);
    const ObservableRecord rec = observe(psi, ExchangeSymmetry::Boson);
    CHECK(rec.e_kin == doctest::Approx(1.0));
    CHECK(rec.c_p.value() == doctest::Approx(-1.0));
    CHECK(rec.p_ground == doctest::Approx(0.0));
    CHECK(rec.parity_fracs[1] == doctest::Approx(1.0));
    CHECK(rec.bunching == doctest::Approx(0.5));
    CHECK(rec.n_photons_c == 0.0);
    CHECK(rec.n_photons_s == 0.0);
    // No n = 0 population: non-thermal, not an error.
    CHECK_FALSE(rec.t_eff.has_value());
    CHECK(rec.p_single.sum() == doctest::Approx(1.0));
    CHECK(rec.p_joint.sum() == doctest::Approx(1.0));
    CHECK(rec.moments.p1p2 == doctest::Approx(-1.0));

    SUBCASE("photon numbers count sectors") {
        const HilbertDims tall = HilbertDims::ring(2, 2, 3);
        const StateVector lit = from_amps({{{0, 0, 1, 0}, {1.0, 0.0}},
                                           {{0, 0, 0, 2}, {1.0, 0.0}}},
                                          tall);
        const ObservableRecord r = observe(lit, ExchangeSymmetry::Boson);
        CHECK(r.n_photons_c == doctest::Approx(0.5));
        CHECK(r.n_photons_s == doctest::Approx(1.0));
        CHECK(r.p_ground == doctest::Approx(1.0));
    }
}

TEST_CASE("record from a density matrix matches the pure-state record") {
    const HilbertDims dims = HilbertDims::ring(2, 2, 2);
    TrajectoryRng rng(9, 4);
    const StateVector psi =
        initial_state(ExchangeSymmetry::Boson, 0.8, dims, rng);
    const Eigen::MatrixXcd rho = psi.amps * psi.amps.adjoint();
    const ObservableRecord a = observe(psi, ExchangeSymmetry::Boson);
    const ObservableRecord b =
        observe_density(rho, dims, ExchangeSymmetry::Boson);
    CHECK(a.e_kin == doctest::Approx(b.e_kin).epsilon(1e-10));
    CHECK(a.p_ground == doctest::Approx(b.p_ground).epsilon(1e-10));
    CHECK(a.bunching == doctest::Approx(b.bunching).epsilon(1e-10));
    CHECK(a.n_photons_c == doctest::Approx(b.n_photons_c).epsilon(1e-10));
    CHECK(a.n_photons_s == doctest::Approx(b.n_photons_s).epsilon(1e-10));
    CHECK((a.p_single - b.p_single).norm() < 1e-10);
    CHECK((a.p_joint - b.p_joint).norm() < 1e-10);
    CHECK(a.c_p.value() == doctest::Approx(b.c_p.value()).epsilon(1e-8));
    for (int c = 0; c < 3; ++c)
        CHECK(a.parity_fracs[c] ==
              doctest::Approx(b.parity_fracs[c]).epsilon(1e-10));
}
