#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fret3/dynamics.hpp"
#include "test_support.hpp"

using namespace fret3;
using fret3::test::p32;
using fret3::test::rb87;

namespace {

const BasisSet& basis3() {
    static const BasisSet b = build_basis(rb87(), uniform_state(p32(), 3), BasisRule{});
    return b;
}

const CouplingMatrix& couplings3() {
    static const CouplingMatrix c(rb87(), basis3(), Geometry::equidistant(10.0));
    return c;
}

HamiltonianModel two_level(double v, double delta) {
    HamiltonianModel h;
    h.matrix = ComplexMatrix::Zero(2, 2);
    h.matrix(0, 1) = h.matrix(1, 0) = v;
    h.matrix(1, 1) = delta;
    return h;
}

}  // namespace

TEST(Evolve, ZeroHamiltonianIsIdentity) {
    HamiltonianModel h;
    h.matrix = ComplexMatrix::Zero(3, 3);
    ComplexVector psi(3);
    psi << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0);
    const auto out = evolve_final(h, psi, 2.0);
    EXPECT_LE((out - psi).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Evolve, DetunedRabiOracle) {
    const double v = 1.3, delta = 0.7;  // MHz
    const auto traj = evolve(two_level(v, delta), basis_vector(2), 2.0, 1e-12, 40);
    const double w = std::sqrt(4.0 * v * v + delta * delta);
    for (std::size_t k = 0; k < traj.times_us.size(); ++k) {
        const double s = std::sin(units::pi * w * traj.times_us[k]);
        EXPECT_NEAR(std::norm(traj.amplitudes[k](1)), 4.0 * v * v / (w * w) * s * s, 1e-6);
    }
}

TEST(Evolve, ResonantPhaseOfPiPulse) {
    // full Rabi cycle returns the state with a sign flip
    const double v = 0.5;
    const auto out = evolve_final(two_level(v, 0.0), basis_vector(2), 1.0 / (2.0 * v), 1e-12);
    EXPECT_NEAR(out(0).real(), -1.0, 1e-9);
    EXPECT_NEAR(std::abs(out(1)), 0.0, 1e-9);
}

TEST(Evolve, NormConservedWithoutDecay) {
    const auto h = assemble(rb87(), basis3(), couplings3(), 0.14, false);
    const auto traj = evolve(h, basis_vector(Eigen::Index(basis3().size())), 1.0, 1e-10, 10);
    for (const auto& psi : traj.amplitudes) EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-9);
}

TEST(Evolve, DecayContractsNorm) {
    const auto h = assemble(rb87(), basis3(), couplings3(), 0.14, true);
    const auto traj = evolve(h, basis_vector(Eigen::Index(basis3().size())), 1.0, 1e-10, 10);
    double last = 1.0;
    for (std::size_t k = 1; k < traj.amplitudes.size(); ++k) {
        const double n = traj.amplitudes[k].squaredNorm();
        EXPECT_LT(n, last);
        last = n;
    }
    // bounded by the slowest and fastest decay in the basis
    EXPECT_GT(last, std::exp(-1.0 * 3.0 / 20.0));
}

TEST(Evolve, PureDecayMatchesLifetime) {
    HamiltonianModel h;
    h.matrix = ComplexMatrix::Zero(1, 1);
    const double gamma = 3.0 / 108.2910806;
    h.matrix(0, 0) = Complex(0.0, -0.5 * gamma / (2.0 * units::pi));
    const auto out = evolve_final(h, basis_vector(1), 1.5);
    EXPECT_NEAR(std::norm(out(0)), std::exp(-gamma * 1.5), 1e-12);
}

TEST(Evolve, ToleranceHalvingAgrees) {
    const auto h = assemble(rb87(), basis3(), couplings3(), 0.1394, true);
    const auto psi0 = basis_vector(Eigen::Index(basis3().size()));
    const auto a = evolve_final(h, psi0, 1.2, 1e-8);
    const auto b = evolve_final(h, psi0, 1.2, 0.5e-8);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Evolve, ArgumentValidation) {
    const auto h = two_level(1.0, 0.0);
    EXPECT_THROW(evolve(h, basis_vector(3), 1.0), ValidationError);
    EXPECT_THROW(evolve(h, 2.0 * basis_vector(2), 1.0), ValidationError);
    EXPECT_THROW(evolve(h, basis_vector(2), 0.0), ValidationError);
    EXPECT_THROW(evolve(h, basis_vector(2), 1.0, 1e-10, 0), ValidationError);
    EXPECT_THROW(evolve(h, basis_vector(2), 1.0, 0.0), ValidationError);
}

TEST(PopulationPhase, StartsAtUnityAndZero) {
    const auto h = assemble(rb87(), basis3(), couplings3(), 0.14, true);
    const auto traj = evolve(h, basis_vector(Eigen::Index(basis3().size())), 0.5, 1e-10, 5);
    const auto pp = initial_state_population_phase(traj);
    EXPECT_DOUBLE_EQ(pp.population.front(), 1.0);
    EXPECT_DOUBLE_EQ(pp.phase_rad.front(), 0.0);
    EXPECT_FALSE(pp.phase_undefined.front());
}

TEST(PopulationPhase, IndependentOfEnergyOffset) {
    auto h = two_level(0.4, 0.9);
    auto shifted = h;
    shifted.matrix += 7.25 * ComplexMatrix::Identity(2, 2);
    const auto a = initial_state_population_phase(evolve(h, basis_vector(2), 1.3, 1e-12, 13));
    const auto b = initial_state_population_phase(evolve(shifted, basis_vector(2), 1.3, 1e-12, 13));
    for (std::size_t k = 0; k < a.population.size(); ++k) {
        EXPECT_NEAR(a.population[k], b.population[k], 1e-10);
        EXPECT_NEAR(std::remainder(a.phase_rad[k] - b.phase_rad[k], 2.0 * units::pi), 0.0, 1e-8);
    }
}

TEST(PopulationPhase, UndefinedWhenDepleted) {
    const auto out = initial_state_population_phase(evolve(two_level(0.5, 0.0), basis_vector(2), 0.5, 1e-12, 1));
    EXPECT_LT(out.population.back(), 1e-12);
    EXPECT_TRUE(out.phase_undefined.back());
    EXPECT_TRUE(std::isnan(out.phase_rad.back()));
}

TEST(PhaseWrap, Range) {
    EXPECT_DOUBLE_EQ(wrap_phase(units::pi), units::pi);
    EXPECT_DOUBLE_EQ(wrap_phase(-units::pi), units::pi);
    EXPECT_NEAR(wrap_phase(3.0 * units::pi / 2.0), -units::pi / 2.0, 1e-15);
    EXPECT_NEAR(wrap_phase(0.1 + 4.0 * units::pi), 0.1, 1e-14);
}

TEST(Transfer, CountsAtomsInTargetLevel) {
    const auto& b = basis3();
    const auto target = level_predicate(71, 0, HalfInt::from_twice(1));
    const CollectiveState fin{{make_state(70, 0, 0.5, 0.5), make_state(71, 0, 0.5, 0.5), make_state(70, 1, 0.5, 0.5)}};
    const auto idx = b.index_of(fin);
    ASSERT_TRUE(idx.has_value());
    Trajectory traj;
    traj.times_us = {0.0, 1.0, 2.0};
    traj.amplitudes = {basis_vector(Eigen::Index(b.size())), basis_vector(Eigen::Index(b.size()), Eigen::Index(*idx)),
                       (basis_vector(Eigen::Index(b.size())) + basis_vector(Eigen::Index(b.size()), Eigen::Index(*idx))) /
                           std::sqrt(2.0)};
    const auto rho = transfer_fraction(traj, b, target);
    EXPECT_DOUBLE_EQ(rho[0], 0.0);
    EXPECT_NEAR(rho[1], 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(rho[2], 1.0 / 6.0, 1e-15);
}

TEST(Evolve, NonFiniteHamiltonianIsNumericalFailure) {
    auto h = two_level(1.0, 0.0);
    h.matrix(1, 1) = Complex(0.0, -std::numeric_limits<double>::infinity());
    EXPECT_THROW(evolve(h, basis_vector(2), 1.0), NumericalError);
}
