#include <cmath>

#include <gtest/gtest.h>

#include "fret3/interaction.hpp"
#include "test_support.hpp"

using namespace fret3;
using fret3::test::p32;
using fret3::test::rb87;

namespace {

const BasisSet& basis3() {
    static const BasisSet b = build_basis(rb87(), uniform_state(p32(), 3), BasisRule{});
    return b;
}

CollectiveState pair(const RydbergState& a, const RydbergState& b) { return CollectiveState{{a, b}}; }

}  // namespace

TEST(PairCoupling, CollinearClosedForm) {
    const auto& sys = rb87();
    const auto g = Geometry::equidistant(10.0, 2);
    const double r = units::um_to_bohr(10.0);
    const auto s = make_state(70, 0, 0.5, 0.5), t = make_state(71, 0, 0.5, 0.5), p12 = make_state(70, 1, 0.5, 0.5);
    // q = 0: -2 d d / R^3
    const double v0 = pair_coupling(sys, pair(p32(), p32()), pair(s, p12), 0, 1, g);
    EXPECT_NEAR(v0, -2.0 * sys.dipole(p32(), s, 0) * sys.dipole(p32(), p12, 0) / (r * r * r) * units::hartree_mhz,
                1e-12 * std::abs(v0));
    // q = +-1: -d d / R^3
    const auto s_dn = make_state(70, 0, 0.5, -0.5), p_up = make_state(70, 1, 0.5, 0.5);
    const double v1 = pair_coupling(sys, pair(p32(0.5), p32(-0.5)), pair(s_dn, p_up), 0, 1, g);
    EXPECT_NEAR(v1, -sys.dipole(p32(0.5), s_dn, -1) * sys.dipole(p32(-0.5), p_up, 1) / (r * r * r) * units::hartree_mhz,
                1e-12 * std::abs(v1));
    EXPECT_NE(pair_coupling(sys, pair(p32(), p32()), pair(s, t), 0, 1, g), 0.0);
}

TEST(PairCoupling, InverseCubeScaling) {
    const auto& sys = rb87();
    const auto a = pair(p32(), p32());
    const auto b = pair(make_state(70, 0, 0.5, 0.5), make_state(71, 0, 0.5, 0.5));
    const double v10 = pair_coupling(sys, a, b, 0, 1, Geometry::equidistant(10.0, 2));
    for (double r : {5.0, 8.5, 17.0}) {
        const double v = pair_coupling(sys, a, b, 0, 1, Geometry::equidistant(r, 2));
        EXPECT_NEAR(v, v10 * std::pow(10.0 / r, 3), 1e-12 * std::abs(v));
    }
}

TEST(PairCoupling, Symmetric) {
    const auto& sys = rb87();
    const auto g = Geometry::equidistant(10.0, 3);
    const auto& b = basis3();
    for (std::size_t k = 1; k < b.size(); k += 7) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                const double v = pair_coupling(sys, b.initial(), b[k], i, j, g);
                EXPECT_NEAR(v, pair_coupling(sys, b[k], b.initial(), i, j, g), 1e-12 * std::abs(v) + 1e-15);
                EXPECT_NEAR(v, pair_coupling(sys, b.initial(), b[k], j, i, g), 1e-12 * std::abs(v) + 1e-15);
            }
        }
    }
}

TEST(PairCoupling, SpectatorMustMatch) {
    const auto& sys = rb87();
    const auto g = Geometry::equidistant(10.0, 3);
    const auto s = make_state(70, 0, 0.5, 0.5), t = make_state(71, 0, 0.5, 0.5);
    const CollectiveState a{{p32(), p32(), p32()}};
    EXPECT_NE(pair_coupling(sys, a, CollectiveState{{s, t, p32()}}, 0, 1, g), 0.0);
    EXPECT_EQ(pair_coupling(sys, a, CollectiveState{{s, t, p32(1.5)}}, 0, 1, g), 0.0);
}

TEST(PairCoupling, InvalidPair) {
    const auto& sys = rb87();
    const auto g = Geometry::equidistant(10.0, 3);
    const auto a = uniform_state(p32(), 3);
    EXPECT_THROW(pair_coupling(sys, a, a, 1, 1, g), InvalidPairError);
    EXPECT_THROW(pair_coupling(sys, a, a, 0, 3, g), InvalidPairError);
    EXPECT_THROW(pair_coupling(sys, a, uniform_state(p32(), 2), 0, 1, g), InvalidPairError);
    EXPECT_THROW(pair_coupling(sys, a, a, 0, 1, Geometry::equidistant(10.0, 2)), InvalidPairError);
}

TEST(Geometry, Validation) {
    EXPECT_THROW((Geometry{{0.0, 10.0, 10.0}}.validate()), ValidationError);
    EXPECT_THROW(CouplingMatrix(rb87(), basis3(), Geometry::equidistant(10.0, 2)), ValidationError);
    EXPECT_DOUBLE_EQ(Geometry::equidistant(8.5).distance(0, 2), 17.0);
}

TEST(Hamiltonian, HermitianWithoutDecay) {
    const auto h = assemble(rb87(), basis3(), 0.14, Geometry::equidistant(10.0), false);
    EXPECT_LE((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_GT(h.matrix.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Hamiltonian, DecayOnDiagonalOnly) {
    const auto& sys = rb87();
    const auto g = Geometry::equidistant(10.0);
    const auto with = assemble(sys, basis3(), 0.14, g, true);
    const auto without = assemble(sys, basis3(), 0.14, g, false);
    const ComplexMatrix diff = with.matrix - without.matrix;
    for (Eigen::Index r = 0; r < diff.rows(); ++r) {
        for (Eigen::Index c = 0; c < diff.cols(); ++c) {
            if (r == c) {
                EXPECT_NEAR(diff(r, c).imag(), -0.5 * collective_decay_width_mhz(sys, basis3()[std::size_t(r)]), 1e-15);
            } else {
                EXPECT_EQ(diff(r, c), Complex(0.0));
            }
        }
    }
    // three 70P3/2 atoms: Gamma = 3 / tau
    EXPECT_NEAR(collective_decay_width_mhz(sys, basis3().initial()), 3.0 / 108.2910806 / (2.0 * units::pi), 1e-9);
}

TEST(Hamiltonian, CouplingsConserveProjection) {
    const auto c = CouplingMatrix(rb87(), basis3(), Geometry::equidistant(10.0));
    const auto& m = c.matrix();
    int nonzero = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            if (m(r, k) == 0.0) continue;
            ++nonzero;
            EXPECT_EQ(basis3()[std::size_t(r)].total_projection(), basis3()[std::size_t(k)].total_projection());
        }
    }
    EXPECT_GT(nonzero, 0);
}

TEST(Hamiltonian, InitialEnergyIsStarkShift) {
    const auto& sys = rb87();
    const auto h = assemble(sys, basis3(), 0.1, Geometry::equidistant(10.0), false);
    EXPECT_NEAR(h.matrix(0, 0).real(), 3.0 * -20.10713607, 1e-6);
}

TEST(Hamiltonian, EmptyBasisRejected) {
    EXPECT_THROW(assemble(rb87(), BasisSet{}, 0.1, Geometry{}, false), EmptyBasisError);
}
