#include <cmath>

#include <gtest/gtest.h>

#include "fret3/radial.hpp"
#include "test_support.hpp"

using namespace fret3;
using fret3::test::rb87;

namespace {

// Hydrogen <n l|r|n l+1> = (3/2) n sqrt(n^2 - (l+1)^2).
double hydrogen_same_n(int n, int l) { return 1.5 * n * std::sqrt(double(n) * n - double(l + 1) * (l + 1)); }

const QuantumDefectTable& defects() { return rb87().defects(); }

RydbergState level(int n, int l, double j) { return make_state(n, l, j, 0.5); }

}  // namespace

TEST(RadialQc, HydrogenLimit) {
    const double exact = hydrogen_same_n(70, 0);
    EXPECT_NEAR(exact, 7349.25, 0.01);
    EXPECT_NEAR(radial_qc_effective(70.0, 0, 70.0, 1), exact, 0.01 * exact);
}

TEST(RadialNumerov, HydrogenSameN) {
    const double exact = hydrogen_same_n(70, 0);
    const double num = radial_overlap_r(numerov_wavefunction(70.0, 0), numerov_wavefunction(70.0, 1));
    EXPECT_NEAR(num, exact, 1e-3 * exact);
}

TEST(RadialNumerov, HydrogenGroundToTwoP) {
    // <1s|r|2p> = 2^7 sqrt(6) / 3^5
    const double exact = 128.0 * std::sqrt(6.0) / 243.0;
    const double num = radial_overlap_r(numerov_wavefunction(1.0, 0, 1e-3), numerov_wavefunction(2.0, 1, 1e-3));
    EXPECT_NEAR(std::abs(num), exact, 1e-3 * exact);
}

TEST(RadialNumerov, GridHalvingConverges) {
    const auto a = level(70, 1, 1.5), b = level(71, 0, 0.5);
    const double coarse = radial_numerov(a, b, defects(), 0.01);
    const double fine = radial_numerov(a, b, defects(), 0.005);
    EXPECT_LT(std::abs(coarse - fine), 1e-4 * std::abs(fine));
}

TEST(RadialQc, Symmetric) {
    const auto a = level(70, 1, 1.5), b = level(72, 0, 0.5), c = level(68, 2, 2.5);
    EXPECT_DOUBLE_EQ(radial_qc(a, b, defects()), radial_qc(b, a, defects()));
    EXPECT_DOUBLE_EQ(radial_qc(a, c, defects()), radial_qc(c, a, defects()));
}

TEST(RadialQc, NearDiagonalAgreesWithNumerov) {
    const auto p = level(70, 1, 1.5);
    for (const auto& s : {level(70, 0, 0.5), level(71, 0, 0.5)}) {
        const double q = radial_qc(p, s, defects());
        const double n = radial_numerov(p, s, defects());
        EXPECT_LT(std::abs(q - n), 0.02 * std::abs(n)) << s.level_label() << " qc " << q << " numerov " << n;
    }
}

// Frozen reference values from an independent model-potential solver; the
// Coulomb Numerov oracle must reproduce them.
TEST(RadialNumerov, MatchesModelPotentialReference) {
    struct Case {
        RydbergState a, b;
        double ref;
    };
    const Case cases[] = {
        {level(70, 0, 0.5), level(70, 1, 1.5), 5081.7218},
        {level(70, 0, 0.5), level(70, 1, 0.5), 5162.9764},
        {level(69, 1, 1.5), level(71, 0, 0.5), -669.0950},
        {level(66, 2, 1.5), level(70, 1, 1.5), 352.4125},
        {level(73, 2, 1.5), level(75, 1, 1.5), 4002.6310},
    };
    for (const auto& c : cases) {
        EXPECT_NEAR(radial_numerov(c.a, c.b, defects()), c.ref, 1e-3 * std::abs(c.ref))
            << c.a.level_label() << " -> " << c.b.level_label();
    }
}

TEST(RadialQc, SignMatchesNumerovForLargeElements) {
    const RydbergState ps[] = {level(69, 1, 1.5), level(70, 1, 0.5), level(70, 1, 1.5), level(71, 1, 1.5)};
    const RydbergState ss[] = {level(67, 0, 0.5), level(69, 0, 0.5), level(70, 0, 0.5), level(71, 0, 0.5),
                               level(72, 0, 0.5), level(73, 0, 0.5), level(67, 2, 2.5), level(68, 2, 1.5)};
    for (const auto& p : ps) {
        for (const auto& s : ss) {
            const double n = radial_numerov(p, s, defects());
            if (std::abs(n) < 100.0) continue;
            EXPECT_GT(radial_qc(p, s, defects()) * n, 0.0) << p.level_label() << " -> " << s.level_label();
        }
    }
}

TEST(Radial, SelectionRuleEnforced) {
    const auto a = level(70, 1, 1.5), b = level(70, 1, 0.5), d = level(70, 3, 2.5);
    EXPECT_THROW(radial_qc(a, b, defects()), SelectionRuleError);
    EXPECT_THROW(radial_numerov(a, d, defects()), SelectionRuleError);
    EXPECT_THROW(radial_qc_effective(70.0, 0, 71.0, 2), SelectionRuleError);
}

TEST(AngerFunction, IntegerOrderIsBessel) {
    for (int n = 0; n <= 3; ++n) {
        for (double z : {0.3, 1.0, 2.5}) EXPECT_NEAR(anger_j(n, z), std::cyl_bessel_j(n, z), 1e-12);
    }
}
