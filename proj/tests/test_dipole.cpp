#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fret3/system.hpp"
#include "test_support.hpp"

using namespace fret3;
using fret3::test::p32;
using fret3::test::rb87;

namespace {

// Theta part of Y_l^m, Condon-Shortley phase.
double theta_part(int l, int m, double theta) {
    if (std::abs(m) > l) return 0.0;
    if (m >= 0) return std::sph_legendre(l, m, theta);
    return ((-m) % 2 == 0 ? 1.0 : -1.0) * std::sph_legendre(l, -m, theta);
}

// <l' m'| rhat_q |l m> by Simpson quadrature over theta; the phi integral is 2 pi delta(m', m + q).
double orbital_element(int l2, int m2, int l1, int m1, int q) {
    if (m2 != m1 + q) return 0.0;
    const int n = 4000;
    const double h = std::numbers::pi / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        const double rq = q == 0 ? std::cos(t) : -q * std::sin(t) / std::sqrt(2.0);
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * theta_part(l2, m2, t) * rq * theta_part(l1, m1, t) * std::sin(t);
    }
    return 2.0 * std::numbers::pi * sum * h / 3.0;
}

// |l j mj> = sum over ms of c(ms) |l, mj - ms> |ms>, closed-form spin-1/2 coefficients.
struct Component {
    int ml;
    int twice_ms;
    double c;
};

std::vector<Component> spin_orbit(int l, double j, double mj) {
    const double den = 2.0 * l + 1.0;
    std::vector<Component> out;
    const int ml_up = static_cast<int>(std::lround(mj - 0.5));
    const int ml_dn = static_cast<int>(std::lround(mj + 0.5));
    if (j > l) {
        if (std::abs(ml_up) <= l) out.push_back({ml_up, 1, std::sqrt((l + mj + 0.5) / den)});
        if (std::abs(ml_dn) <= l) out.push_back({ml_dn, -1, std::sqrt((l - mj + 0.5) / den)});
    } else {
        if (std::abs(ml_up) <= l) out.push_back({ml_up, 1, -std::sqrt((l - mj + 0.5) / den)});
        if (std::abs(ml_dn) <= l) out.push_back({ml_dn, -1, std::sqrt((l + mj + 0.5) / den)});
    }
    return out;
}

double brute_angular(int l2, double j2, double m2, int l1, double j1, double m1, int q) {
    double sum = 0.0;
    for (const auto& a : spin_orbit(l2, j2, m2)) {
        for (const auto& b : spin_orbit(l1, j1, m1)) {
            if (a.twice_ms != b.twice_ms) continue;
            sum += a.c * b.c * orbital_element(l2, a.ml, l1, b.ml, q);
        }
    }
    return sum;
}

}  // namespace

TEST(DipoleAngular, MatchesBruteForceIntegration) {
    int checked = 0;
    for (int l1 = 0; l1 <= 3; ++l1) {
        for (int l2 : {l1 - 1, l1 + 1}) {
            if (l2 < 0 || l2 > 4) continue;
            for (double j1 : {l1 - 0.5, l1 + 0.5}) {
                if (j1 < 0.5) continue;
                for (double j2 : {l2 - 0.5, l2 + 0.5}) {
                    if (j2 < 0.5) continue;
                    for (double m1 = -j1; m1 <= j1 + 1e-9; m1 += 1.0) {
                        for (int q = -1; q <= 1; ++q) {
                            const double m2 = m1 + q;
                            if (std::abs(m2) > j2 + 1e-9) continue;
                            const RydbergState from = make_state(60, l1, j1, m1);
                            const RydbergState to = make_state(60, l2, j2, m2);
                            EXPECT_NEAR(dipole_angular(to, from, q), brute_angular(l2, j2, m2, l1, j1, m1, q), 1e-10)
                                << to.label() << " <- " << from.label() << " q=" << q;
                            ++checked;
                        }
                    }
                }
            }
        }
    }
    EXPECT_GT(checked, 200);
}

TEST(DipoleAngular, SelectionRules) {
    EXPECT_EQ(dipole_angular(make_state(70, 0, 0.5, 0.5), make_state(70, 2, 1.5, 0.5), 0), 0.0);
    EXPECT_EQ(dipole_angular(make_state(70, 0, 0.5, 0.5), p32(0.5), 1), 0.0);
    EXPECT_EQ(dipole_angular(make_state(70, 2, 2.5, 2.5), make_state(70, 1, 0.5, 0.5), 1), 0.0);
}

TEST(Dipole, HermitianConjugateRelation) {
    const auto& sys = rb87();
    const auto a = p32(0.5);
    for (const auto& b : {make_state(71, 0, 0.5, -0.5), make_state(68, 2, 2.5, 1.5), make_state(69, 2, 1.5, 0.5)}) {
        const int q = (b.mj - a.mj).twice() / 2;
        const double sign = q % 2 == 0 ? 1.0 : -1.0;
        EXPECT_NEAR(sys.dipole(a, b, q), sign * sys.dipole(b, a, -q), 1e-12) << b.label();
    }
}

TEST(Dipole, ProductOfAngularAndQuasiclassicalRadial) {
    const auto& sys = rb87();
    const auto a = p32(0.5), b = make_state(70, 0, 0.5, 0.5);
    EXPECT_DOUBLE_EQ(sys.dipole(a, b, 0), dipole_angular(b, a, 0) * radial_qc(a, b, sys.defects()));
    EXPECT_EQ(sys.dipole(a, make_state(70, 1, 0.5, 0.5), 0), 0.0);
}

TEST(Stark, FrozenShiftsAtTenthVoltPerCm) {
    const auto& sys = rb87();
    EXPECT_NEAR(single_atom_stark_shift(sys, p32(0.5), 0.1), -20.10713607, 1e-6);
    EXPECT_NEAR(single_atom_stark_shift(sys, p32(1.5), 0.1), -16.59398997, 1e-6);
    EXPECT_NEAR(single_atom_stark_shift(sys, make_state(70, 0, 0.5, 0.5), 0.1), -1.9690044, 1e-6);
}

TEST(Stark, QuadraticInField) {
    const auto& sys = rb87();
    const double a = single_atom_stark_shift(sys, p32(0.5), 0.05);
    const double b = single_atom_stark_shift(sys, p32(0.5), 0.1);
    EXPECT_NEAR(b, 4.0 * a, 1e-12 * std::abs(b));
    EXPECT_EQ(single_atom_stark_shift(sys, p32(0.5), 0.0), 0.0);
}

TEST(Stark, EvenInProjection) {
    const auto& sys = rb87();
    EXPECT_DOUBLE_EQ(sys.stark_coefficient(p32(0.5)), sys.stark_coefficient(p32(-0.5)));
    EXPECT_DOUBLE_EQ(sys.stark_coefficient(p32(1.5)), sys.stark_coefficient(p32(-1.5)));
}

TEST(Stark, WindowConverged) {
    const auto& sys = rb87();
    for (const auto& s : {p32(0.5), p32(1.5), make_state(71, 0, 0.5, 0.5)}) {
        const double k6 = sys.stark_coefficient_uncached(s, 6);
        const double k10 = sys.stark_coefficient_uncached(s, 10);
        EXPECT_LT(std::abs(k6 - k10), 0.01 * std::abs(k10)) << s.label();
    }
}

TEST(Stark, FieldGuard) {
    const auto& sys = rb87();
    EXPECT_THROW(single_atom_stark_shift(sys, p32(), 0.6), OutOfRegimeError);
    EXPECT_THROW(single_atom_stark_shift(sys, p32(), -0.01), OutOfRegimeError);
    EXPECT_THROW(single_atom_stark_shift(sys, p32(), std::nan("")), OutOfRegimeError);
}
