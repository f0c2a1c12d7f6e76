#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fret3/atomic_data.hpp"
#include "test_support.hpp"

using namespace fret3;
using fret3::test::rb87;

namespace {

const char* minimal =
    "species = Test\n"
    "rydberg_constant_mhz = 3289821194.478726\n"
    "[series S1/2]\n"
    "delta0 = 3.1311804\n"
    "delta2 = 0.1784\n";

}  // namespace

TEST(QuantumNumbers, LabelsRoundTrip) {
    const auto s = make_state(70, 1, 1.5, 0.5);
    EXPECT_EQ(s.label(), "70P3/2(1/2)");
    EXPECT_EQ(parse_state("70P3/2(1/2)"), s);
    EXPECT_EQ(parse_state("71S1/2(-1/2)"), make_state(71, 0, 0.5, -0.5));
    EXPECT_THROW(parse_state("70X3/2(1/2)"), ValidationError);
    EXPECT_THROW(parse_state("70P5/2(1/2)"), ValidationError);
    EXPECT_THROW(parse_state("70P3/2"), ValidationError);
    EXPECT_THROW(make_state(70, 1, 1.5, 2.5), ValidationError);
    EXPECT_THROW(HalfInt::from_double(0.3), ValidationError);
}

TEST(SpeciesFile, ParsesAllSeries) {
    const auto& d = rb87().data();
    EXPECT_EQ(d.species, "Rb87");
    for (const char* label : {"S1/2", "P1/2", "P3/2", "D3/2", "D5/2", "F5/2", "F7/2"}) {
        const auto key = detail::parse_series_label(label, "test");
        EXPECT_TRUE(d.defects.contains(key)) << label;
    }
    EXPECT_TRUE(d.defects.contains({5, HalfInt::from_twice(9)}));  // hydrogenic beyond F
    EXPECT_FALSE(d.lifetimes.contains({3, HalfInt::from_twice(5)}));
    EXPECT_EQ(d.checksum.size(), 16u);
}

TEST(SpeciesFile, ChecksumIsFnv1a64) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(SpeciesFile, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        try {
            parse_species(text, "bad.species");
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_NE(message(std::string(minimal) + "delta9 oops\n").find("bad.species:6"), std::string::npos);
    EXPECT_NE(message(std::string(minimal) + "[series Q1/2]\n").find("bad.species:6"), std::string::npos);
    EXPECT_NE(message("species = X\nrydberg_constant_mhz = abc\n").find("bad.species"), std::string::npos);
    EXPECT_NE(message("species = X\n").find("rydberg_constant_mhz"), std::string::npos);
    EXPECT_NE(message(std::string(minimal) + "[series P1/2]\ndelta0 = 7.5\n").find("bad.species:6"),
              std::string::npos);
}

TEST(SpeciesFile, UnknownSeriesThrows) {
    const auto d = parse_species(minimal);
    EXPECT_THROW(d.defects.defect(70, {1, HalfInt::from_twice(3)}), UnknownSeriesError);
    EXPECT_THROW(d.lifetimes.coefficients({0, HalfInt::from_twice(1)}), UnknownSeriesError);
    EXPECT_THROW(load_species("/nonexistent/file.species"), ValidationError);
}

// E = -Ry / (n - delta0 - delta2/(n - delta0)^2)^2, evaluated by hand for 70P3/2.
TEST(Energies, RydbergRitzByHand) {
    const double x = 70.0 - 2.6416737;
    const double nstar = 70.0 - (2.6416737 + 0.2950 / (x * x));
    const double e = -3289821194.478726 / (nstar * nstar);
    EXPECT_NEAR(rb87().energy_mhz(test::p32()), e, 1e-9 * std::abs(e));
    EXPECT_NEAR(level_energy(test::p32(), rb87().defects()), e * 1e-3, 1e-9 * std::abs(e) * 1e-3);
    EXPECT_NEAR(rb87().defects().effective_n(70, {1, HalfInt::from_twice(3)}), nstar, 1e-12);
}

// Frozen from an independent floating-point prototype of the same data.
TEST(Energies, ForsterDefects) {
    const auto& sys = rb87();
    const double three_body = sys.energy_mhz(make_state(70, 0, 0.5, 0.5)) + sys.energy_mhz(make_state(71, 0, 0.5, 0.5)) +
                              sys.energy_mhz(make_state(70, 1, 0.5, 0.5)) - 3.0 * sys.energy_mhz(test::p32());
    EXPECT_NEAR(three_body, -71.2515, 1e-3);
    const double two_body = sys.energy_mhz(make_state(70, 0, 0.5, 0.5)) + sys.energy_mhz(make_state(71, 0, 0.5, 0.5)) -
                            2.0 * sys.energy_mhz(test::p32());
    EXPECT_NEAR(two_body, 213.24, 1e-2);
}

TEST(Lifetimes, SeventyP32) {
    const auto& d = rb87().data();
    const double rate300 = decay_rate(test::p32(), d.defects, d.lifetimes);
    const double rate0 = decay_rate(test::p32(), d.defects, d.lifetimes.at_temperature(0.0));
    EXPECT_NEAR(1.0 / rate300, 108.291, 1e-3);
    EXPECT_NEAR(1.0 / rate0, 763.449, 1e-3);
    EXPECT_GT(rate300, rate0);
}

TEST(Lifetimes, BlackbodyTermByHand) {
    const auto& d = rb87().data();
    const auto s = make_state(71, 0, 0.5, 0.5);
    const double nstar = d.defects.effective_n(71, series_of(s));
    const double rad = 1.0 / (1.368e-3 * std::pow(nstar, 2.9957));
    const double bbr = 0.134 / std::pow(nstar, 4.426) * 2.14e10 /
                       (std::exp(315780.0 * 0.251 / (std::pow(nstar, 2.567) * 300.0)) - 1.0) * 1e-6;
    EXPECT_NEAR(decay_rate(s, d.defects, d.lifetimes), rad + bbr, 1e-12);
}

TEST(Lifetimes, FStatesHaveNoLifetime) {
    EXPECT_THROW(rb87().decay(make_state(70, 3, 2.5, 0.5)), UnknownSeriesError);
}
