#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "quantum_numbers.hpp"

// Angular momentum algebra with Condon-Shortley phases. All arguments are
// HalfInt; out-of-domain inputs (triangle or projection violations) give 0.

namespace fret3 {

namespace detail {

inline constexpr int max_factorial = 120;

inline const std::array<long double, max_factorial + 1>& factorials() {
    static const auto table = [] {
        std::array<long double, max_factorial + 1> f{};
        f[0] = 1.0L;
        for (int i = 1; i <= max_factorial; ++i) f[static_cast<std::size_t>(i)] = f[static_cast<std::size_t>(i - 1)] * i;
        return f;
    }();
    return table;
}

/// k! for an integer k given as twice its value.
inline long double fact2(int twice) {
    if (twice < 0 || twice % 2 != 0 || twice / 2 > max_factorial) {
        throw ValidationError("factorial argument out of range");
    }
    return factorials()[static_cast<std::size_t>(twice / 2)];
}

inline bool triangle(HalfInt a, HalfInt b, HalfInt c) {
    const int ta = a.twice(), tb = b.twice(), tc = c.twice();
    if (ta < 0 || tb < 0 || tc < 0) return false;
    if ((ta + tb + tc) % 2 != 0) return false;
    return tc >= std::abs(ta - tb) && tc <= ta + tb;
}

/// Triangle coefficient Delta(abc) = sqrt((a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!).
inline long double delta_coefficient(HalfInt a, HalfInt b, HalfInt c) {
    const int ta = a.twice(), tb = b.twice(), tc = c.twice();
    return std::sqrt(fact2(ta + tb - tc) * fact2(ta - tb + tc) * fact2(-ta + tb + tc) /
                     fact2(ta + tb + tc + 2));
}

inline int phase(int twice_exponent) {
    // (-1)^(twice_exponent/2), exponent must be an integer
    return ((twice_exponent / 2) % 2 == 0) ? 1 : -1;
}

}  // namespace detail

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) via the Racah formula.
inline double wigner_3j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt m1, HalfInt m2, HalfInt m3) {
    using detail::fact2;
    if ((m1 + m2 + m3).twice() != 0) return 0.0;
    if (!detail::triangle(j1, j2, j3)) return 0.0;
    if (abs(m1) > j1 || abs(m2) > j2 || abs(m3) > j3) return 0.0;
    if ((j1 + m1).twice() % 2 != 0 || (j2 + m2).twice() % 2 != 0 || (j3 + m3).twice() % 2 != 0) {
        return 0.0;
    }
    const int a1 = j1.twice(), a2 = j2.twice(), a3 = j3.twice();
    const int b1 = m1.twice(), b2 = m2.twice(), b3 = m3.twice();

    const long double pre = detail::delta_coefficient(j1, j2, j3) *
                            std::sqrt(fact2(a1 + b1) * fact2(a1 - b1) * fact2(a2 + b2) *
                                      fact2(a2 - b2) * fact2(a3 + b3) * fact2(a3 - b3));

    // sum over k (twice units)
    const int kmin = std::max({0, a2 - a3 - b1, a1 - a3 + b2});
    const int kmax = std::min({a1 + a2 - a3, a1 - b1, a2 + b2});
    long double sum = 0.0L;
    for (int k = kmin; k <= kmax; k += 2) {
        const long double den = fact2(k) * fact2(a1 + a2 - a3 - k) * fact2(a1 - b1 - k) *
                                fact2(a2 + b2 - k) * fact2(a3 - a2 + b1 + k) *
                                fact2(a3 - a1 - b2 + k);
        sum += detail::phase(k) / den;
    }
    return static_cast<double>(detail::phase(a1 - a2 - b3) * pre * sum);
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6}.
inline double wigner_6j(HalfInt j1, HalfInt j2, HalfInt j3, HalfInt j4, HalfInt j5, HalfInt j6) {
    using detail::fact2;
    if (!detail::triangle(j1, j2, j3) || !detail::triangle(j1, j5, j6) ||
        !detail::triangle(j4, j2, j6) || !detail::triangle(j4, j5, j3)) {
        return 0.0;
    }
    const int a = j1.twice(), b = j2.twice(), c = j3.twice();
    const int d = j4.twice(), e = j5.twice(), f = j6.twice();
    const long double pre = detail::delta_coefficient(j1, j2, j3) *
                            detail::delta_coefficient(j1, j5, j6) *
                            detail::delta_coefficient(j4, j2, j6) *
                            detail::delta_coefficient(j4, j5, j3);
    const int tmin = std::max({a + b + c, a + e + f, d + b + f, d + e + c});
    const int tmax = std::min({a + b + d + e, b + c + e + f, a + c + d + f});
    long double sum = 0.0L;
    for (int t = tmin; t <= tmax; t += 2) {
        const long double den = fact2(t - a - b - c) * fact2(t - a - e - f) *
                                fact2(t - d - b - f) * fact2(t - d - e - c) *
                                fact2(a + b + d + e - t) * fact2(b + c + e + f - t) *
                                fact2(a + c + d + f - t);
        sum += detail::phase(t) * fact2(t + 2) / den;
    }
    return static_cast<double>(pre * sum);
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2, HalfInt J, HalfInt M) {
    if ((m1 + m2) != M) return 0.0;
    const double w = wigner_3j(j1, j2, J, m1, m2, -M);
    if (w == 0.0) return 0.0;
    return detail::phase((j1 - j2 + M).twice()) * std::sqrt(J.twice() + 1.0) * w;
}

/// Shorthand taking doubles, e.g. cg(1, 0, 1, 0, 2, 0).
inline double cg(double j1, double m1, double j2, double m2, double J, double M) {
    return clebsch_gordan(HalfInt::from_double(j1), HalfInt::from_double(m1),
                          HalfInt::from_double(j2), HalfInt::from_double(m2),
                          HalfInt::from_double(J), HalfInt::from_double(M));
}

}  // namespace fret3
