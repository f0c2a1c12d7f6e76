#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "atomic_data.hpp"
#include "errors.hpp"
#include "units.hpp"

// Radial dipole integrals <n1 l1 j1 | r | n2 l2 j2> in Bohr radii.
//
// Sign convention: radial functions are positive in their outermost lobe
// (the convention the quasiclassical expression naturally carries). The
// Numerov oracle starts its inward integration with a positive value and so
// shares the convention.

namespace fret3 {

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1].
template <std::size_t N>
struct GaussLegendre {
    std::array<double, N> x{};
    std::array<double, N> w{};

    GaussLegendre() {
        for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
            double z = std::cos(units::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(N) + 0.5));
            double dp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = z;
                for (std::size_t k = 2; k <= N; ++k) {
                    const double pk = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                    p0 = p1;
                    p1 = pk;
                }
                dp = static_cast<double>(N) * (z * p1 - p0) / (z * z - 1.0);
                const double dz = p1 / dp;
                z -= dz;
                if (std::abs(dz) < 1e-16) break;
            }
            x[i] = -z;
            x[N - 1 - i] = z;
            w[i] = w[N - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
        }
    }
};

inline const GaussLegendre<96>& gauss_legendre_96() {
    static const GaussLegendre<96> g;
    return g;
}

}  // namespace detail

/// Anger function J_nu(z) = (1/pi) * integral_0^pi cos(nu*t - z*sin t) dt.
inline double anger_j(double nu, double z) {
    const auto& g = detail::gauss_legendre_96();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double t = 0.5 * units::pi * (g.x[i] + 1.0);
        sum += g.w[i] * std::cos(nu * t - z * std::sin(t));
    }
    return 0.5 * sum;
}

/// Quasiclassical radial integral between two effective principal quantum
/// numbers and orbital momenta |l1 - l2| = 1 (Kaulakys 1995 form).
inline double radial_qc_effective(double nstar1, int l1, double nstar2, int l2) {
    if (std::abs(l1 - l2) != 1) {
        throw SelectionRuleError("radial dipole integral requires |l1 - l2| = 1");
    }
    // canonical order: lower effective n first, so the result is symmetric by construction
    if (nstar1 > nstar2) {
        std::swap(nstar1, nstar2);
        std::swap(l1, l2);
    }
    const double s = nstar2 - nstar1;
    const int dl = l2 - l1;
    const double lc = std::max(l1, l2);
    const double nc = 2.0 * nstar1 * nstar2 / (nstar1 + nstar2);
    const double gamma = dl * lc / nc;

    double g0 = 1.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
    if (std::abs(s) > 1e-10) {
        const double jm = anger_j(s - 1.0, -s);
        const double jp = anger_j(s + 1.0, -s);
        g0 = (jm - jp) / (3.0 * s);
        g1 = -(jm + jp) / (3.0 * s);
        g2 = g0 - std::sin(units::pi * s) / (units::pi * s);
        g3 = 0.5 * s * g0 + g1;
    }
    const double poly = g0 + gamma * g1 + gamma * gamma * g2 + gamma * gamma * gamma * g3;
    return 1.5 * nc * nc * std::sqrt(1.0 - (lc / nc) * (lc / nc)) * poly;
}

/// Quasiclassical radial integral <s1|r|s2> (a0).
inline double radial_qc(const RydbergState& s1, const RydbergState& s2,
                        const QuantumDefectTable& table) {
    if (std::abs(s1.l - s2.l) != 1) {
        throw SelectionRuleError("radial_qc: " + s1.level_label() + " -> " + s2.level_label() +
                                 " violates |dl| = 1");
    }
    return radial_qc_effective(table.effective_n(s1.n, series_of(s1)), s1.l,
                               table.effective_n(s2.n, series_of(s2)), s2.l);
}

/// Radial function P(r) = r R(r) on a uniform grid r_i = i*h, i in [first, last].
struct RadialWavefunction {
    double step = 0.0;
    std::size_t first = 0;
    std::vector<double> values;

    std::size_t last() const { return first + values.size() - 1; }
};

/// Inward Numerov integration of the Coulomb radial equation at the
/// quantum-defect energy -1/(2 n*^2). The integration stops inside the inner
/// turning point as soon as the solution starts to grow, and is normalised.
inline RadialWavefunction numerov_wavefunction(double nstar, int l, double step = 0.01) {
    if (!(nstar > l) || step <= 0.0) throw ValidationError("numerov: bad arguments");
    const double energy = -0.5 / (nstar * nstar);
    const double ll = l * (l + 1.0);
    const double r_outer = 2.0 * nstar * (nstar + 15.0);
    const double r_inner_turn = nstar * nstar - nstar * std::sqrt(nstar * nstar - ll);
    const auto n_outer = static_cast<std::size_t>(std::ceil(r_outer / step));

    auto f = [&](std::size_t i) {
        const double r = static_cast<double>(i) * step;
        return ll / (r * r) - 2.0 / r - 2.0 * energy;
    };
    const double h2 = step * step / 12.0;

    std::vector<double> p;  // stored from the outside in
    p.reserve(n_outer);
    const double kappa = std::sqrt(-2.0 * energy);
    p.push_back(1e-30);
    p.push_back(1e-30 * std::exp(kappa * step));
    std::size_t i = n_outer - 1;  // index of p.back()
    double f_next = f(n_outer), f_cur = f(i);
    while (i > 1) {
        const double f_prev = f(i - 1);
        const double p_prev = (2.0 * (1.0 + 5.0 * h2 * f_cur) * p[p.size() - 1] -
                               (1.0 - h2 * f_next) * p[p.size() - 2]) /
                              (1.0 - h2 * f_prev);
        const double r_prev = static_cast<double>(i - 1) * step;
        if (r_prev < r_inner_turn && std::abs(p_prev) > std::abs(p.back())) break;
        p.push_back(p_prev);
        f_next = f_cur;
        f_cur = f_prev;
        --i;
    }
    std::reverse(p.begin(), p.end());

    RadialWavefunction wf;
    wf.step = step;
    wf.first = i;
    wf.values = std::move(p);

    double norm = 0.0;
    for (double v : wf.values) norm += v * v;
    norm = std::sqrt(norm * step);
    // outermost lobe positive
    double sign = 1.0;
    for (auto it = wf.values.rbegin(); it != wf.values.rend(); ++it) {
        if (std::abs(*it) > 1e-6 * norm) {
            sign = *it > 0 ? 1.0 : -1.0;
            break;
        }
    }
    for (double& v : wf.values) v *= sign / norm;
    return wf;
}

/// <P1| r |P2> on the common grid.
inline double radial_overlap_r(const RadialWavefunction& a, const RadialWavefunction& b) {
    if (a.step != b.step) throw ValidationError("radial_overlap_r: grids differ");
    const std::size_t lo = std::max(a.first, b.first);
    const std::size_t hi = std::min(a.last(), b.last());
    double sum = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) {
        sum += a.values[i - a.first] * b.values[i - b.first] * static_cast<double>(i) * a.step;
    }
    return sum * a.step;
}

/// Radial integral by direct Numerov integration in the Coulomb potential.
/// Used as the independent oracle for radial_qc.
inline double radial_numerov(const RydbergState& s1, const RydbergState& s2,
                             const QuantumDefectTable& table, double step = 0.01) {
    if (std::abs(s1.l - s2.l) != 1) {
        throw SelectionRuleError("radial_numerov: " + s1.level_label() + " -> " +
                                 s2.level_label() + " violates |dl| = 1");
    }
    const auto w1 = numerov_wavefunction(table.effective_n(s1.n, series_of(s1)), s1.l, step);
    const auto w2 = numerov_wavefunction(table.effective_n(s2.n, series_of(s2)), s2.l, step);
    return radial_overlap_r(w1, w2);
}

}  // namespace fret3
