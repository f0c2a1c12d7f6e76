#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "collective.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "parallel.hpp"

namespace fret3 {

/// rho(T) on a field grid for a fixed interaction time.
inline std::vector<double> resonance_scan(const RydbergSystem& sys, const BasisSet& basis,
                                          const CouplingMatrix& couplings, const std::vector<double>& fields_vcm,
                                          double t_us, const std::function<bool(const RydbergState&)>& target,
                                          double tolerance = 1e-10, int jobs = 1) {
    if (fields_vcm.empty()) throw ValidationError("resonance scan: empty field grid");
    std::vector<double> rho(fields_vcm.size());
    const auto psi0 = basis_vector(static_cast<Eigen::Index>(basis.size()));
    parallel_for(fields_vcm.size(), jobs, [&](std::size_t i) {
        const auto h = assemble(sys, basis, couplings, fields_vcm[i]);
        rho[i] = transfer_fraction(evolve(h, psi0, t_us, tolerance, 1), basis, target).back();
    });
    return rho;
}

/// A resonant feature of a scanned curve.
struct Feature {
    std::size_t index = 0;
    double position = 0.0;  ///< parabolic refinement of the grid maximum
    double height = 0.0;
    double prominence = 0.0;
};

/// Topographic prominence of the local maximum at i: height above the higher
/// of the two lowest points separating it from taller ground on either side.
inline double prominence(const std::vector<double>& y, std::size_t i) {
    double left_min = y[i];
    std::size_t l = i;
    while (l > 0) {
        --l;
        if (y[l] > y[i]) break;
        left_min = std::min(left_min, y[l]);
    }
    double right_min = y[i];
    std::size_t r = i;
    while (r + 1 < y.size()) {
        ++r;
        if (y[r] > y[i]) break;
        right_min = std::min(right_min, y[r]);
    }
    return y[i] - std::max(left_min, right_min);
}

/// Local maxima whose prominence is at least `min_fraction` of the largest
/// value, sorted by position. Small ripples of a fixed-time scan are dropped.
inline std::vector<Feature> find_features(const std::vector<double>& x, const std::vector<double>& y,
                                          double min_fraction = 0.2) {
    if (x.size() != y.size()) throw ValidationError("find_features: size mismatch");
    std::vector<Feature> out;
    if (y.empty()) return out;
    const double top = *std::max_element(y.begin(), y.end());
    if (!(top > 0.0)) return out;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool left = i == 0 || y[i] > y[i - 1];
        const bool right = i + 1 == y.size() || y[i] >= y[i + 1];
        if (!left || !right) continue;
        const double p = prominence(y, i);
        if (p < min_fraction * top) continue;
        Feature f{i, x[i], y[i], p};
        if (i > 0 && i + 1 < y.size()) {
            const double a = y[i - 1], b = y[i], c = y[i + 1];
            const double denom = a - 2.0 * b + c;
            if (denom < 0.0) {
                const double shift = 0.5 * (a - c) / denom;
                f.position = x[i] + shift * 0.5 * (x[i + 1] - x[i - 1]);
            }
        }
        out.push_back(f);
    }
    return out;
}

/// Strongest feature (largest height); throws if there is none.
inline Feature strongest(const std::vector<Feature>& features) {
    if (features.empty()) throw NumericalError("no resonant feature found");
    return *std::max_element(features.begin(), features.end(),
                             [](const Feature& a, const Feature& b) { return a.height < b.height; });
}

}  // namespace fret3
