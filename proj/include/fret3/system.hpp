#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "atomic_data.hpp"
#include "dipole.hpp"
#include "errors.hpp"
#include "units.hpp"

namespace fret3 {

/// Largest dc field accepted by the perturbative Stark treatment, V/cm.
inline constexpr double stark_field_guard_vcm = 0.5;

/// Default half-width of the principal-quantum-number window of Stark perturbers.
inline constexpr int default_stark_window = 6;

/// Species data plus the memo caches shared by every calculation.
///
/// Immutable after construction apart from the internal caches, which are
/// guarded and safe for concurrent use.
class RydbergSystem {
public:
    explicit RydbergSystem(SpeciesData data, int stark_window = default_stark_window)
        : data_(std::make_unique<SpeciesData>(std::move(data))),
          radial_(std::make_unique<RadialCache>(data_->defects)),
          stark_window_(stark_window) {}

    const SpeciesData& data() const { return *data_; }
    const QuantumDefectTable& defects() const { return data_->defects; }
    const LifetimeModel& lifetimes() const { return data_->lifetimes; }
    const RadialCache& radial() const { return *radial_; }
    int stark_window() const { return stark_window_; }

    double energy_mhz(const RydbergState& s) const { return level_energy_mhz(s, defects()); }
    double decay(const RydbergState& s) const { return decay_rate(s, defects(), lifetimes()); }

    /// <to | r_q | from> in e*a0.
    double dipole(const RydbergState& from, const RydbergState& to, int q) const {
        return dipole_component(from, to, q, *radial_).value;
    }

    /// Coefficient k of the quadratic Stark shift dE = k * E^2, in MHz/(V/cm)^2.
    double stark_coefficient(const RydbergState& s) const {
        {
            std::shared_lock lock(stark_mutex_);
            auto it = stark_.find(s);
            if (it != stark_.end()) return it->second;
        }
        const double k = stark_coefficient_uncached(s, stark_window_);
        std::unique_lock lock(stark_mutex_);
        stark_.emplace(s, k);
        return k;
    }

    /// Second-order perturbation sum over dipole-coupled levels n' in [n-window, n+window].
    double stark_coefficient_uncached(const RydbergState& s, int window) const {
        const double e_s = energy_mhz(s) / units::hartree_mhz;
        double sum = 0.0;  // hartree per (field a.u.)^2
        for (int n2 = std::max(1, s.n - window); n2 <= s.n + window; ++n2) {
            for (int l2 : {s.l - 1, s.l + 1}) {
                if (l2 < 0 || l2 >= n2) continue;
                for (int tj : {2 * l2 - 1, 2 * l2 + 1}) {
                    if (tj < 1) continue;
                    const RydbergState k{n2, l2, HalfInt::from_twice(tj), s.mj};
                    if (abs(k.mj) > k.j) continue;
                    if (!defects().contains(series_of(k))) continue;
                    const double ang = dipole_angular(k, s, 0);
                    if (ang == 0.0) continue;
                    const double d = ang * radial_->get(s, k);
                    const double e_k = energy_mhz(k) / units::hartree_mhz;
                    sum += d * d / (e_s - e_k);
                }
            }
        }
        const double per_vcm = 1.0 / units::field_au_vcm;
        return sum * per_vcm * per_vcm * units::hartree_mhz;
    }

private:
    std::unique_ptr<SpeciesData> data_;
    std::unique_ptr<RadialCache> radial_;
    int stark_window_;
    mutable std::shared_mutex stark_mutex_;
    mutable std::map<RydbergState, double> stark_;
};

/// Quadratic Stark shift of a single atom in a dc field along Z, h*MHz.
inline double single_atom_stark_shift(const RydbergSystem& sys, const RydbergState& s,
                                      double field_vcm) {
    if (!(field_vcm >= 0.0) || field_vcm > stark_field_guard_vcm) {
        throw OutOfRegimeError("field " + std::to_string(field_vcm) +
                               " V/cm outside the quadratic Stark regime [0, " +
                               std::to_string(stark_field_guard_vcm) + "]");
    }
    if (field_vcm == 0.0) return 0.0;
    return sys.stark_coefficient(s) * field_vcm * field_vcm;
}

}  // namespace fret3
