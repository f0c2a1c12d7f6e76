#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "angular.hpp"
#include "atomic_data.hpp"
#include "radial.hpp"

// Electric-dipole matrix elements of single-atom fine-structure states.
//
// Convention (Condon-Shortley phases throughout):
//
//   <n l j m | r_q | n' l' j' m'> = (-1)^(j-m) (j 1 j'; -m q m') <l j || r || l' j'>
//   <l j || r || l' j'> = (-1)^(l+s+j'+1) sqrt((2j+1)(2j'+1)) {l j s; j' l' 1} <l || r || l'>
//   <l || r || l'>      = (-1)^l sqrt((2l+1)(2l'+1)) (l 1 l'; 0 0 0) R
//
// with R the radial integral (positive-outer-lobe convention, see radial.hpp).

namespace fret3 {

/// Angular part of <to | r_q | from> (the full element divided by the radial integral).
inline double dipole_angular(const RydbergState& to, const RydbergState& from, int q) {
    if (std::abs(to.l - from.l) != 1) return 0.0;
    if (to.mj.twice() != from.mj.twice() + 2 * q) return 0.0;
    const HalfInt one = HalfInt::integer(1);
    const HalfInt hq = HalfInt::integer(q);
    const HalfInt lt = HalfInt::integer(to.l), lf = HalfInt::integer(from.l);

    const double w3 = wigner_3j(to.j, one, from.j, -to.mj, hq, from.mj);
    if (w3 == 0.0) return 0.0;
    const double w6 = wigner_6j(lt, to.j, half, from.j, lf, one);
    if (w6 == 0.0) return 0.0;
    const double wl = wigner_3j(lt, one, lf, HalfInt{}, HalfInt{}, HalfInt{});

    const double p1 = detail::phase((to.j - to.mj).twice());
    const double p2 = detail::phase((lt + half + from.j + one).twice());
    const double p3 = (to.l % 2 == 0) ? 1.0 : -1.0;
    return p1 * w3 * p2 * std::sqrt((to.j.twice() + 1.0) * (from.j.twice() + 1.0)) * w6 * p3 *
           std::sqrt((2.0 * to.l + 1.0) * (2.0 * from.l + 1.0)) * wl;
}

/// Thread-safe memo of quasiclassical radial integrals keyed by the two levels.
class RadialCache {
public:
    explicit RadialCache(const QuantumDefectTable& table) : table_(&table) {}

    RadialCache(const RadialCache&) = delete;
    RadialCache& operator=(const RadialCache&) = delete;

    double get(const RydbergState& a, const RydbergState& b) const {
        Key ka{a.n, a.l, a.j.twice()}, kb{b.n, b.l, b.j.twice()};
        if (kb < ka) std::swap(ka, kb);
        const auto key = std::make_pair(ka, kb);
        {
            std::shared_lock lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        const double v = radial_qc(a, b, *table_);
        std::unique_lock lock(mutex_);
        cache_.emplace(key, v);
        return v;
    }

    std::size_t size() const {
        std::shared_lock lock(mutex_);
        return cache_.size();
    }

private:
    using Key = std::tuple<int, int, int>;
    const QuantumDefectTable* table_;
    mutable std::shared_mutex mutex_;
    mutable std::map<std::pair<Key, Key>, double> cache_;
};

/// <to | r_q | from> for the transition from -> to; nonzero only if
/// |l_to - l_from| = 1 and m_to - m_from = q.
struct DipoleMatrixElement {
    RydbergState from;
    RydbergState to;
    int q = 0;
    double value = 0.0;  ///< e*a0
};

inline DipoleMatrixElement dipole_component(const RydbergState& from, const RydbergState& to,
                                            int q, const RadialCache& radial) {
    DipoleMatrixElement d{from, to, q, 0.0};
    const double ang = dipole_angular(to, from, q);
    if (ang != 0.0) d.value = ang * radial.get(from, to);
    return d;
}

}  // namespace fret3
