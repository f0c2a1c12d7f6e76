#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "angular.hpp"
#include "errors.hpp"
#include "quantum_numbers.hpp"
#include "system.hpp"

namespace fret3 {

/// Product state of the Rydberg atoms of a register, ordered by trap position.
///
/// Ground-state atoms are not represented: a configuration with two Rydberg
/// atoms is a two-entry CollectiveState placed at the matching positions.
struct CollectiveState {
    std::vector<RydbergState> atoms;

    auto operator<=>(const CollectiveState&) const = default;

    std::size_t size() const { return atoms.size(); }

    /// Total projection M = sum of m_j.
    HalfInt total_projection() const {
        HalfInt m;
        for (const auto& a : atoms) m += a.mj;
        return m;
    }

    /// "70P3/2(1/2);70P3/2(1/2);70P3/2(1/2)"
    std::string label() const {
        std::string out;
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (i) out += ';';
            out += atoms[i].label();
        }
        return out;
    }
};

/// n copies of one single-atom state.
inline CollectiveState uniform_state(const RydbergState& s, std::size_t count) {
    return CollectiveState{std::vector<RydbergState>(count, s)};
}

/// Zero-field energy of a collective state, h*MHz relative to the ionization limits.
inline double bare_collective_energy(const RydbergSystem& sys, const CollectiveState& cs) {
    double e = 0.0;
    for (const auto& a : cs.atoms) e += sys.energy_mhz(a);
    return e;
}

/// Energy of cs at field E (V/cm), h*MHz relative to `reference` at zero field.
inline double collective_energy(const RydbergSystem& sys, const CollectiveState& cs,
                                double field_vcm, const CollectiveState& reference) {
    double e = 0.0;
    for (const auto& a : cs.atoms) {
        e += sys.energy_mhz(a) + single_atom_stark_shift(sys, a, field_vcm);
    }
    return e - bare_collective_energy(sys, reference);
}

/// Rules of the breadth-first basis expansion.
struct BasisRule {
    int hops = 2;
    double defect_cutoff_ghz = 2.2;
    int max_dn = 4;  ///< per-atom |dn| of one dipole step
    int max_l = 3;
};

/// Deterministically ordered collective basis with index lookup.
class BasisSet {
public:
    BasisSet() = default;
    BasisSet(std::vector<CollectiveState> states, BasisRule rule)
        : states_(std::move(states)), rule_(rule) {
        for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i], i);
    }

    std::size_t size() const { return states_.size(); }
    bool empty() const { return states_.empty(); }
    const CollectiveState& operator[](std::size_t i) const { return states_[i]; }
    const CollectiveState& initial() const { return states_.front(); }
    const std::vector<CollectiveState>& states() const { return states_; }
    const BasisRule& rule() const { return rule_; }

    std::optional<std::size_t> index_of(const CollectiveState& cs) const {
        auto it = index_.find(cs);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Provenance line recorded in output headers.
    std::string provenance() const {
        return "hops=" + std::to_string(rule_.hops) +
               " defect_cutoff_ghz=" + std::to_string(rule_.defect_cutoff_ghz) +
               " max_dn=" + std::to_string(rule_.max_dn) + " max_l=" + std::to_string(rule_.max_l) +
               " size=" + std::to_string(states_.size());
    }

private:
    std::vector<CollectiveState> states_;
    std::map<CollectiveState, std::size_t> index_;
    BasisRule rule_;
};

/// Single-atom states reachable from s by one electric-dipole step.
inline std::vector<RydbergState> dipole_neighbours(const RydbergSystem& sys, const RydbergState& s,
                                                   int max_dn, int max_l) {
    std::vector<RydbergState> out;
    for (int n2 = std::max(1, s.n - max_dn); n2 <= s.n + max_dn; ++n2) {
        for (int l2 : {s.l - 1, s.l + 1}) {
            if (l2 < 0 || l2 >= n2 || l2 > max_l) continue;
            for (int tj : {2 * l2 - 1, 2 * l2 + 1}) {
                if (tj < 1) continue;
                for (int q = -1; q <= 1; ++q) {
                    const RydbergState t{n2, l2, HalfInt::from_twice(tj), s.mj + HalfInt::integer(q)};
                    if (abs(t.mj) > t.j) continue;
                    if (!sys.defects().contains(series_of(t))) continue;
                    if (dipole_angular(t, s, q) == 0.0) continue;
                    out.push_back(t);
                }
            }
        }
    }
    return out;
}

/// Breadth-first expansion of the collective basis around `initial`.
///
/// A hop replaces the states of two atoms by one dipole step each, keeping the
/// total projection M; states whose zero-field Forster defect exceeds the
/// cutoff are discarded (and not expanded further). The initial state is
/// index 0; the rest are sorted by |defect|, then by quantum numbers.
inline BasisSet build_basis(const RydbergSystem& sys, const CollectiveState& initial,
                            BasisRule rule) {
    if (initial.atoms.empty()) throw EmptyBasisError("initial collective state has no atoms");
    for (const auto& a : initial.atoms) {
        if (!is_valid(a) || !sys.defects().contains(series_of(a))) {
            throw EmptyBasisError("initial state " + initial.label() + " is not admissible");
        }
    }
    if (rule.hops < 0 || !(rule.defect_cutoff_ghz > 0.0)) {
        throw ValidationError("basis rule needs hops >= 0 and cutoff > 0");
    }
    const double e0 = bare_collective_energy(sys, initial);
    const double cutoff_mhz = rule.defect_cutoff_ghz * 1e3;
    const HalfInt m0 = initial.total_projection();

    std::map<RydbergState, std::vector<RydbergState>> neighbours;
    auto neighbours_of = [&](const RydbergState& s) -> const std::vector<RydbergState>& {
        auto it = neighbours.find(s);
        if (it == neighbours.end()) {
            it = neighbours.emplace(s, dipole_neighbours(sys, s, rule.max_dn, rule.max_l)).first;
        }
        return it->second;
    };

    std::map<CollectiveState, double> seen{{initial, 0.0}};
    std::vector<CollectiveState> frontier{initial};
    const std::size_t n_atoms = initial.size();
    for (int hop = 0; hop < rule.hops; ++hop) {
        std::vector<CollectiveState> next;
        for (const auto& cs : frontier) {
            for (std::size_t i = 0; i < n_atoms; ++i) {
                for (std::size_t j = i + 1; j < n_atoms; ++j) {
                    const auto& a = cs.atoms[i];
                    const auto& b = cs.atoms[j];
                    const HalfInt pair_m = a.mj + b.mj;
                    for (const auto& a2 : neighbours_of(a)) {
                        for (const auto& b2 : neighbours_of(b)) {
                            if (a2.mj + b2.mj != pair_m) continue;
                            CollectiveState cand = cs;
                            cand.atoms[i] = a2;
                            cand.atoms[j] = b2;
                            if (seen.count(cand)) continue;
                            const double defect = bare_collective_energy(sys, cand) - e0;
                            if (std::abs(defect) > cutoff_mhz) continue;
                            seen.emplace(cand, defect);
                            next.push_back(std::move(cand));
                        }
                    }
                }
            }
        }
        frontier = std::move(next);
    }

    std::vector<std::pair<double, CollectiveState>> rest;
    rest.reserve(seen.size());
    for (auto& [cs, defect] : seen) {
        if (cs != initial) rest.emplace_back(std::abs(defect), cs);
    }
    std::sort(rest.begin(), rest.end());
    std::vector<CollectiveState> ordered;
    ordered.reserve(seen.size());
    ordered.push_back(initial);
    for (auto& [d, cs] : rest) {
        if (cs.total_projection() != m0) throw Error("basis expansion broke M conservation");
        ordered.push_back(std::move(cs));
    }
    return BasisSet(std::move(ordered), rule);
}

/// Field-vs-energy curves of a set of tracked collective states.
struct StarkMap {
    std::vector<double> fields_vcm;
    std::vector<CollectiveState> states;
    std::vector<std::vector<double>> energies_mhz;  ///< [state][field]
};

inline StarkMap stark_map(const RydbergSystem& sys, const std::vector<CollectiveState>& states,
                          const std::vector<double>& fields_vcm, const CollectiveState& reference) {
    for (std::size_t i = 1; i < fields_vcm.size(); ++i) {
        if (!(fields_vcm[i] > fields_vcm[i - 1])) {
            throw ValidationError("Stark map field grid must be strictly increasing");
        }
    }
    StarkMap m{fields_vcm, states, {}};
    for (const auto& cs : states) {
        std::vector<double> curve;
        curve.reserve(fields_vcm.size());
        for (double f : fields_vcm) curve.push_back(collective_energy(sys, cs, f, reference));
        m.energies_mhz.push_back(std::move(curve));
    }
    return m;
}

/// Fields in [lo, hi] where `gap` changes sign: grid bracketing with the given
/// step, then bisection to `tolerance`. Sorted ascending.
inline std::vector<double> find_sign_changes(const std::function<double(double)>& gap, double lo,
                                             double hi, double step, double tolerance = 1e-9) {
    if (!(step > 0.0) || !(hi >= lo)) throw ValidationError("find_resonances: bad range or step");
    std::vector<double> roots;
    double x0 = lo;
    double g0 = gap(x0);
    const auto n = static_cast<long>(std::ceil((hi - lo) / step - 1e-12));
    for (long k = 1; k <= n; ++k) {
        const double x1 = std::min(hi, lo + static_cast<double>(k) * step);
        const double g1 = gap(x1);
        if (g0 == 0.0) {
            roots.push_back(x0);
        } else if (g0 * g1 < 0.0) {
            double a = x0, b = x1, ga = g0;
            while (b - a > tolerance) {
                const double mid = 0.5 * (a + b);
                const double gm = gap(mid);
                if (gm == 0.0) {
                    a = b = mid;
                    break;
                }
                if ((gm < 0.0) == (ga < 0.0)) {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x0 = x1;
        g0 = g1;
    }
    if (g0 == 0.0 && (roots.empty() || roots.back() != x0)) roots.push_back(x0);
    return roots;
}

/// Fields where the bare energies of `initial` and `final_state` cross.
inline std::vector<double> find_resonances(const RydbergSystem& sys,
                                           const CollectiveState& initial,
                                           const CollectiveState& final_state, double lo,
                                           double hi, double step) {
    if (lo < 0.0 || hi > stark_field_guard_vcm) {
        throw OutOfRegimeError("resonance search range outside the Stark regime guard");
    }
    if (initial == final_state) throw ValidationError("find_resonances: initial and final states are identical");
    auto gap = [&](double f) {
        return collective_energy(sys, final_state, f, initial) -
               collective_energy(sys, initial, f, initial);
    };
    return find_sign_changes(gap, lo, hi, step);
}

}  // namespace fret3
