#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "collective.hpp"
#include "errors.hpp"
#include "system.hpp"
#include "units.hpp"

namespace fret3 {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Trap positions along Z (um), collinear with the quantization axis and the field.
struct Geometry {
    std::vector<double> z_um;

    static Geometry equidistant(double spacing_um, std::size_t count = 3) {
        Geometry g;
        for (std::size_t i = 0; i < count; ++i) g.z_um.push_back(spacing_um * static_cast<double>(i));
        return g;
    }

    void validate() const {
        for (std::size_t i = 1; i < z_um.size(); ++i) {
            if (!(z_um[i] > z_um[i - 1])) {
                throw ValidationError("trap positions must be strictly increasing");
            }
        }
    }

    double distance(std::size_t i, std::size_t j) const { return std::abs(z_um.at(j) - z_um.at(i)); }

    /// Positions of a subset of traps, e.g. the Rydberg atoms of one gate configuration.
    Geometry subset(const std::vector<std::size_t>& traps) const {
        Geometry g;
        for (auto t : traps) g.z_um.push_back(z_um.at(t));
        return g;
    }
};

/// Clebsch-Gordan weights C(1 q 1 -q | 2 0) of the collinear dipole-dipole operator.
inline const std::array<double, 3>& vdd_weights() {
    static const std::array<double, 3> w = {cg(1, -1, 1, 1, 2, 0), cg(1, 0, 1, 0, 2, 0),
                                            cg(1, 1, 1, -1, 2, 0)};
    return w;
}

/// <b| V_dd |a> for atoms i and j of a collective state, h*MHz.
///
///   V_dd = -sqrt(6)/R^3 * sum_q C(1 q 1 -q | 2 0) a_q b_-q     (atomic units)
///
/// Returns 0 when a and b differ in any atom other than i and j (the operator
/// is the identity there) or when selection rules fail.
inline double pair_coupling(const RydbergSystem& sys, const CollectiveState& a,
                            const CollectiveState& b, std::size_t i, std::size_t j,
                            const Geometry& geometry) {
    if (a.size() != b.size() || i == j || i >= a.size() || j >= a.size() ||
        geometry.z_um.size() != a.size()) {
        throw InvalidPairError("pair_coupling: invalid atom pair (" + std::to_string(i) + ", " +
                               std::to_string(j) + ") for " + std::to_string(a.size()) +
                               "-atom states");
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (k != i && k != j && a.atoms[k] != b.atoms[k]) return 0.0;
    }
    const auto& ai = a.atoms[i];
    const auto& aj = a.atoms[j];
    const auto& bi = b.atoms[i];
    const auto& bj = b.atoms[j];
    const int q = (bi.mj - ai.mj).twice();
    if (q % 2 != 0 || std::abs(q) > 2 || (bj.mj - aj.mj).twice() != -q) return 0.0;
    const int qi = q / 2;
    const double di = sys.dipole(ai, bi, qi);
    if (di == 0.0) return 0.0;
    const double dj = sys.dipole(aj, bj, -qi);
    if (dj == 0.0) return 0.0;
    const double r = units::um_to_bohr(geometry.distance(i, j));
    const double w = vdd_weights()[static_cast<std::size_t>(qi + 1)];
    return -std::sqrt(6.0) * w * di * dj / (r * r * r) * units::hartree_mhz;
}

/// Field-independent dipole-dipole part of the Hamiltonian over a basis.
class CouplingMatrix {
public:
    CouplingMatrix(const RydbergSystem& sys, const BasisSet& basis, const Geometry& geometry)
        : geometry_(geometry), matrix_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(basis.size()),
                                                             static_cast<Eigen::Index>(basis.size()))) {
        geometry.validate();
        if (!basis.empty() && geometry.z_um.size() != basis.initial().size()) {
            throw ValidationError("geometry has " + std::to_string(geometry.z_um.size()) +
                                  " traps but states have " +
                                  std::to_string(basis.initial().size()) + " atoms");
        }
        const std::size_t n = basis.size();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t c = r + 1; c < n; ++c) {
                const auto& sa = basis[r].atoms;
                const auto& sb = basis[c].atoms;
                std::size_t diff[3];
                std::size_t nd = 0;
                for (std::size_t k = 0; k < sa.size() && nd < 3; ++k) {
                    if (sa[k] != sb[k]) diff[nd++] = k;
                }
                if (nd != 2) continue;
                const double v = pair_coupling(sys, basis[r], basis[c], diff[0], diff[1], geometry);
                matrix_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
                matrix_(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
            }
        }
    }

    const Eigen::MatrixXd& matrix() const { return matrix_; }
    const Geometry& geometry() const { return geometry_; }

private:
    Geometry geometry_;
    Eigen::MatrixXd matrix_;
};

/// Unordered single-atom level pairs (m_j ignored) joined by a nonzero
/// basis coupling; the radial integrals that actually enter H.
inline std::set<std::pair<RydbergState, RydbergState>> coupled_level_pairs(const BasisSet& basis,
                                                                          const CouplingMatrix& couplings) {
    std::set<std::pair<RydbergState, RydbergState>> out;
    const auto& m = couplings.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = r + 1; c < m.cols(); ++c) {
            if (m(r, c) == 0.0) continue;
            const auto& a = basis[static_cast<std::size_t>(r)].atoms;
            const auto& b = basis[static_cast<std::size_t>(c)].atoms;
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (a[k] == b[k]) continue;
                RydbergState x = a[k], y = b[k];
                x.mj = y.mj = half;
                if (y < x) std::swap(x, y);
                out.emplace(x, y);
            }
        }
    }
    return out;
}

/// Non-Hermitian Hamiltonian over a basis, in h*MHz.
///
/// Diagonal: collective Stark energy minus i*Gamma/(4 pi), where Gamma (1/us) is
/// the summed single-atom decay rate, so that |amplitude|^2 decays as
/// exp(-Gamma t) under i d/dt psi = 2 pi H psi (t in us).
struct HamiltonianModel {
    ComplexMatrix matrix;
    double field_vcm = 0.0;
    Geometry geometry;
};

/// Decay width Gamma/(2 pi) of a collective state in MHz (sum over atoms).
inline double collective_decay_width_mhz(const RydbergSystem& sys, const CollectiveState& cs) {
    double g = 0.0;
    for (const auto& a : cs.atoms) g += sys.decay(a);
    return g / (2.0 * units::pi);
}

inline HamiltonianModel assemble(const RydbergSystem& sys, const BasisSet& basis,
                                 const CouplingMatrix& couplings, double field_vcm,
                                 bool with_decay = true) {
    if (basis.empty()) throw EmptyBasisError("cannot assemble a Hamiltonian over an empty basis");
    const auto n = static_cast<Eigen::Index>(basis.size());
    if (couplings.matrix().rows() != n) throw ValidationError("coupling matrix does not match basis");
    HamiltonianModel h{couplings.matrix().cast<Complex>(), field_vcm, couplings.geometry()};
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto& cs = basis[static_cast<std::size_t>(k)];
        const double e = collective_energy(sys, cs, field_vcm, basis.initial());
        const double width = with_decay ? collective_decay_width_mhz(sys, cs) : 0.0;
        h.matrix(k, k) = Complex(e, -0.5 * width);
    }
    return h;
}

inline HamiltonianModel assemble(const RydbergSystem& sys, const BasisSet& basis, double field_vcm,
                                 const Geometry& geometry, bool with_decay = true) {
    return assemble(sys, basis, CouplingMatrix(sys, basis, geometry), field_vcm, with_decay);
}

}  // namespace fret3
