#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "collective.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "units.hpp"

namespace fret3 {

/// Amplitudes over a basis sampled on a time grid (us).
struct Trajectory {
    std::vector<double> times_us;
    std::vector<ComplexVector> amplitudes;
    /// Re H(0,0): bare Stark-shifted energy of basis state 0, h*MHz.
    double reference_energy_mhz = 0.0;
};

/// Propagator exp(-2 pi i H dt) with a step-doubling consistency check.
///
/// The single-step exponential is compared against two half steps; if they
/// differ by more than `tolerance` (max-abs element) the step is split until
/// they agree. Throws NumericalError for a non-finite H or if 2^20 sub-steps
/// are not enough.
inline ComplexMatrix step_propagator(const ComplexMatrix& h, double dt_us, double tolerance) {
    if (!(tolerance > 0.0)) throw ValidationError("evolve: tolerance must be positive");
    if (!h.allFinite()) throw NumericalError("evolve: Hamiltonian has non-finite entries");
    const Complex factor(0.0, -2.0 * units::pi);
    for (int split = 0; split <= 20; ++split) {
        const double sub = dt_us / std::ldexp(1.0, split);
        const ComplexMatrix full = (h * (factor * sub)).exp();
        const ComplexMatrix half_step = (h * (factor * (0.5 * sub))).exp();
        const ComplexMatrix two_halves = half_step * half_step;
        if ((full - two_halves).cwiseAbs().maxCoeff() <= tolerance) {
            ComplexMatrix p = two_halves;
            for (int k = 0; k < split; ++k) p = p * p;
            return p;
        }
    }
    throw NumericalError("evolve: propagator did not meet tolerance");
}

/// Integrates i d(psi)/dt = 2 pi H psi (H in h*MHz, t in us) from 0 to T and
/// samples the state at `samples` + 1 equally spaced times.
inline Trajectory evolve(const HamiltonianModel& h, const ComplexVector& psi0, double t_us,
                         double tolerance = 1e-10, int samples = 1) {
    const auto n = h.matrix.rows();
    if (psi0.size() != n) throw ValidationError("evolve: state/Hamiltonian size mismatch");
    if (std::abs(psi0.squaredNorm() - 1.0) > 1e-9) throw ValidationError("evolve: |psi0| != 1");
    if (!(t_us > 0.0)) throw ValidationError("evolve: T must be positive");
    if (samples < 1) throw ValidationError("evolve: need at least one sample");

    Trajectory traj;
    traj.reference_energy_mhz = h.matrix(0, 0).real();
    traj.times_us.reserve(static_cast<std::size_t>(samples) + 1);
    traj.amplitudes.reserve(static_cast<std::size_t>(samples) + 1);
    traj.times_us.push_back(0.0);
    traj.amplitudes.push_back(psi0);

    const double dt = t_us / samples;
    const ComplexMatrix step = step_propagator(h.matrix, dt, tolerance);
    ComplexVector psi = psi0;
    for (int k = 1; k <= samples; ++k) {
        psi = step * psi;
        traj.times_us.push_back(dt * k);
        traj.amplitudes.push_back(psi);
    }
    return traj;
}

/// Final state only.
inline ComplexVector evolve_final(const HamiltonianModel& h, const ComplexVector& psi0, double t_us,
                                  double tolerance = 1e-10) {
    return evolve(h, psi0, t_us, tolerance, 1).amplitudes.back();
}

/// Basis vector e_index.
inline ComplexVector basis_vector(Eigen::Index size, Eigen::Index index = 0) {
    ComplexVector v = ComplexVector::Zero(size);
    v(index) = 1.0;
    return v;
}

/// rho(t) = sum_k (matching atoms in state k / atom count) * |c_k(t)|^2.
inline std::vector<double> transfer_fraction(const Trajectory& traj, const BasisSet& basis,
                                             const std::function<bool(const RydbergState&)>& pred) {
    std::vector<double> weight(basis.size(), 0.0);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const auto& atoms = basis[k].atoms;
        int count = 0;
        for (const auto& a : atoms) count += pred(a) ? 1 : 0;
        weight[k] = atoms.empty() ? 0.0 : static_cast<double>(count) / static_cast<double>(atoms.size());
    }
    std::vector<double> rho;
    rho.reserve(traj.amplitudes.size());
    for (const auto& psi : traj.amplitudes) {
        double r = 0.0;
        for (Eigen::Index k = 0; k < psi.size(); ++k) r += weight[static_cast<std::size_t>(k)] * std::norm(psi(k));
        rho.push_back(r);
    }
    return rho;
}

/// Predicate matching one level irrespective of m_j (e.g. 71S1/2).
inline std::function<bool(const RydbergState&)> level_predicate(int n, int l, HalfInt j) {
    return [=](const RydbergState& s) { return s.n == n && s.l == l && s.j == j; };
}

struct PopulationPhase {
    std::vector<double> times_us;
    std::vector<double> population;
    std::vector<double> phase_rad;      ///< in (-pi, pi]; NaN where undefined
    std::vector<bool> phase_undefined;  ///< population below 1e-12
};

/// Wraps an angle into (-pi, pi].
inline double wrap_phase(double phi) {
    double w = std::remainder(phi, 2.0 * units::pi);
    if (w <= -units::pi) w += 2.0 * units::pi;
    return w;
}

/// Population and phase of basis state 0, phase measured in the rotating frame
/// of its own bare (Stark-shifted, non-interacting) energy.
inline PopulationPhase initial_state_population_phase(const Trajectory& traj) {
    if (traj.amplitudes.empty()) throw ValidationError("empty trajectory");
    PopulationPhase out;
    for (std::size_t k = 0; k < traj.amplitudes.size(); ++k) {
        const double t = traj.times_us[k];
        const Complex a = traj.amplitudes[k](0) *
                          std::polar(1.0, 2.0 * units::pi * traj.reference_energy_mhz * t);
        const double p = std::norm(a);
        out.times_us.push_back(t);
        out.population.push_back(p);
        const bool undefined = p < 1e-12;
        out.phase_undefined.push_back(undefined);
        out.phase_rad.push_back(undefined ? std::nan("") : wrap_phase(std::arg(a)));
    }
    return out;
}

}  // namespace fret3
