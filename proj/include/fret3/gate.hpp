#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "collective.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "nelder_mead.hpp"
#include "parallel.hpp"
#include "system.hpp"
#include "units.hpp"

namespace fret3 {

using Register = Eigen::Matrix<Complex, 8, 1>;
using RegisterOperator = Eigen::Matrix<Complex, 8, 8>;
using QubitOperator = Eigen::Matrix<Complex, 2, 2>;

/// Net phase of the |1> -> |r> -> -|1> pulse pair seen by one atom.
inline constexpr double rydberg_pulse_pair_phase = 0.0;

struct ExcitationStage {
    double field_vcm = 0.2;
    double tau_us = 0.01;
};

struct GateParameters {
    double r_um = 10.0;
    double t_us = 1.15;
    double field_vcm = 0.14232;
    std::optional<ExcitationStage> excitation;
    int target = 1;

    void validate() const {
        if (!(r_um > 0.0)) throw ValidationError("gate: R must be positive");
        if (!(t_us > 0.0)) throw ValidationError("gate: T must be positive");
        if (!(field_vcm >= 0.0)) throw ValidationError("gate: E must be non-negative");
        if (target < 0 || target > 2) throw ValidationError("gate: target qubit must be 0, 1 or 2");
        if (excitation && (!(excitation->tau_us >= 0.0) || !(excitation->field_vcm >= 0.0))) {
            throw ValidationError("gate: excitation stage needs E0 >= 0 and tau >= 0");
        }
    }
};

// ---------------------------------------------------------------------------
// Three-qubit register. Qubit 0 is the most significant bit of the index and
// sits in trap 0.

inline int qubit_bit(std::size_t index, int qubit) { return static_cast<int>((index >> (2 - qubit)) & 1u); }

/// 2x2 operator acting on one qubit of the register.
inline RegisterOperator on_qubit(const QubitOperator& op, int qubit) {
    RegisterOperator u = RegisterOperator::Zero();
    for (std::size_t r = 0; r < 8; ++r) {
        for (std::size_t c = 0; c < 8; ++c) {
            bool same = true;
            for (int q = 0; q < 3; ++q) {
                if (q != qubit && qubit_bit(r, q) != qubit_bit(c, q)) same = false;
            }
            if (same) u(r, c) = op(qubit_bit(r, qubit), qubit_bit(c, qubit));
        }
    }
    return u;
}

/// exp(+i theta Y / 2) = [[cos, sin], [-sin, cos]] (theta/2). With this sign
/// Ry(-pi/2) Z Ry(pi/2) = +X, so the rotation sandwich turns CCZ into Toffoli.
inline QubitOperator y_rotation(double theta) {
    const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
    QubitOperator m;
    m << c, s, -s, c;
    return m;
}

inline QubitOperator hadamard() {
    QubitOperator m;
    const double h = 1.0 / std::sqrt(2.0);
    m << h, h, h, -h;
    return m;
}

inline RegisterOperator ccz_matrix() {
    RegisterOperator u = RegisterOperator::Identity();
    u(7, 7) = -1.0;
    return u;
}

/// Toffoli with the given target: flips it iff both other qubits are |1>.
inline RegisterOperator ideal_toffoli_matrix(int target = 1) {
    if (target < 0 || target > 2) throw ValidationError("toffoli: target qubit must be 0, 1 or 2");
    RegisterOperator u = RegisterOperator::Zero();
    for (std::size_t k = 0; k < 8; ++k) {
        bool controls = true;
        for (int q = 0; q < 3; ++q) {
            if (q != target && qubit_bit(k, q) == 0) controls = false;
        }
        const std::size_t out = controls ? (k ^ (std::size_t{1} << (2 - target))) : k;
        u(out, k) = 1.0;
    }
    return u;
}

inline Register ideal_toffoli(const Register& psi, int target = 1) {
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-9) throw ValidationError("toffoli: input not normalized");
    return ideal_toffoli_matrix(target) * psi;
}

/// One of the six single-qubit states |0>, |1>, |+>, |->, |+i>, |-i>.
enum class QubitState { zero, one, plus, minus, plus_i, minus_i };

inline Eigen::Vector2cd qubit_vector(QubitState s) {
    const double h = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    switch (s) {
        case QubitState::zero: return {1.0, 0.0};
        case QubitState::one: return {0.0, 1.0};
        case QubitState::plus: return {h, h};
        case QubitState::minus: return {h, -h};
        case QubitState::plus_i: return {h, h * i};
        case QubitState::minus_i: return {h, -h * i};
    }
    return {1.0, 0.0};
}

inline const char* qubit_label(QubitState s) {
    constexpr const char* names[] = {"0", "1", "+", "-", "+i", "-i"};
    return names[static_cast<int>(s)];
}

struct QubitInputState {
    std::array<QubitState, 3> qubits{};

    std::string label() const {
        std::string out = "|";
        for (std::size_t q = 0; q < 3; ++q) {
            if (q) out += ',';
            out += qubit_label(qubits[q]);
        }
        return out + ">";
    }

    Register vector() const {
        Register psi;
        const auto a = qubit_vector(qubits[0]), b = qubit_vector(qubits[1]), c = qubit_vector(qubits[2]);
        for (std::size_t k = 0; k < 8; ++k) {
            psi(k) = a(qubit_bit(k, 0)) * b(qubit_bit(k, 1)) * c(qubit_bit(k, 2));
        }
        return psi;
    }
};

/// All 6^3 = 216 product inputs, qubit 0 varying slowest.
inline std::vector<QubitInputState> all_inputs() {
    std::vector<QubitInputState> out;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            for (int c = 0; c < 6; ++c)
                out.push_back({{static_cast<QubitState>(a), static_cast<QubitState>(b), static_cast<QubitState>(c)}});
    return out;
}

/// The eight computational basis inputs.
inline std::vector<QubitInputState> basis_inputs() {
    std::vector<QubitInputState> out;
    for (std::size_t k = 0; k < 8; ++k) {
        QubitInputState s;
        for (int q = 0; q < 3; ++q) s.qubits[static_cast<std::size_t>(q)] = qubit_bit(k, q) ? QubitState::one : QubitState::zero;
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Fidelity

/// Uhlmann fidelity Tr sqrt(sqrt(sigma) rho sqrt(sigma)) between a simulated
/// (possibly trace-deficient) density operator and an etalon density operator.
inline double state_fidelity(const Eigen::MatrixXcd& rho_sim, const Eigen::MatrixXcd& rho_et) {
    if (rho_sim.rows() != rho_sim.cols() || rho_sim.rows() != rho_et.rows() || rho_et.rows() != rho_et.cols()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    auto check_psd = [](const Eigen::MatrixXcd& m, const char* what) {
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
            throw NonPsdError(std::string("fidelity: ") + what + " is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw NonPsdError(std::string("fidelity: ") + what + " is not positive semidefinite");
        }
        return es;
    };
    check_psd(rho_sim, "simulated state");
    const auto es = check_psd(rho_et, "etalon");
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd sqrt_et = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    const Eigen::MatrixXcd m = sqrt_et * rho_sim * sqrt_et;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> inner(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    const double f = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return std::clamp(f, 0.0, 1.0);
}

/// Pure-etalon form sqrt(<psi|rho|psi>).
inline double state_fidelity(const Eigen::MatrixXcd& rho_sim, const Eigen::VectorXcd& psi_et) {
    if (std::abs(psi_et.squaredNorm() - 1.0) > 1e-9) throw ValidationError("fidelity: etalon not normalized");
    if (rho_sim.rows() != psi_et.size() || rho_sim.cols() != psi_et.size()) {
        throw ValidationError("fidelity: dimension mismatch");
    }
    if ((rho_sim - rho_sim.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
        throw NonPsdError("fidelity: simulated state is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_sim, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10) {
        throw NonPsdError("fidelity: simulated state is not positive semidefinite");
    }
    const double overlap = (psi_et.adjoint() * rho_sim * psi_et)(0, 0).real();
    return std::clamp(std::sqrt(std::max(0.0, overlap)), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Gate simulation

enum class RydbergStageMode {
    physical,   ///< interaction dynamics of each Rydberg configuration
    disabled,   ///< no Rydberg excitation (identity between the rotations)
    ideal_ccz,  ///< test hook: perfect CCZ phase, no loss
};

struct GateResult {
    std::vector<std::string> inputs;
    std::vector<double> fidelities;
    std::vector<double> leakage;
    double mean = 0.0;
    double min = 0.0;
    GateParameters params;
    std::array<Complex, 8> rydberg_diagonal{};
    std::size_t basis_size = 0;
    std::string data_checksum;
};

class GateSimulator {
public:
    GateSimulator(const RydbergSystem& sys, const RydbergState& rydberg, BasisRule rule = {},
                  double tolerance = 1e-10)
        : sys_(&sys), rydberg_(rydberg), rule_(rule), tolerance_(tolerance) {}

    void set_mode(RydbergStageMode m) { mode_ = m; }
    RydbergStageMode mode() const { return mode_; }
    void set_decay(bool on) { with_decay_ = on; }
    void set_jobs(int jobs) { jobs_ = jobs; }
    const RydbergSystem& system() const { return *sys_; }
    const RydbergState& rydberg_state() const { return rydberg_; }

    /// Collective basis for `atoms` Rydberg atoms, all starting in the Rydberg state.
    const BasisSet& basis(std::size_t atoms) const {
        std::lock_guard lock(mutex_);
        auto it = bases_.find(atoms);
        if (it == bases_.end()) {
            it = bases_.emplace(atoms, std::make_shared<BasisSet>(build_basis(*sys_, uniform_state(rydberg_, atoms), rule_))).first;
        }
        return *it->second;
    }

    /// Rotating-frame amplitude of the Rydberg configuration occupying `traps`
    /// after the interaction window.
    Complex configuration_amplitude(const std::vector<std::size_t>& traps, const GateParameters& p) const {
        p.validate();
        if (traps.empty()) return 1.0;
        const auto& b = basis(traps.size());
        const Geometry g = Geometry::equidistant(p.r_um, 3).subset(traps);
        const auto& couplings = coupling(b, g);
        const auto psi0 = basis_vector(static_cast<Eigen::Index>(b.size()));

        auto stage = [&](const ComplexVector& psi, double field, double t, double& frame) {
            const auto h = assemble(*sys_, b, couplings, field, with_decay_);
            frame += h.matrix(0, 0).real() * t;
            if (t == 0.0) return psi;
            const ComplexVector out = step_propagator(h.matrix, t, tolerance_) * psi;
            return out;
        };
        double frame = 0.0;  // accumulated bare energy x time, MHz*us
        ComplexVector psi = psi0;
        if (p.excitation) psi = stage(psi, p.excitation->field_vcm, p.excitation->tau_us, frame);
        psi = stage(psi, p.field_vcm, p.t_us, frame);
        if (p.excitation) psi = stage(psi, p.excitation->field_vcm, p.excitation->tau_us, frame);
        const double pulse_phase = rydberg_pulse_pair_phase * static_cast<double>(traps.size());
        return psi(0) * std::polar(1.0, 2.0 * units::pi * frame + pulse_phase);
    }

    /// Diagonal action of pulses 2-7 on the eight computational states.
    std::array<Complex, 8> rydberg_diagonal(const GateParameters& p) const {
        p.validate();
        std::array<Complex, 8> d;
        d.fill(1.0);
        if (mode_ == RydbergStageMode::disabled) return d;
        if (mode_ == RydbergStageMode::ideal_ccz) {
            d[7] = -1.0;
            return d;
        }
        // Configurations with equal relative geometry share one amplitude.
        std::map<std::vector<double>, std::vector<std::size_t>> groups;
        std::vector<std::vector<std::size_t>> traps_of(8);
        for (std::size_t k = 1; k < 8; ++k) {
            std::vector<double> rel;
            for (int q = 0; q < 3; ++q) {
                if (qubit_bit(k, q)) traps_of[k].push_back(static_cast<std::size_t>(q));
            }
            for (std::size_t i = 1; i < traps_of[k].size(); ++i) {
                rel.push_back(static_cast<double>(traps_of[k][i] - traps_of[k][0]));
            }
            rel.insert(rel.begin(), static_cast<double>(traps_of[k].size()));
            groups[rel].push_back(k);
        }
        std::vector<std::vector<std::size_t>> members;
        for (auto& [key, ks] : groups) members.push_back(ks);
        std::vector<Complex> amp(members.size());
        parallel_for(members.size(), jobs_, [&](std::size_t g) {
            amp[g] = configuration_amplitude(traps_of[members[g].front()], p);
        });
        for (std::size_t g = 0; g < members.size(); ++g) {
            for (auto k : members[g]) d[k] = amp[g];
        }
        return d;
    }

    /// Ry_t(-pi/2) D Ry_t(pi/2): the computational-subspace block of the gate.
    RegisterOperator gate_operator(const std::array<Complex, 8>& d, int target) const {
        RegisterOperator diag = RegisterOperator::Zero();
        for (std::size_t k = 0; k < 8; ++k) diag(k, k) = d[k];
        return on_qubit(y_rotation(-units::pi / 2), target) * diag * on_qubit(y_rotation(units::pi / 2), target);
    }

    RegisterOperator gate_operator(const GateParameters& p) const {
        return gate_operator(rydberg_diagonal(p), p.target);
    }

    /// Unnormalized output density operator on the computational subspace.
    RegisterOperator simulate_gate(const GateParameters& p, const QubitInputState& input) const {
        const Register out = gate_operator(p) * input.vector();
        return out * out.adjoint();
    }

    /// Per-input and mean fidelity over a set of inputs (all 216 by default).
    GateResult average_fidelity(const GateParameters& p, const std::vector<QubitInputState>& inputs = all_inputs()) const {
        if (inputs.empty()) throw ValidationError("average_fidelity: no inputs");
        GateResult r;
        r.params = p;
        r.rydberg_diagonal = rydberg_diagonal(p);
        r.basis_size = mode_ == RydbergStageMode::physical ? basis(3).size() : 0;
        r.data_checksum = sys_->data().checksum;
        const RegisterOperator u = gate_operator(r.rydberg_diagonal, p.target);
        const RegisterOperator toffoli = ideal_toffoli_matrix(p.target);
        r.inputs.resize(inputs.size());
        r.fidelities.resize(inputs.size());
        r.leakage.resize(inputs.size());
        parallel_for(inputs.size(), jobs_, [&](std::size_t i) {
            const Register psi = inputs[i].vector();
            const Register out = u * psi;
            const Register et = toffoli * psi;
            const RegisterOperator rho = out * out.adjoint();
            r.inputs[i] = inputs[i].label();
            r.fidelities[i] = state_fidelity(Eigen::MatrixXcd(rho), Eigen::VectorXcd(et));
            r.leakage[i] = std::max(0.0, 1.0 - out.squaredNorm());
        });
        double sum = 0.0;
        r.min = 1.0;
        for (double f : r.fidelities) {
            sum += f;
            r.min = std::min(r.min, f);
        }
        r.mean = sum / static_cast<double>(r.fidelities.size());
        return r;
    }

private:
    const CouplingMatrix& coupling(const BasisSet& b, const Geometry& g) const {
        std::vector<double> key = g.z_um;
        for (auto& z : key) z -= g.z_um.front();
        std::lock_guard lock(mutex_);
        auto it = couplings_.find(key);
        if (it == couplings_.end()) {
            it = couplings_.emplace(key, std::make_shared<CouplingMatrix>(*sys_, b, g)).first;
        }
        return *it->second;
    }

    const RydbergSystem* sys_;
    RydbergState rydberg_;
    BasisRule rule_;
    double tolerance_;
    RydbergStageMode mode_ = RydbergStageMode::physical;
    bool with_decay_ = true;
    int jobs_ = 1;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::shared_ptr<BasisSet>> bases_;
    mutable std::map<std::vector<double>, std::shared_ptr<CouplingMatrix>> couplings_;
};

// ---------------------------------------------------------------------------
// Optimization

struct OptimizeOptions {
    double t_min_us = 0.05, t_max_us = 5.0;
    double e_min_vcm = 0.0, e_max_vcm = stark_field_guard_vcm;
    int max_evaluations = 200;  ///< per stage
    double jitter = 0.0;        ///< relative start perturbation, drawn from `seed`
    std::uint64_t seed = 0;
    bool two_stage = true;
    bool include_excitation = false;  ///< also vary E0 and tau
};

struct OptimizeResult {
    GateParameters params;
    GateResult result;
    int evaluations = 0;
    double diameter = 0.0;
    bool converged = false;
};

/// Nelder-Mead over (T, E) at fixed R: a coarse stage scored on the eight
/// basis inputs, then a refinement scored on all 216.
inline OptimizeResult optimize(const GateSimulator& sim, const GateParameters& start,
                               const OptimizeOptions& opt = {}) {
    start.validate();
    if (start.t_us < opt.t_min_us || start.t_us > opt.t_max_us || start.field_vcm < opt.e_min_vcm ||
        start.field_vcm > opt.e_max_vcm) {
        throw ValidationError("optimize: start outside bounds");
    }
    const bool ext = opt.include_excitation;
    if (ext && !start.excitation) throw ValidationError("optimize: excitation search needs a start stage");

    std::vector<double> x{start.t_us, start.field_vcm};
    std::vector<double> lo{opt.t_min_us, opt.e_min_vcm}, hi{opt.t_max_us, opt.e_max_vcm};
    if (ext) {
        x.push_back(start.excitation->field_vcm);
        x.push_back(start.excitation->tau_us);
        lo.insert(lo.end(), {0.0, 0.0});
        hi.insert(hi.end(), {stark_field_guard_vcm, 0.5});
    }
    if (opt.jitter > 0.0) {
        std::mt19937_64 rng(opt.seed);
        std::uniform_real_distribution<double> u(-opt.jitter, opt.jitter);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i] * (1.0 + u(rng)), lo[i], hi[i]);
    }

    auto params_of = [&](const std::vector<double>& v) {
        GateParameters p = start;
        p.t_us = v[0];
        p.field_vcm = v[1];
        if (ext) p.excitation = ExcitationStage{v[2], v[3]};
        return p;
    };
    const auto basis_set = basis_inputs();
    const auto full_set = all_inputs();

    OptimizeResult out;
    auto run = [&](const std::vector<QubitInputState>& inputs, std::vector<double> step) {
        NelderMeadOptions o;
        o.max_evaluations = opt.max_evaluations;
        o.f_tolerance = 1e-10;
        o.x_tolerance = 1e-7;
        o.initial_step = std::move(step);
        o.lower = lo;
        o.upper = hi;
        auto res = nelder_mead([&](const std::vector<double>& v) { return -sim.average_fidelity(params_of(v), inputs).mean; }, x, o);
        out.evaluations += res.evaluations;
        out.diameter = res.diameter;
        out.converged = res.converged;
        x = res.x;
    };
    std::vector<double> coarse{0.02 * x[0], 2e-4};
    std::vector<double> fine{0.005 * x[0], 5e-5};
    if (ext) {
        coarse.insert(coarse.end(), {0.02, 0.002});
        fine.insert(fine.end(), {0.005, 0.0005});
    }
    if (opt.two_stage) run(basis_set, coarse);
    run(full_set, opt.two_stage ? fine : coarse);

    out.params = params_of(x);
    out.result = sim.average_fidelity(out.params, full_set);
    return out;
}

}  // namespace fret3
