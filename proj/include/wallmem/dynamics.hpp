#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wallmem/hamiltonian.hpp"
#include "wallmem/random.hpp"
#include "wallmem/ring.hpp"
#include "wallmem/schedule.hpp"

namespace wallmem {

enum class BackendKind { exact, svmc, oracle };

/// Time-slice rule of the dense oracle. `gauss4` is the two-point Gauss
/// Magnus expansion (fourth order); `midpoint` evaluates H at each slice centre.
enum class OracleRule { midpoint, gauss4 };

std::string to_string(BackendKind kind);
BackendKind parse_backend_kind(const std::string& text);
std::string to_string(OracleRule rule);
OracleRule parse_oracle_rule(const std::string& text);

/// Boltzmann constant in GHz per kelvin.
inline constexpr double kBoltzmannGHzPerK = 20.836612;

struct BackendConfig {
    BackendKind kind = BackendKind::exact;
    /// Magnus step on time-dependent waveform segments (exact backend), ns.
    double dt_ns = 0.2;
    /// Metropolis sweeps per microsecond of waveform time (svmc).
    double sweeps_per_us = 100.0;
    double temperature_mk = 16.0;
    std::uint64_t seed = 1;
    int oracle_slices = 4000;
    OracleRule oracle_rule = OracleRule::gauss4;
};

/// Throws ConfigError on dt_ns <= 0, sweeps_per_us < 1, temperature_mk < 0
/// or oracle_slices < 1.
void validate(const BackendConfig& cfg);

/// Amplitudes over the 2^n Z-basis states (bit i set = spin i down).
struct QuantumState {
    int n = 0;
    Eigen::VectorXcd amplitudes;

    static QuantumState basis(const SpinConfig& cfg);
    double norm() const { return amplitudes.norm(); }
    Eigen::VectorXd probabilities() const { return amplitudes.cwiseAbs2(); }
};

inline constexpr int kMaxExactSites = 16;
inline constexpr int kMaxOracleSites = 8;

struct ExactStats {
    double max_norm_drift = 0.0;
    long long matvecs = 0;
};

/// Closed-system evolution i d|psi>/dt = 2 pi H(s(t)) |psi> (H in GHz, t in
/// ns) from initial_state(spec). Constant-s segments are propagated in one
/// Chebyshev expansion; ramps use the fourth-order commutator-free Magnus
/// integrator with step cfg.dt_ns, each exponential again by Chebyshev.
QuantumState evolve_exact(const RingSpec& spec, const ScheduleTable& table,
                          const Waveform& waveform, const BackendConfig& cfg,
                          ExactStats* stats = nullptr);
QuantumState evolve_exact(const SpinConfig& initial, double j_programmed,
                          const ScheduleTable& table, const Waveform& waveform,
                          const BackendConfig& cfg, ExactStats* stats = nullptr);

/// psi <- exp(-i 2 pi duration_ns H) psi by Chebyshev expansion. Returns the
/// number of Hamiltonian applications.
long long propagate_constant(const RingHamiltonian& hamiltonian, const RingCoefficients& c,
                             double duration_ns, Eigen::VectorXcd& psi);

/// J_0(x) ... J_kmax(x) by Miller's backward recurrence.
std::vector<double> bessel_j_sequence(double x, int kmax);

/// Product of dense exponentials over `slices` uniform time slices. Builds H
/// from Kronecker products of Pauli matrices, independent of RingHamiltonian.
QuantumState evolve_oracle(const RingSpec& spec, const ScheduleTable& table,
                           const Waveform& waveform, int slices,
                           OracleRule rule = OracleRule::gauss4);
QuantumState evolve_oracle(const SpinConfig& initial, double j_programmed,
                           const ScheduleTable& table, const Waveform& waveform, int slices,
                           OracleRule rule = OracleRule::gauss4);

/// Dense H(s) for the oracle, real symmetric.
Eigen::MatrixXd dense_ring_hamiltonian(int n, double gamma_ghz, double zz_ghz);

/// Born-rule Z-basis samples.
std::vector<SpinConfig> measure_z(const QuantumState& state, int shots, Rng& rng);

/// Planar rotor angles theta_i in [0, pi]; spin = sign(cos theta).
struct RotorState {
    Eigen::VectorXd angles;
};

/// One spin-vector Monte Carlo trajectory, returning its projected readout.
///
/// Rotor energy E = (B J/2) sum_i cos(t_i) cos(t_{i+1}) - (A/2) sum_i sin(t_i).
/// s advances along the waveform once per sweep. Each site proposes a new
/// angle, uniform on [0, pi] when Gamma/J >= 1 and otherwise a reflected step
/// of at most pi * Gamma/J around the current angle. Metropolis acceptance at
/// cfg.temperature_mk; at zero temperature only strictly downhill moves pass.
SpinConfig evolve_svmc(const RingSpec& spec, const ScheduleTable& table,
                       const Waveform& waveform, const BackendConfig& cfg, Rng& rng);
SpinConfig evolve_svmc(const SpinConfig& initial, double j_programmed,
                       const ScheduleTable& table, const Waveform& waveform,
                       const BackendConfig& cfg, Rng& rng, RotorState* final_rotors = nullptr);

}  // namespace wallmem
