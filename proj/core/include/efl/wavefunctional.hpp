#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "efl/lattice.hpp"

namespace efl::wavefunctional {

using modes::Complex;

/// Thrown where a Bohmian velocity or phase is evaluated at (or numerically
/// too close to) a zero of the wavefunctional. Never regularized away.
class NodeError : public std::runtime_error {
 public:
  explicit NodeError(const std::string& what) : std::runtime_error(what) {}
};

/// Gaussian ground state parameters. The wavefunctional itself is
///   Psi0 = exp(log_norm) * prod_{half lattice} exp(-omega_k q_k^* q_k) * e^{-i E0 t}.
struct VacuumState {
  modes::LatticePtr lattice;
  double total_energy = 0.0;  // E0, the coefficient of the -i t phase
  double log_norm = 0.0;
};

/// Sum of omega_k over the half lattice (zero-point value used as the E0
/// default; E0 stays a free parameter and guidance must not depend on it).
double default_total_energy(const modes::ModeLattice& lattice);

VacuumState make_vacuum(modes::LatticePtr lattice);
VacuumState make_vacuum(modes::LatticePtr lattice, double total_energy,
                        double log_norm = 0.0);

/// log Psi0 evaluated at the configuration q:
///   log_norm - sum_{half lattice} omega_k |q_k|^2 - i E0 t.
Complex eval_log_vacuum(const VacuumState& vac, const modes::ModeState& q,
                        double t);

struct ProfileEntry {
  modes::ModeIndex mode;
  Complex f;
};

/// One-quantum excitation sum_k f_k a_k^dagger applied to the vacuum; the
/// profile f_k is zero outside its stored support.
class OneQuantumState {
 public:
  OneQuantumState(modes::LatticePtr lattice, std::vector<ProfileEntry> profile);

  /// Equal coefficients f on every mode of the given shell.
  static OneQuantumState standing_wave(modes::LatticePtr lattice,
                                       std::span<const modes::ModeIndex> shell,
                                       Complex f = Complex{1.0, 0.0});

  const modes::ModeLattice& lattice() const { return *lattice_; }
  const modes::LatticePtr& lattice_ptr() const { return lattice_; }
  std::span<const ProfileEntry> profile() const { return profile_; }

  /// Common dispersion value of the support modes, when they agree to 1e-12
  /// relative; empty for mixed-frequency profiles.
  std::optional<double> common_frequency() const { return common_omega_; }

 private:
  modes::LatticePtr lattice_;
  std::vector<ProfileEntry> profile_;  // sorted by mode, nonzero f only
  std::optional<double> common_omega_;
};

/// Single creation operator a_k^dagger on the vacuum: profile f = 1 at k.
OneQuantumState apply_creation(const modes::ModeIndex& k, const VacuumState& vac);

/// Psi1 = prefactor * exp(log_vacuum), kept factored to avoid underflow of
/// the Gaussian at large |q|.
struct WaveValue {
  Complex prefactor;   // sum_k f_k sqrt(2 omega_k) q_k^* e^{-i omega_k t}
  Complex log_vacuum;  // eval_log_vacuum at the same (q, t)
};

WaveValue eval_one_quantum(const OneQuantumState& state, const VacuumState& vac,
                           const modes::ModeState& q, double t);

/// Polar form Psi = amplitude * e^{i phase} of a factored value.
struct PhaseDecomposition {
  double amplitude;  // >= 0
  double phase;      // radians, principal combination of both factors
};

PhaseDecomposition polar_decomposition(const WaveValue& value);

/// Phase functional of the one-quantum state with a common shell frequency:
///   S = (1/2)(arg sum_k f_k q_k^*  -  arg sum_k f_k q_k) - omega_M t - E0 t.
/// The half-log of the conjugate ratio is taken so that for real f it equals
/// -arg(sum f_k q_k); principal branch, continuity across cuts is the
/// caller's job via unwrap_phase. Throws NodeError when the shell sums vanish
/// and std::invalid_argument when the profile has no common frequency.
double phase_s(const OneQuantumState& state, const modes::ModeState& q, double t,
               double total_energy);

/// Which derivative of S drives the guidance flow.
///  - ExactProfile: literal gradient of phase_s,
///        dS/dq_k^* = (1/2i) f_k / (sum_j f_j q_j^*) on the support.
///  - Collective: the single-collective-coordinate reduction dq/dt = 1/(2i q^*),
///        applied per support mode; the two differ by a factor |support| when
///        all f and q are equal. Collective is what reproduces the analytic
///        standing-wave amplitude A = 1/sqrt(2 omega) and is the default
///        downstream.
enum class GradientReading { ExactProfile, Collective };

/// dS/dq_k^* for every lattice mode (zero off the profile support), dense in
/// lattice enumeration order.
std::vector<Complex> grad_s(const OneQuantumState& state,
                            const modes::ModeState& q, double t,
                            GradientReading reading = GradientReading::Collective);

/// Adds the multiple of pi to `raw` that lands closest to `previous`; the
/// half-log phase term is defined modulo pi.
double unwrap_phase(double raw, double previous);

}  // namespace efl::wavefunctional
