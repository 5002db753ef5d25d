#pragma once

#include <complex>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "efl/lattice.hpp"
#include "efl/wavefunctional.hpp"

namespace efl::guidance {

using modes::Complex;
using wavefunctional::GradientReading;
using wavefunctional::NodeError;

/// A shell query that matched no lattice mode. Every downstream formula
/// divides by shell sums, so this is an error rather than an empty set.
class EmptyShellError : public std::runtime_error {
 public:
  explicit EmptyShellError(const std::string& what) : std::runtime_error(what) {}
};

/// Lattice modes with | |k| - target | <= tolerance; closed under negation,
/// listed in lattice (lexicographic) order.
struct ShellSet {
  std::vector<modes::ModeIndex> members;
  double target = 0.0;
  double tolerance = 0.0;

  std::size_t size() const { return members.size(); }
};

/// All lattice modes whose |k| matches the lattice mass within tol.
ShellSet shell_modes(const modes::ModeLattice& lattice, double tol);

/// 0 when the mass already sits on a lattice radius (to 1e-12 relative),
/// otherwise half a wavevector spacing, pi / L.
double default_shell_tolerance(const modes::ModeLattice& lattice);

/// Time series of an integrated mode trajectory plus per-step diagnostics.
struct TrajectoryRecord {
  std::vector<double> times;               // strictly increasing
  std::vector<modes::ModeState> states;    // aligned with times
  std::vector<double> reality_drift;       // max |q_{-k} - conj(q_k)| per state
  std::vector<double> phase;               // unwrapped phase_s (E0 = 0); empty
                                           // when the profile has no common
                                           // frequency
  int unwrap_count = 0;                    // branch adjustments applied

  const modes::ModeState& initial() const { return states.front(); }
  const modes::ModeState& final() const { return states.back(); }
};

/// dq_k/dt = dS/dq_k^* in the selected reading; dense over the lattice.
std::vector<Complex> guidance_rhs(
    const wavefunctional::OneQuantumState& state, const modes::ModeState& q,
    double t, GradientReading reading = GradientReading::Collective);

/// e^{-i omega t} / sqrt(2 omega) — the standing-wave solution whose
/// amplitude A = 1/sqrt(2 omega) makes it consistent with dq/dt = 1/(2i q^*).
Complex analytic_mode_solution(double omega, double t);

/// Fixed-step classical RK4 integration of the guidance flow from q0 at t0 to
/// t1. The step count is round((t1-t0)/dt) and the actual step (t1-t0)/n, so
/// the final sample lands exactly on t1. Per step the reality-constraint
/// drift is measured and recorded; drift at or below 1e-12 is symmetrized
/// away, larger drift is left untouched (constraint-violating dynamics such
/// as the equal-q standing wave must not be projected). Halts with NodeError
/// when |sum_k f_k q_k^*| falls below 1e-10.
/// Throws std::invalid_argument for t1 <= t0, dt <= 0, or dt >= 0.1/omega_max
/// (omega_max = largest lattice dispersion).
TrajectoryRecord integrate_modes(
    const wavefunctional::OneQuantumState& state, const modes::ModeState& q0,
    double t0, double t1, double dt,
    GradientReading reading = GradientReading::Collective);

/// Columns: t, then re_q_<n1>_<n2>_<n3>, im_q_<n1>_<n2>_<n3> for each listed
/// mode, then reality_drift.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record,
                          std::span<const modes::ModeIndex> columns);

}  // namespace efl::guidance
