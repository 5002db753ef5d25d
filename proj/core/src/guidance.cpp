#include "efl/guidance.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "efl/numio.hpp"

namespace efl::guidance {

ShellSet shell_modes(const modes::ModeLattice& lattice, double tol) {
  if (tol < 0.0) throw std::invalid_argument("shell tolerance must be >= 0");
  const double mu = lattice.mass();
  ShellSet shell;
  shell.target = mu;
  shell.tolerance = tol;
  for (const modes::ModeIndex& m : lattice.all_modes()) {
    const double k = lattice.wavevector(m).norm();
    if (std::abs(k - mu) <= tol) shell.members.push_back(m);
  }
  if (shell.members.empty()) {
    std::ostringstream msg;
    msg << "no lattice mode within " << tol << " of |k| = " << mu
        << " (L = " << lattice.box_edge() << ", n_max = " << lattice.cutoff()
        << ")";
    throw EmptyShellError(msg.str());
  }
  return shell;
}

double default_shell_tolerance(const modes::ModeLattice& lattice) {
  const double mu = lattice.mass();
  const double rel = 1e-12 * std::max(1.0, mu);
  for (const modes::ModeIndex& m : lattice.all_modes())
    if (std::abs(lattice.wavevector(m).norm() - mu) <= rel) return 0.0;
  return std::numbers::pi / lattice.box_edge();
}

std::vector<Complex> guidance_rhs(const wavefunctional::OneQuantumState& state,
                                  const modes::ModeState& q, double t,
                                  GradientReading reading) {
  return wavefunctional::grad_s(state, q, t, reading);
}

Complex analytic_mode_solution(double omega, double t) {
  if (!(omega > 0.0))
    throw std::invalid_argument("mode frequency must be positive");
  return std::polar(1.0 / std::sqrt(2.0 * omega), -omega * t);
}

namespace {

double shell_sum_magnitude(const wavefunctional::OneQuantumState& state,
                           std::span<const Complex> q,
                           const modes::ModeLattice& lattice) {
  Complex b{0.0, 0.0};
  for (const wavefunctional::ProfileEntry& e : state.profile())
    b += e.f * std::conj(q[lattice.index_of(e.mode)]);
  return std::abs(b);
}

}  // namespace

TrajectoryRecord integrate_modes(const wavefunctional::OneQuantumState& state,
                                 const modes::ModeState& q0, double t0,
                                 double t1, double dt, GradientReading reading) {
  if (!modes::same_lattice(state.lattice(), q0.lattice()))
    throw std::invalid_argument("integrate_modes: state and q0 lattices differ");
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_modes: dt must be > 0");
  if (!(t1 > t0))
    throw std::invalid_argument("integrate_modes: empty time range (t1 <= t0)");
  const modes::ModeLattice& lattice = state.lattice();
  const int n_max = lattice.cutoff();
  const double omega_max = lattice.dispersion(modes::ModeIndex{n_max, n_max, n_max});
  if (dt >= 0.1 / omega_max) {
    std::ostringstream msg;
    msg << "integrate_modes: dt = " << dt << " at or above stability bound "
        << 0.1 / omega_max << " (0.1 / max lattice frequency)";
    throw std::invalid_argument(msg.str());
  }

  const double span = t1 - t0;
  const long long n_steps = std::max(1LL, std::llround(span / dt));
  const double h = span / static_cast<double>(n_steps);

  const modes::LatticePtr lptr = q0.lattice_ptr();
  auto rhs = [&](double t, const std::vector<Complex>& y) {
    modes::ModeState qs(lptr, y, t, modes::RealityPolicy::Allow);
    return guidance_rhs(state, qs, t, reading);
  };

  TrajectoryRecord rec;
  rec.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  rec.states.reserve(static_cast<std::size_t>(n_steps) + 1);
  rec.reality_drift.reserve(static_cast<std::size_t>(n_steps) + 1);
  const bool track_phase = state.common_frequency().has_value();

  std::vector<Complex> y(q0.coefficients().begin(), q0.coefficients().end());

  auto record_sample = [&](double t) {
    modes::ModeState qs(lptr, y, t, modes::RealityPolicy::Allow);
    const double drift = qs.reality_violation();
    if (drift <= 1e-12) {
      qs.symmetrize();
      y.assign(qs.coefficients().begin(), qs.coefficients().end());
    }
    rec.times.push_back(t);
    rec.reality_drift.push_back(drift);
    if (track_phase) {
      const double raw = wavefunctional::phase_s(state, qs, t, 0.0);
      if (rec.phase.empty()) {
        rec.phase.push_back(raw);
      } else {
        const double cont = wavefunctional::unwrap_phase(raw, rec.phase.back());
        if (std::abs(cont - raw) > 1e-9) ++rec.unwrap_count;
        rec.phase.push_back(cont);
      }
    }
    rec.states.push_back(std::move(qs));
  };

  auto check_node = [&](double t) {
    if (shell_sum_magnitude(state, y, lattice) < 1e-10) {
      std::ostringstream msg;
      msg << "guidance trajectory reached a wavefunctional node at t = " << t
          << " (|sum f q^*| < 1e-10)";
      throw NodeError(msg.str());
    }
  };

  check_node(t0);
  record_sample(t0);

  const std::size_t dim = y.size();
  std::vector<Complex> k1, k2, k3, k4, tmp(dim);
  for (long long step = 0; step < n_steps; ++step) {
    const double t = t0 + h * static_cast<double>(step);
    k1 = rhs(t, y);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = rhs(t + h, tmp);
    for (std::size_t i = 0; i < dim; ++i)
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    const double t_next = t0 + h * static_cast<double>(step + 1);
    check_node(t_next);
    record_sample(t_next);
  }
  return rec;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record,
                          std::span<const modes::ModeIndex> columns) {
  os << 't';
  for (const modes::ModeIndex& m : columns) {
    os << ",re_q_" << m.n1 << '_' << m.n2 << '_' << m.n3;
    os << ",im_q_" << m.n1 << '_' << m.n2 << '_' << m.n3;
  }
  os << ",reality_drift\n";
  for (std::size_t i = 0; i < record.times.size(); ++i) {
    os << format_full(record.times[i]);
    for (const modes::ModeIndex& m : columns) {
      const Complex q = record.states[i].at(m);
      os << ',' << format_full(q.real()) << ',' << format_full(q.imag());
    }
    os << ',' << format_full(record.reality_drift[i]) << '\n';
  }
}

}  // namespace efl::guidance
