#include "efl/wavefunctional.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace efl::wavefunctional {

namespace {

void require_same_lattice(const modes::ModeLattice& a,
                          const modes::ModeLattice& b, const char* what) {
  if (!modes::same_lattice(a, b))
    throw std::invalid_argument(std::string(what) +
                                ": state and lattice do not match");
}

struct ShellSums {
  Complex with_q;       // sum f_k q_k
  Complex with_q_conj;  // sum f_k q_k^*
  double scale;         // sum |f_k| |q_k|, for relative node thresholds
};

ShellSums profile_sums(const OneQuantumState& state, const modes::ModeState& q) {
  ShellSums s{{0.0, 0.0}, {0.0, 0.0}, 0.0};
  for (const ProfileEntry& e : state.profile()) {
    const Complex qe = q.at(e.mode);
    s.with_q += e.f * qe;
    s.with_q_conj += e.f * std::conj(qe);
    s.scale += std::abs(e.f) * std::abs(qe);
  }
  return s;
}

constexpr double kNodeRelTol = 1e-14;

}  // namespace

double default_total_energy(const modes::ModeLattice& lattice) {
  double e = 0.0;
  for (const modes::ModeIndex& m : lattice.half_modes()) e += lattice.dispersion(m);
  return e;
}

VacuumState make_vacuum(modes::LatticePtr lattice) {
  if (!lattice) throw std::invalid_argument("vacuum needs a lattice");
  const double e0 = default_total_energy(*lattice);
  return VacuumState{std::move(lattice), e0, 0.0};
}

VacuumState make_vacuum(modes::LatticePtr lattice, double total_energy,
                        double log_norm) {
  if (!lattice) throw std::invalid_argument("vacuum needs a lattice");
  if (!std::isfinite(total_energy))
    throw std::invalid_argument("total energy must be finite");
  return VacuumState{std::move(lattice), total_energy, log_norm};
}

Complex eval_log_vacuum(const VacuumState& vac, const modes::ModeState& q,
                        double t) {
  require_same_lattice(*vac.lattice, q.lattice(), "eval_log_vacuum");
  double quad = 0.0;
  for (const modes::ModeIndex& m : vac.lattice->half_modes())
    quad += vac.lattice->dispersion(m) * std::norm(q.at(m));
  return Complex{vac.log_norm - quad, -vac.total_energy * t};
}

OneQuantumState::OneQuantumState(modes::LatticePtr lattice,
                                 std::vector<ProfileEntry> profile)
    : lattice_(std::move(lattice)), profile_(std::move(profile)) {
  if (!lattice_) throw std::invalid_argument("one-quantum state needs a lattice");
  std::erase_if(profile_, [](const ProfileEntry& e) {
    return e.f == Complex{0.0, 0.0};
  });
  if (profile_.empty())
    throw std::invalid_argument("one-quantum profile has empty support");
  std::sort(profile_.begin(), profile_.end(),
            [](const ProfileEntry& a, const ProfileEntry& b) {
              return a.mode < b.mode;
            });
  for (std::size_t i = 0; i < profile_.size(); ++i) {
    if (!lattice_->contains(profile_[i].mode)) {
      std::ostringstream msg;
      msg << "profile mode " << profile_[i].mode << " is off the lattice";
      throw std::invalid_argument(msg.str());
    }
    if (i > 0 && profile_[i].mode == profile_[i - 1].mode)
      throw std::invalid_argument("duplicate mode in one-quantum profile");
  }
  const double w0 = lattice_->dispersion(profile_.front().mode);
  const bool common = std::all_of(
      profile_.begin(), profile_.end(), [&](const ProfileEntry& e) {
        return std::abs(lattice_->dispersion(e.mode) - w0) <= 1e-12 * w0;
      });
  if (common) common_omega_ = w0;
}

OneQuantumState OneQuantumState::standing_wave(
    modes::LatticePtr lattice, std::span<const modes::ModeIndex> shell,
    Complex f) {
  std::vector<ProfileEntry> profile;
  profile.reserve(shell.size());
  for (const modes::ModeIndex& m : shell) profile.push_back({m, f});
  return OneQuantumState(std::move(lattice), std::move(profile));
}

OneQuantumState apply_creation(const modes::ModeIndex& k, const VacuumState& vac) {
  if (!vac.lattice) throw std::invalid_argument("vacuum has no lattice");
  if (!vac.lattice->contains(k)) {
    std::ostringstream msg;
    msg << "creation mode " << k << " is off the lattice";
    throw std::out_of_range(msg.str());
  }
  return OneQuantumState(vac.lattice, {{k, Complex{1.0, 0.0}}});
}

WaveValue eval_one_quantum(const OneQuantumState& state, const VacuumState& vac,
                           const modes::ModeState& q, double t) {
  require_same_lattice(state.lattice(), *vac.lattice, "eval_one_quantum");
  require_same_lattice(state.lattice(), q.lattice(), "eval_one_quantum");
  Complex pre{0.0, 0.0};
  for (const ProfileEntry& e : state.profile()) {
    const double w = state.lattice().dispersion(e.mode);
    pre += e.f * std::sqrt(2.0 * w) * std::conj(q.at(e.mode)) *
           std::polar(1.0, -w * t);
  }
  return WaveValue{pre, eval_log_vacuum(vac, q, t)};
}

PhaseDecomposition polar_decomposition(const WaveValue& value) {
  return PhaseDecomposition{
      std::abs(value.prefactor) * std::exp(value.log_vacuum.real()),
      std::arg(value.prefactor) + value.log_vacuum.imag()};
}

double phase_s(const OneQuantumState& state, const modes::ModeState& q, double t,
               double total_energy) {
  require_same_lattice(state.lattice(), q.lattice(), "phase_s");
  const auto omega = state.common_frequency();
  if (!omega)
    throw std::invalid_argument(
        "phase_s needs a common-frequency (single-shell) profile");
  const ShellSums s = profile_sums(state, q);
  if (s.scale == 0.0 || std::abs(s.with_q) <= kNodeRelTol * s.scale ||
      std::abs(s.with_q_conj) <= kNodeRelTol * s.scale)
    throw NodeError("phase_s evaluated at a wavefunctional node");
  const double half_log =
      0.5 * (std::arg(s.with_q_conj) - std::arg(s.with_q));
  return half_log - *omega * t - total_energy * t;
}

std::vector<Complex> grad_s(const OneQuantumState& state,
                            const modes::ModeState& q, double /*t*/,
                            GradientReading reading) {
  require_same_lattice(state.lattice(), q.lattice(), "grad_s");
  std::vector<Complex> out(state.lattice().size(), Complex{0.0, 0.0});
  const Complex half_over_i{0.0, -0.5};  // 1/(2i)
  if (reading == GradientReading::ExactProfile) {
    const ShellSums s = profile_sums(state, q);
    if (s.scale == 0.0 || std::abs(s.with_q_conj) <= kNodeRelTol * s.scale)
      throw NodeError("grad_s evaluated at a wavefunctional node");
    for (const ProfileEntry& e : state.profile())
      out[state.lattice().index_of(e.mode)] = half_over_i * e.f / s.with_q_conj;
    return out;
  }
  // Collective reading: each support mode follows 1/(2i q_k^*).
  double scale = 0.0;
  for (const ProfileEntry& e : state.profile())
    scale = std::max(scale, std::abs(q.at(e.mode)));
  for (const ProfileEntry& e : state.profile()) {
    const Complex qe = q.at(e.mode);
    if (scale == 0.0 || std::abs(qe) <= kNodeRelTol * scale)
      throw NodeError("collective gradient at a vanishing mode amplitude");
    out[state.lattice().index_of(e.mode)] = half_over_i / std::conj(qe);
  }
  return out;
}

double unwrap_phase(double raw, double previous) {
  const double pi = std::numbers::pi;
  return raw + pi * std::round((previous - raw) / pi);
}

}  // namespace efl::wavefunctional
