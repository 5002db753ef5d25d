#pragma once

#include <array>
#include <complex>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "efl/vec3.hpp"

namespace efl::modes {

using Complex = std::complex<double>;

/// Integer mode triple (n1, n2, n3); the wavevector is k = 2*pi*n / L.
struct ModeIndex {
  int n1 = 0;
  int n2 = 0;
  int n3 = 0;

  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
  ModeIndex negated() const { return {-n1, -n2, -n3}; }
  int norm_sq() const { return n1 * n1 + n2 * n2 + n3 * n3; }
};

std::ostream& operator<<(std::ostream& os, const ModeIndex& m);

/// Discrete wavevector grid of a periodic cube with edge L, per-axis cutoff
/// n_max and mass mu. Enumerates all (2 n_max + 1)^3 modes in lexicographic
/// (n1, n2, n3) order; the set is closed under negation.
class ModeLattice {
 public:
  ModeLattice(double box_edge, int n_max, double mu);

  double box_edge() const { return box_edge_; }
  int cutoff() const { return n_max_; }
  double mass() const { return mu_; }
  double volume() const { return box_edge_ * box_edge_ * box_edge_; }

  std::span<const ModeIndex> all_modes() const { return modes_; }
  std::size_t size() const { return modes_.size(); }

  /// One representative per {k, -k} pair, zero mode included once. A mode is
  /// in the half lattice when its first nonzero component is positive.
  std::span<const ModeIndex> half_modes() const { return half_modes_; }

  bool contains(const ModeIndex& m) const;
  /// Dense position of m in all_modes(); throws if off lattice.
  std::size_t index_of(const ModeIndex& m) const;

  Vec3 wavevector(const ModeIndex& m) const;

  /// omega = sqrt(k.k + mu^2).
  double dispersion(const ModeIndex& m) const;
  double dispersion(const Vec3& k) const;

 private:
  double box_edge_;
  int n_max_;
  double mu_;
  std::vector<ModeIndex> modes_;
  std::vector<ModeIndex> half_modes_;
};

using LatticePtr = std::shared_ptr<const ModeLattice>;

LatticePtr build_lattice(double box_edge, int n_max, double mu);

/// Same object or identical (L, n_max, mu); states built on either are
/// interchangeable.
bool same_lattice(const ModeLattice& a, const ModeLattice& b);

/// Uniform sampling grid: point (i, j, k) sits at origin + (i*h.x, j*h.y, k*h.z).
struct GridSpec {
  Vec3 origin;
  Vec3 spacing;
  std::array<int, 3> extents{0, 0, 0};

  std::size_t point_count() const;
  Vec3 point(std::size_t flat_index) const;
  /// Grid covering one box period per axis, centered on the origin.
  static GridSpec box_covering(double box_edge, int points_per_axis);
};

/// Field values on a GridSpec at a fixed time. Values are stored complex;
/// is_real() marks samples whose imaginary part was everywhere negligible
/// (|Im| <= 1e-12 relative to the largest magnitude), as produced by
/// synthesizing a reality-constrained state.
class FieldSample {
 public:
  FieldSample(GridSpec grid, std::vector<Complex> values, double time);

  const GridSpec& grid() const { return grid_; }
  double time() const { return time_; }
  std::span<const Complex> values() const { return values_; }
  bool is_real() const { return is_real_; }
  /// Real parts; meaningful when is_real().
  std::vector<double> real_values() const;
  double max_abs() const;

 private:
  GridSpec grid_;
  std::vector<Complex> values_;
  double time_;
  bool is_real_;
};

/// Whether a ModeState constructor checks and enforces q_{-k} = conj(q_k).
/// Violations at or below 1e-12 (absolute) are symmetrized away; larger ones
/// throw. Allow skips the check for trajectory states whose dynamics leave
/// the constrained submanifold.
enum class RealityPolicy { Enforce, Allow };

/// Complex mode coordinates q_k over a full lattice at a fixed time.
class ModeState {
 public:
  ModeState(LatticePtr lattice, std::vector<Complex> coefficients, double time,
            RealityPolicy policy = RealityPolicy::Enforce);

  static ModeState zero(LatticePtr lattice, double time = 0.0);

  const ModeLattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  double time() const { return time_; }
  void set_time(double t) { time_ = t; }

  std::span<const Complex> coefficients() const { return q_; }
  Complex at(const ModeIndex& m) const;
  void set(const ModeIndex& m, Complex v);

  /// max_k |q_{-k} - conj(q_k)|.
  double reality_violation() const;
  /// Replaces each pair by its constrained projection
  /// (q_k + conj(q_{-k})) / 2 and forces Im q_0 = 0.
  void symmetrize();

  /// sum_k |q_k|^2.
  double norm_sq() const;

 private:
  LatticePtr lattice_;
  std::vector<Complex> q_;
  double time_;
};

/// phi(x) = V^{-1/2} sum_k q_k e^{i k.x} on every grid point.
FieldSample synthesize_field(const ModeState& state, const GridSpec& grid);

/// Inverse transform q_k = V^{-1/2} integral_V phi(x) e^{-i k.x} d3x using the
/// periodic rectangle rule of the grid; exact to roundoff for fields
/// band-limited to the lattice when the grid has >= 2*n_max+1 points per axis.
/// The grid must cover exactly one box period per axis.
ModeState analyze_field(const LatticePtr& lattice, const FieldSample& field);

/// CSV round trip, columns n1,n2,n3,re_q,im_q in lattice enumeration order.
void write_mode_state_csv(std::ostream& os, const ModeState& state);
ModeState read_mode_state_csv(std::istream& is, LatticePtr lattice, double time,
                              RealityPolicy policy = RealityPolicy::Enforce);

}  // namespace efl::modes
