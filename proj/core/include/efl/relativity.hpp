#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "efl/vec3.hpp"

namespace efl::relativity {

using Complex = std::complex<double>;

struct SpacetimeEvent {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// z-axis boost with velocity v (units of c), |v| < 1.
class Boost {
 public:
  explicit Boost(double v);

  double v() const { return v_; }
  double gamma() const { return gamma_; }
  Boost inverse() const { return Boost(-v_); }

  /// Velocity addition: the boost equal to applying `second` after `first`.
  static Boost compose(const Boost& first, const Boost& second);

 private:
  double v_;
  double gamma_;
};

/// t' = gamma (t - v z), z' = gamma (z - v t); x, y unchanged. This maps lab
/// coordinates into the frame comoving at +v, so evaluating a rest-frame
/// field at boost_event(b, e) gives that field moving at +v in the lab.
SpacetimeEvent boost_event(const Boost& b, const SpacetimeEvent& e);

/// Nondispersive packet (sin(mu r)/r) e^{-i mu gamma (t - v z)} with the
/// contracted radius r^2 = x^2 + y^2 + gamma^2 (z - v t)^2; sinc limit at
/// r = 0.
Complex mackinnon_field(double mu, const Boost& b, const SpacetimeEvent& e);

/// Which radical the boosted emergent field uses.
///  - ScalarConsistent: the rest-frame closed form evaluated at the boosted
///    event (gamma^2 (z - v t)^2 under the radical) — a genuine scalar.
///  - LiteralPrinted: gamma to the first power under the radical; breaks the
///    scalar transformation law for v != 0 and exists for the discrepancy
///    test.
enum class BoostedFieldForm { ScalarConsistent, LiteralPrinted };

double boosted_emergent_field(double mu, double volume, const Boost& b,
                              const SpacetimeEvent& e,
                              BoostedFieldForm form = BoostedFieldForm::ScalarConsistent);

/// k = mu gamma v and omega = sqrt(k^2 + mu^2) = mu gamma, plus the moving
/// packet's phase compared against -(omega t - k z) on a fixed (t, z) grid.
struct KinematicCheck {
  double wavenumber;           // k = mu gamma v
  double frequency;            // omega = sqrt(k^2 + mu^2)
  double dispersion_residual;  // | mu gamma - omega |
  double phase_residual;       // max | phase - (-(omega t - k z)) | mod 2 pi
};

KinematicCheck kinematic_phase_check(double mu, double v);

/// Mass-term convention sigma in the residual lap(phi) - dtt(phi) - sigma mu^2 phi.
enum class MassTerm { Massless, KgPlus, KgMinus };

/// A field over spacetime plus what the finite-difference operators need to
/// know about it: its mass scale and (optionally) where its stencils must not
/// reach (non-smooth loci such as a theta-function onset).
struct FieldSampler {
  std::function<Complex(const SpacetimeEvent&)> eval;
  /// Returns false when a +-h stencil at the event would cross a non-smooth
  /// locus; null means smooth everywhere.
  std::function<bool(const SpacetimeEvent&, double)> stencil_ok;
  double mass = 0.0;
};

FieldSampler plane_wave_sampler(double mu, double kz);
FieldSampler mackinnon_sampler(double mu, const Boost& b);
FieldSampler emergent_sampler(double mu, double volume, const Boost& b,
                              BoostedFieldForm form = BoostedFieldForm::ScalarConsistent);

/// | lap(phi) - dtt(phi) - sigma mu^2 phi | at the event by second-order
/// central differences, normalized by mu^2 max|phi| over the 9-point stencil.
/// sigma is 0 / +1 / -1 for Massless / KgPlus / KgMinus; KgPlus is the
/// standard Klein-Gordon operator written space-favored. Throws
/// std::domain_error when the sampler reports the stencil non-smooth.
double wave_operator_residual(const FieldSampler& field, const SpacetimeEvent& e,
                              double h, MassTerm mass_term);

/// Extrapolated limit of an order-2 quantity sampled at h, h/2, h/4.
double richardson_limit(const std::vector<double>& values);

/// log2(coarse/fine) — the observed order under step halving.
double convergence_order(double coarse, double fine);

/// The Bohmian current of a real-valued field vanishes identically; velocity
/// requests on such fields (or where j_0 ~ 0) fail with this.
class DegenerateCurrentError : public std::runtime_error {
 public:
  explicit DegenerateCurrentError(const std::string& what)
      : std::runtime_error(what) {}
};

/// dx_i/dt = j_i / j_0 with j_i = Im(phi^* d_i phi), j_0 = -Im(phi^* d_t phi)
/// (sign fixed so a plane wave e^{i(k z - w t)} moves at +k/w), all
/// derivatives by central differences with step h.
Vec3 bohmian_velocity(const FieldSampler& field, const SpacetimeEvent& e,
                      double h);

struct ParticlePath {
  std::vector<double> times;
  std::vector<Vec3> positions;
};

/// Raised when path integration hits a degenerate current; carries the path
/// up to the last good state.
class PathAbort : public std::runtime_error {
 public:
  PathAbort(const std::string& what, ParticlePath partial_path)
      : std::runtime_error(what), partial(std::move(partial_path)) {}
  ParticlePath partial;
};

/// RK4 on the Bohmian velocity field; fd_step is the finite-difference step
/// handed to bohmian_velocity at each evaluation.
ParticlePath integrate_particle_path(const FieldSampler& field, const Vec3& x0,
                                     double t0, double t1, double dt,
                                     double fd_step);

struct ResidualRow {
  SpacetimeEvent event;
  double h;
  double massless;
  double kg_plus;
  double kg_minus;
};

/// Columns: t,x,y,z,h,residual_massless,residual_kg_plus,residual_kg_minus.
void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows);

/// Columns: t,x,y,z.
void write_path_csv(std::ostream& os, const ParticlePath& path);

}  // namespace efl::relativity
