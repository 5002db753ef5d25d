#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "efl/guidance.hpp"
#include "efl/lattice.hpp"

namespace efl::emergence {

/// The emergent localized field: summing the analytic standing-wave solution
/// over the shell, each mode carries theta(t) * sin(w t)/(sqrt(2w) w) with the
/// shell frequency taken as w = mu, so
///   phi(x, t) = theta(t) * (1/sqrt(V)) * sin(mu t)/(sqrt(2 mu) mu) * sum_{k in M} e^{ik.x}.
/// Sums over the shell modes only (never the dense lattice), so large-cutoff
/// lattices cost |M| * grid points.
modes::FieldSample reconstruct_field(const modes::LatticePtr& lattice,
                                     const guidance::ShellSet& shell, double t,
                                     const modes::GridSpec& grid);

/// Continuum closed form the reconstruction converges to:
///   (1/sqrt(2 V mu)) * (1/(2 pi^2)) * (sin(mu r)/r) * theta(t) * sin(mu t),
/// with sin(mu r)/r -> mu at r = 0.
double oracle_field(double mu, double volume, double r, double t);

/// Angular quadrature of the delta-shell integral
///   (1/(2 pi))^2 * int delta(mu - k) k e^{i k r cos(theta)} sin(theta) dk dtheta dphi
/// with the radial delta collapsed at k = mu, Gauss-Legendre in theta and the
/// exact 2 pi azimuth. Converges spectrally to (1/pi) sin(mu r)/r; at r = 0
/// returns the limit mu/pi.
double shell_integral(double mu, double r, int n_theta);

/// Angular average of a field over radius bins.
struct RadialProfile {
  std::vector<double> radii;   // bin centers, strictly increasing
  std::vector<double> values;  // mean field value per bin
  double time = 0.0;
  std::string convention;      // amplitude convention tag, e.g. "raw-binned"
};

/// Bins grid points by |x| with the given bin width (empty bins dropped) and
/// averages the real part. r_max must lie inside the grid's reach.
RadialProfile radial_average(const modes::FieldSample& field, double r_max,
                             double bin_width);

struct ProfileComparison {
  double l2_error;          // || sample_hat - oracle_hat ||_2, both unit L2
  double first_zero_error;  // | first sign change radius - pi/mu |
  double amplitude_ratio;   // sample/oracle L2 ratio before normalization;
                            // NaN unless a volume was supplied
};

/// Shape comparison against the closed form over the profile's own radial
/// window. Discrete shell sums and the continuum prefactor differ by the
/// sum-to-integral density, so both curves are normalized to unit L2 before
/// differencing; pass the box volume to also record the raw amplitude ratio.
ProfileComparison compare_profiles(const RadialProfile& sample, double mu,
                                   double t, double volume = 0.0);

/// Convenience overload: radially average the field (bin width = grid
/// spacing) over [0, r_max] first.
ProfileComparison compare_profiles(const modes::FieldSample& field, double mu,
                                   double t, double r_max, double volume = 0.0);

/// Full 3D shape mismatch over the ball |x| <= r_max: normalized L2 of
/// (field - oracle) with both unit-normalized over the ball's grid points.
/// This is the scale-matched convergence metric: shrinking r_max as 1/mu
/// compares the same number of oracle lobes across shells.
double field_mismatch(const modes::FieldSample& field, double mu, double volume,
                      double r_max);

/// Columns: r, phi_reconstructed, phi_oracle, abs_diff (both curves unit-L2
/// normalized over the profile window).
void write_profile_csv(std::ostream& os, const RadialProfile& sample, double mu);

}  // namespace efl::emergence
