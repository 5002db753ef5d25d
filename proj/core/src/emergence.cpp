#include "efl/emergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "efl/numio.hpp"
#include "efl/parallel.hpp"
#include "efl/quadrature.hpp"
#include "phase_tables.hpp"

namespace efl::emergence {

using modes::Complex;

modes::FieldSample reconstruct_field(const modes::LatticePtr& lattice,
                                     const guidance::ShellSet& shell, double t,
                                     const modes::GridSpec& grid) {
  if (!lattice) throw std::invalid_argument("reconstruct_field: null lattice");
  if (shell.members.empty())
    throw guidance::EmptyShellError("reconstruct_field: empty shell");
  const double mu = lattice->mass();
  if (!(mu > 0.0))
    throw std::invalid_argument("reconstruct_field needs a massive lattice");
  if (grid.point_count() == 0)
    throw std::invalid_argument("reconstruct_field: empty grid");

  // theta(t) * integral_0^t cos(w t') dt' of the analytic mode solution's
  // real part, times its 1/sqrt(2w) amplitude, with w = mu on the shell.
  const double coeff =
      t > 0.0 ? std::sin(mu * t) / (std::sqrt(2.0 * mu) * mu) : 0.0;
  const double norm = coeff / std::sqrt(lattice->volume());

  const modes::detail::PhaseTables tables(*lattice, grid, +1.0);
  const int n_max = lattice->cutoff();
  struct Offsets {
    int a, b, c;
  };
  std::vector<Offsets> shell_idx;
  shell_idx.reserve(shell.members.size());
  for (const modes::ModeIndex& m : shell.members)
    shell_idx.push_back({m.n1 + n_max, m.n2 + n_max, m.n3 + n_max});

  const std::size_t ny = static_cast<std::size_t>(grid.extents[1]);
  const std::size_t nz = static_cast<std::size_t>(grid.extents[2]);
  std::vector<Complex> values(grid.point_count());
  parallel_for(values.size(), [&](std::size_t p) {
    const std::size_t k = p % nz;
    const std::size_t j = (p / nz) % ny;
    const std::size_t i = p / (nz * ny);
    const Complex* rx = tables.row_x(i);
    const Complex* ry = tables.row_y(j);
    const Complex* rz = tables.row_z(k);
    Complex acc{0.0, 0.0};
    for (const Offsets& o : shell_idx) acc += rx[o.a] * ry[o.b] * rz[o.c];
    values[p] = norm * acc;
  });
  return modes::FieldSample(grid, std::move(values), t);
}

double oracle_field(double mu, double volume, double r, double t) {
  if (!(mu > 0.0)) throw std::invalid_argument("oracle_field: mu must be > 0");
  if (!(volume > 0.0))
    throw std::invalid_argument("oracle_field: volume must be > 0");
  if (r < 0.0) throw std::invalid_argument("oracle_field: r must be >= 0");
  if (t <= 0.0) return 0.0;
  const double spatial = r == 0.0 ? mu : std::sin(mu * r) / r;
  const double pref =
      1.0 / (std::sqrt(2.0 * volume * mu) * 2.0 * std::numbers::pi *
             std::numbers::pi);
  return pref * spatial * std::sin(mu * t);
}

double shell_integral(double mu, double r, int n_theta) {
  if (!(mu > 0.0)) throw std::invalid_argument("shell_integral: mu must be > 0");
  if (r < 0.0) throw std::invalid_argument("shell_integral: r must be >= 0");
  if (n_theta < 2)
    throw std::invalid_argument("shell_integral: need at least 2 nodes");
  const double pi = std::numbers::pi;
  if (r == 0.0) return mu / pi;

  // Radial delta collapsed at k = mu and the 2 pi azimuth done exactly;
  // Gauss-Legendre handles theta on [0, pi].
  const GaussLegendreRule rule = gauss_legendre(n_theta);
  Complex acc{0.0, 0.0};
  for (int i = 0; i < n_theta; ++i) {
    const double theta = 0.5 * pi * (rule.nodes[i] + 1.0);
    acc += rule.weights[i] * std::sin(theta) *
           std::polar(1.0, mu * r * std::cos(theta));
  }
  acc *= 0.5 * pi;  // d theta / d node
  return mu / (2.0 * pi) * acc.real();
}

RadialProfile radial_average(const modes::FieldSample& field, double r_max,
                             double bin_width) {
  if (!(bin_width > 0.0))
    throw std::invalid_argument("radial_average: bin width must be > 0");
  if (!(r_max > 0.0))
    throw std::invalid_argument("radial_average: r_max must be > 0");
  const modes::GridSpec& grid = field.grid();
  double reach = 0.0;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 p{
        grid.origin.x + ((corner & 1) ? grid.spacing.x * (grid.extents[0] - 1) : 0.0),
        grid.origin.y + ((corner & 2) ? grid.spacing.y * (grid.extents[1] - 1) : 0.0),
        grid.origin.z + ((corner & 4) ? grid.spacing.z * (grid.extents[2] - 1) : 0.0)};
    reach = std::max(reach, p.norm());
  }
  if (r_max > reach)
    throw std::invalid_argument("radial_average: window extends beyond the grid");

  const std::size_t n_bins = static_cast<std::size_t>(std::ceil(r_max / bin_width));
  std::vector<double> sums(n_bins, 0.0);
  std::vector<std::size_t> counts(n_bins, 0);
  const auto values = field.values();
  for (std::size_t p = 0; p < values.size(); ++p) {
    const double r = grid.point(p).norm();
    if (r >= r_max) continue;
    const std::size_t b = static_cast<std::size_t>(r / bin_width);
    if (b >= n_bins) continue;
    sums[b] += values[p].real();
    ++counts[b];
  }
  RadialProfile profile;
  profile.time = field.time();
  profile.convention = "raw-binned";
  for (std::size_t b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) continue;
    profile.radii.push_back((static_cast<double>(b) + 0.5) * bin_width);
    profile.values.push_back(sums[b] / static_cast<double>(counts[b]));
  }
  if (profile.radii.empty())
    throw std::invalid_argument("radial_average: no grid points in window");
  return profile;
}

namespace {

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

/// Sample and oracle shapes at the profile's radii, both scaled to unit L2.
struct NormalizedPair {
  std::vector<double> sample;
  std::vector<double> oracle;
  double amplitude_ratio;
};

NormalizedPair normalized_shapes(const RadialProfile& profile, double mu,
                                 double volume) {
  NormalizedPair out;
  out.sample = profile.values;
  out.oracle.resize(profile.radii.size());
  // Unit volume keeps the shape; the true volume only affects the recorded
  // amplitude ratio.
  const double v_for_shape = volume > 0.0 ? volume : 1.0;
  for (std::size_t i = 0; i < profile.radii.size(); ++i)
    out.oracle[i] = oracle_field(mu, v_for_shape, profile.radii[i], profile.time);
  const double ns = l2_norm(out.sample);
  const double no = l2_norm(out.oracle);
  if (ns == 0.0 || no == 0.0)
    throw std::invalid_argument(
        "profile comparison: a profile vanishes on the window");
  out.amplitude_ratio =
      volume > 0.0 ? ns / no : std::numeric_limits<double>::quiet_NaN();
  for (double& x : out.sample) x /= ns;
  for (double& x : out.oracle) x /= no;
  return out;
}

double first_zero_crossing(const RadialProfile& profile) {
  for (std::size_t i = 1; i < profile.values.size(); ++i) {
    const double a = profile.values[i - 1];
    const double b = profile.values[i];
    if (a == 0.0) return profile.radii[i - 1];
    if ((a > 0.0) != (b > 0.0)) {
      const double f = a / (a - b);
      return profile.radii[i - 1] + f * (profile.radii[i] - profile.radii[i - 1]);
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

ProfileComparison compare_profiles(const RadialProfile& sample, double mu,
                                   double t, double volume) {
  if (!(t > 0.0))
    throw std::invalid_argument("profile comparison needs t > 0");
  if (std::sin(mu * t) == 0.0)
    throw std::invalid_argument(
        "profile comparison at a temporal zero of the field");
  const NormalizedPair shapes = normalized_shapes(sample, mu, volume);
  std::vector<double> diff(shapes.sample.size());
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = shapes.sample[i] - shapes.oracle[i];
  const double zero = first_zero_crossing(sample);
  return ProfileComparison{l2_norm(diff),
                           std::abs(zero - std::numbers::pi / mu),
                           shapes.amplitude_ratio};
}

ProfileComparison compare_profiles(const modes::FieldSample& field, double mu,
                                   double t, double r_max, double volume) {
  const RadialProfile profile =
      radial_average(field, r_max, field.grid().spacing.x);
  return compare_profiles(profile, mu, t, volume);
}

double field_mismatch(const modes::FieldSample& field, double mu, double volume,
                      double r_max) {
  if (!(r_max > 0.0))
    throw std::invalid_argument("field_mismatch: r_max must be > 0");
  const modes::GridSpec& grid = field.grid();
  const auto values = field.values();
  std::vector<double> sample, oracle;
  for (std::size_t p = 0; p < values.size(); ++p) {
    const double r = grid.point(p).norm();
    if (r > r_max) continue;
    sample.push_back(values[p].real());
    oracle.push_back(oracle_field(mu, volume, r, field.time()));
  }
  if (sample.empty())
    throw std::invalid_argument("field_mismatch: no grid points in the ball");
  const double ns = l2_norm(sample);
  const double no = l2_norm(oracle);
  if (ns == 0.0 || no == 0.0)
    throw std::invalid_argument("field_mismatch: a field vanishes on the ball");
  double acc = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double d = sample[i] / ns - oracle[i] / no;
    acc += d * d;
  }
  return std::sqrt(acc);
}

void write_profile_csv(std::ostream& os, const RadialProfile& sample, double mu) {
  const NormalizedPair shapes = normalized_shapes(sample, mu, 0.0);
  os << "r,phi_reconstructed,phi_oracle,abs_diff\n";
  for (std::size_t i = 0; i < sample.radii.size(); ++i) {
    os << format_full(sample.radii[i]) << ',' << format_full(shapes.sample[i])
       << ',' << format_full(shapes.oracle[i]) << ','
       << format_full(std::abs(shapes.sample[i] - shapes.oracle[i])) << '\n';
  }
}

}  // namespace efl::emergence
