#include "efl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "efl/numio.hpp"
#include "efl/parallel.hpp"
#include "phase_tables.hpp"

namespace efl::modes {

namespace {

bool lexicographically_positive(const ModeIndex& m) {
  if (m.n1 != 0) return m.n1 > 0;
  if (m.n2 != 0) return m.n2 > 0;
  return m.n3 > 0;
}

}  // namespace

std::ostream& operator<<(std::ostream& os, const ModeIndex& m) {
  return os << '(' << m.n1 << ',' << m.n2 << ',' << m.n3 << ')';
}

ModeLattice::ModeLattice(double box_edge, int n_max, double mu)
    : box_edge_(box_edge), n_max_(n_max), mu_(mu) {
  if (!(box_edge > 0.0)) throw std::invalid_argument("box edge must be positive");
  if (n_max < 0) throw std::invalid_argument("mode cutoff must be non-negative");
  if (!(mu >= 0.0)) throw std::invalid_argument("mass must be non-negative");

  const int w = 2 * n_max + 1;
  modes_.reserve(static_cast<std::size_t>(w) * w * w);
  for (int n1 = -n_max; n1 <= n_max; ++n1)
    for (int n2 = -n_max; n2 <= n_max; ++n2)
      for (int n3 = -n_max; n3 <= n_max; ++n3) modes_.push_back({n1, n2, n3});

  half_modes_.reserve(modes_.size() / 2 + 1);
  for (const ModeIndex& m : modes_)
    if (lexicographically_positive(m) || m == ModeIndex{0, 0, 0})
      half_modes_.push_back(m);
}

bool ModeLattice::contains(const ModeIndex& m) const {
  return std::abs(m.n1) <= n_max_ && std::abs(m.n2) <= n_max_ &&
         std::abs(m.n3) <= n_max_;
}

std::size_t ModeLattice::index_of(const ModeIndex& m) const {
  if (!contains(m)) {
    std::ostringstream msg;
    msg << "mode " << m << " outside lattice with cutoff " << n_max_;
    throw std::out_of_range(msg.str());
  }
  const int w = 2 * n_max_ + 1;
  return (static_cast<std::size_t>(m.n1 + n_max_) * w + (m.n2 + n_max_)) * w +
         (m.n3 + n_max_);
}

Vec3 ModeLattice::wavevector(const ModeIndex& m) const {
  const double step = 2.0 * std::numbers::pi / box_edge_;
  return {step * m.n1, step * m.n2, step * m.n3};
}

double ModeLattice::dispersion(const ModeIndex& m) const {
  return dispersion(wavevector(m));
}

double ModeLattice::dispersion(const Vec3& k) const {
  return std::sqrt(k.dot(k) + mu_ * mu_);
}

LatticePtr build_lattice(double box_edge, int n_max, double mu) {
  return std::make_shared<const ModeLattice>(box_edge, n_max, mu);
}

bool same_lattice(const ModeLattice& a, const ModeLattice& b) {
  return &a == &b || (a.box_edge() == b.box_edge() && a.cutoff() == b.cutoff() &&
                      a.mass() == b.mass());
}

std::size_t GridSpec::point_count() const {
  if (extents[0] <= 0 || extents[1] <= 0 || extents[2] <= 0) return 0;
  return static_cast<std::size_t>(extents[0]) * extents[1] * extents[2];
}

Vec3 GridSpec::point(std::size_t flat_index) const {
  const std::size_t nz = static_cast<std::size_t>(extents[2]);
  const std::size_t ny = static_cast<std::size_t>(extents[1]);
  const std::size_t k = flat_index % nz;
  const std::size_t j = (flat_index / nz) % ny;
  const std::size_t i = flat_index / (nz * ny);
  return {origin.x + spacing.x * static_cast<double>(i),
          origin.y + spacing.y * static_cast<double>(j),
          origin.z + spacing.z * static_cast<double>(k)};
}

GridSpec GridSpec::box_covering(double box_edge, int points_per_axis) {
  if (points_per_axis <= 0)
    throw std::invalid_argument("grid needs at least one point per axis");
  const double h = box_edge / points_per_axis;
  GridSpec g;
  g.origin = {-box_edge / 2.0, -box_edge / 2.0, -box_edge / 2.0};
  g.spacing = {h, h, h};
  g.extents = {points_per_axis, points_per_axis, points_per_axis};
  return g;
}

FieldSample::FieldSample(GridSpec grid, std::vector<Complex> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.point_count())
    throw std::invalid_argument("field sample size does not match grid");
  double max_im = 0.0, max_mag = 0.0;
  for (const Complex& v : values_) {
    max_im = std::max(max_im, std::abs(v.imag()));
    max_mag = std::max(max_mag, std::abs(v));
  }
  is_real_ = max_mag == 0.0 || max_im <= 1e-12 * max_mag;
}

std::vector<double> FieldSample::real_values() const {
  std::vector<double> out(values_.size());
  std::transform(values_.begin(), values_.end(), out.begin(),
                 [](const Complex& v) { return v.real(); });
  return out;
}

double FieldSample::max_abs() const {
  double m = 0.0;
  for (const Complex& v : values_) m = std::max(m, std::abs(v));
  return m;
}

ModeState::ModeState(LatticePtr lattice, std::vector<Complex> coefficients,
                     double time, RealityPolicy policy)
    : lattice_(std::move(lattice)), q_(std::move(coefficients)), time_(time) {
  if (!lattice_) throw std::invalid_argument("mode state needs a lattice");
  if (q_.size() != lattice_->size())
    throw std::invalid_argument("coefficient count does not match lattice");
  if (policy == RealityPolicy::Enforce) {
    const double v = reality_violation();
    if (v > 1e-12) {
      std::ostringstream msg;
      msg << "reality constraint q_{-k} = conj(q_k) violated by " << v;
      throw std::invalid_argument(msg.str());
    }
    symmetrize();
  }
}

ModeState ModeState::zero(LatticePtr lattice, double time) {
  std::vector<Complex> q(lattice->size(), Complex{0.0, 0.0});
  return ModeState(std::move(lattice), std::move(q), time);
}

Complex ModeState::at(const ModeIndex& m) const {
  return q_[lattice_->index_of(m)];
}

void ModeState::set(const ModeIndex& m, Complex v) {
  q_[lattice_->index_of(m)] = v;
}

double ModeState::reality_violation() const {
  double worst = 0.0;
  for (const ModeIndex& m : lattice_->half_modes()) {
    const Complex a = q_[lattice_->index_of(m)];
    const Complex b = q_[lattice_->index_of(m.negated())];
    worst = std::max(worst, std::abs(b - std::conj(a)));
  }
  return worst;
}

void ModeState::symmetrize() {
  for (const ModeIndex& m : lattice_->half_modes()) {
    const std::size_t i = lattice_->index_of(m);
    const std::size_t j = lattice_->index_of(m.negated());
    if (i == j) {
      q_[i] = Complex{q_[i].real(), 0.0};
      continue;
    }
    const Complex p = 0.5 * (q_[i] + std::conj(q_[j]));
    q_[i] = p;
    q_[j] = std::conj(p);
  }
}

double ModeState::norm_sq() const {
  double s = 0.0;
  for (const Complex& v : q_) s += std::norm(v);
  return s;
}

using detail::PhaseTables;

FieldSample synthesize_field(const ModeState& state, const GridSpec& grid) {
  const ModeLattice& lat = state.lattice();
  if (grid.point_count() == 0)
    throw std::invalid_argument("cannot synthesize on an empty grid");

  const PhaseTables tables(lat, grid, +1.0);
  const int w = tables.width;
  const double norm = 1.0 / std::sqrt(lat.volume());
  const std::span<const Complex> q = state.coefficients();
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
    std::size_t flat = 0;
    for (int a = 0; a < w; ++a) {
      for (int b = 0; b < w; ++b) {
        const Complex pxy = rx[a] * ry[b];
        Complex inner{0.0, 0.0};
        for (int c = 0; c < w; ++c, ++flat) inner += q[flat] * rz[c];
        acc += pxy * inner;
      }
    }
    values[p] = norm * acc;
  });
  return FieldSample(grid, std::move(values), state.time());
}

ModeState analyze_field(const LatticePtr& lattice, const FieldSample& field) {
  const ModeLattice& lat = *lattice;
  const GridSpec& grid = field.grid();
  const double L = lat.box_edge();
  for (int axis = 0; axis < 3; ++axis) {
    const double h = axis == 0   ? grid.spacing.x
                     : axis == 1 ? grid.spacing.y
                                 : grid.spacing.z;
    const double span = h * grid.extents[axis];
    if (std::abs(span - L) > 1e-9 * L)
      throw std::invalid_argument(
          "analysis grid must cover exactly one box period per axis");
  }

  const PhaseTables tables(lat, grid, -1.0);
  const int w = tables.width;
  const double cell = grid.spacing.x * grid.spacing.y * grid.spacing.z;
  const double norm = cell / std::sqrt(lat.volume());
  const std::span<const Complex> phi = field.values();
  const std::size_t ny = static_cast<std::size_t>(grid.extents[1]);
  const std::size_t nz = static_cast<std::size_t>(grid.extents[2]);

  std::vector<Complex> q(lat.size());
  parallel_for(lat.size(), [&](std::size_t mi) {
    const int c = static_cast<int>(mi % w);
    const int b = static_cast<int>((mi / w) % w);
    const int a = static_cast<int>(mi / (static_cast<std::size_t>(w) * w));
    Complex acc{0.0, 0.0};
    std::size_t p = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(grid.extents[0]); ++i) {
      const Complex px = tables.row_x(i)[a];
      for (std::size_t j = 0; j < ny; ++j) {
        const Complex pxy = px * tables.row_y(j)[b];
        Complex inner{0.0, 0.0};
        for (std::size_t k = 0; k < nz; ++k, ++p) inner += phi[p] * tables.row_z(k)[c];
        acc += pxy * inner;
      }
    }
    q[mi] = norm * acc;
  });
  return ModeState(lattice, std::move(q), field.time(), RealityPolicy::Allow);
}

void write_mode_state_csv(std::ostream& os, const ModeState& state) {
  os << "n1,n2,n3,re_q,im_q\n";
  const auto modes = state.lattice().all_modes();
  const auto q = state.coefficients();
  for (std::size_t i = 0; i < modes.size(); ++i) {
    os << modes[i].n1 << ',' << modes[i].n2 << ',' << modes[i].n3 << ','
       << format_full(q[i].real()) << ',' << format_full(q[i].imag()) << '\n';
  }
}

ModeState read_mode_state_csv(std::istream& is, LatticePtr lattice, double time,
                              RealityPolicy policy) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("n1,n2,n3", 0) != 0)
    throw std::runtime_error("mode state csv: missing header");
  std::vector<Complex> q(lattice->size(), Complex{0.0, 0.0});
  std::vector<char> seen(lattice->size(), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    ModeIndex m;
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(row >> m.n1 >> comma >> m.n2 >> comma >> m.n3 >> comma >> re >>
          comma >> im))
      throw std::runtime_error("mode state csv: malformed row: " + line);
    const std::size_t i = lattice->index_of(m);
    if (seen[i]) throw std::runtime_error("mode state csv: duplicate mode row");
    seen[i] = 1;
    q[i] = Complex{re, im};
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw std::runtime_error("mode state csv: missing mode rows");
  return ModeState(std::move(lattice), std::move(q), time, policy);
}

}  // namespace efl::modes
