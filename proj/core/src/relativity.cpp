#include "efl/relativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "efl/emergence.hpp"
#include "efl/numio.hpp"

namespace efl::relativity {

Boost::Boost(double v) : v_(v) {
  if (!(std::abs(v) < 1.0))
    throw std::invalid_argument("boost velocity must satisfy |v| < 1");
  gamma_ = 1.0 / std::sqrt((1.0 - v) * (1.0 + v));
}

Boost Boost::compose(const Boost& first, const Boost& second) {
  return Boost((first.v_ + second.v_) / (1.0 + first.v_ * second.v_));
}

SpacetimeEvent boost_event(const Boost& b, const SpacetimeEvent& e) {
  return SpacetimeEvent{b.gamma() * (e.t - b.v() * e.z), e.x, e.y,
                        b.gamma() * (e.z - b.v() * e.t)};
}

namespace {

double sinc_envelope(double mu, double r) {
  return r == 0.0 ? mu : std::sin(mu * r) / r;
}

}  // namespace

Complex mackinnon_field(double mu, const Boost& b, const SpacetimeEvent& e) {
  if (!(mu > 0.0)) throw std::invalid_argument("mackinnon_field: mu must be > 0");
  const double dz = b.gamma() * (e.z - b.v() * e.t);
  const double r = std::sqrt(e.x * e.x + e.y * e.y + dz * dz);
  const double phase = -mu * b.gamma() * (e.t - b.v() * e.z);
  return sinc_envelope(mu, r) * Complex{std::cos(phase), std::sin(phase)};
}

double boosted_emergent_field(double mu, double volume, const Boost& b,
                              const SpacetimeEvent& e, BoostedFieldForm form) {
  if (form == BoostedFieldForm::ScalarConsistent) {
    const SpacetimeEvent rest = boost_event(b, e);
    const double r =
        std::sqrt(rest.x * rest.x + rest.y * rest.y + rest.z * rest.z);
    return emergence::oracle_field(mu, volume, r, rest.t);
  }
  // Printed variant: gamma enters the radical to the first power only.
  const double dz2 = (e.z - b.v() * e.t) * (e.z - b.v() * e.t);
  const double r = std::sqrt(e.x * e.x + e.y * e.y + b.gamma() * dz2);
  const double t_rest = b.gamma() * (e.t - b.v() * e.z);
  return emergence::oracle_field(mu, volume, r, t_rest);
}

KinematicCheck kinematic_phase_check(double mu, double v) {
  if (!(mu > 0.0))
    throw std::invalid_argument("kinematic_phase_check: mu must be > 0");
  const Boost b(v);
  const double k = mu * b.gamma() * v;
  const double omega = std::hypot(k, mu);
  KinematicCheck out{k, omega, std::abs(mu * b.gamma() - omega), 0.0};
  const double two_pi = 2.0 * std::numbers::pi;
  for (int it = 0; it <= 12; ++it) {
    for (int iz = 0; iz <= 12; ++iz) {
      const double t = -3.0 + 0.5 * it;
      const double z = -3.0 + 0.5 * iz;
      const double packet_phase = -mu * b.gamma() * (t - v * z);
      const double plane_phase = -(omega * t - k * z);
      const double diff = std::remainder(packet_phase - plane_phase, two_pi);
      out.phase_residual = std::max(out.phase_residual, std::abs(diff));
    }
  }
  return out;
}

FieldSampler plane_wave_sampler(double mu, double kz) {
  if (!(mu > 0.0))
    throw std::invalid_argument("plane_wave_sampler: mu must be > 0");
  const double omega = std::hypot(kz, mu);
  FieldSampler s;
  s.mass = mu;
  s.eval = [kz, omega](const SpacetimeEvent& e) {
    const double phase = kz * e.z - omega * e.t;
    return Complex{std::cos(phase), std::sin(phase)};
  };
  return s;
}

FieldSampler mackinnon_sampler(double mu, const Boost& b) {
  FieldSampler s;
  s.mass = mu;
  s.eval = [mu, b](const SpacetimeEvent& e) { return mackinnon_field(mu, b, e); };
  return s;
}

FieldSampler emergent_sampler(double mu, double volume, const Boost& b,
                              BoostedFieldForm form) {
  FieldSampler s;
  s.mass = mu;
  s.eval = [mu, volume, b, form](const SpacetimeEvent& e) {
    return Complex{boosted_emergent_field(mu, volume, b, e, form), 0.0};
  };
  // The theta onset lives on gamma (t - v z) = 0; keep the whole +-h reach of
  // a stencil at least the 2h collar away from it.
  const double gamma = b.gamma();
  const double v = b.v();
  s.stencil_ok = [gamma, v](const SpacetimeEvent& e, double h) {
    const double t_rest = gamma * (e.t - v * e.z);
    return std::abs(t_rest) > 2.0 * h * gamma * (1.0 + std::abs(v));
  };
  return s;
}

namespace {

struct Stencil {
  Complex c, tp, tm, xp, xm, yp, ym, zp, zm;
  double max_abs;
  double max_im;
};

Stencil sample_stencil(const FieldSampler& f, const SpacetimeEvent& e, double h) {
  Stencil s{};
  s.c = f.eval(e);
  s.tp = f.eval({e.t + h, e.x, e.y, e.z});
  s.tm = f.eval({e.t - h, e.x, e.y, e.z});
  s.xp = f.eval({e.t, e.x + h, e.y, e.z});
  s.xm = f.eval({e.t, e.x - h, e.y, e.z});
  s.yp = f.eval({e.t, e.x, e.y + h, e.z});
  s.ym = f.eval({e.t, e.x, e.y - h, e.z});
  s.zp = f.eval({e.t, e.x, e.y, e.z + h});
  s.zm = f.eval({e.t, e.x, e.y, e.z - h});
  s.max_abs = 0.0;
  s.max_im = 0.0;
  for (const Complex* v : {&s.c, &s.tp, &s.tm, &s.xp, &s.xm, &s.yp, &s.ym,
                           &s.zp, &s.zm}) {
    s.max_abs = std::max(s.max_abs, std::abs(*v));
    s.max_im = std::max(s.max_im, std::abs(v->imag()));
  }
  return s;
}

void check_stencil(const FieldSampler& f, const SpacetimeEvent& e, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("stencil step must be > 0");
  if (f.stencil_ok && !f.stencil_ok(e, h)) {
    std::ostringstream msg;
    msg << "finite-difference stencil at t = " << e.t << ", z = " << e.z
        << " (h = " << h << ") crosses a non-smooth locus of the field";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

double wave_operator_residual(const FieldSampler& field, const SpacetimeEvent& e,
                              double h, MassTerm mass_term) {
  if (!(field.mass > 0.0))
    throw std::invalid_argument("wave_operator_residual: sampler must carry mass > 0");
  check_stencil(field, e, h);
  const Stencil s = sample_stencil(field, e, h);
  if (s.max_abs == 0.0) return 0.0;
  const double h2 = h * h;
  const Complex lap =
      (s.xp + s.xm + s.yp + s.ym + s.zp + s.zm - 6.0 * s.c) / h2;
  const Complex dtt = (s.tp + s.tm - 2.0 * s.c) / h2;
  const double sigma = mass_term == MassTerm::Massless  ? 0.0
                       : mass_term == MassTerm::KgPlus ? 1.0
                                                       : -1.0;
  const double mu2 = field.mass * field.mass;
  const Complex resid = lap - dtt - sigma * mu2 * s.c;
  return std::abs(resid) / (mu2 * s.max_abs);
}

double richardson_limit(const std::vector<double>& values) {
  if (values.size() != 3)
    throw std::invalid_argument("richardson_limit expects samples at h, h/2, h/4");
  const double r1 = (4.0 * values[1] - values[0]) / 3.0;
  const double r2 = (4.0 * values[2] - values[1]) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

double convergence_order(double coarse, double fine) {
  if (!(coarse > 0.0) || !(fine > 0.0))
    return std::numeric_limits<double>::quiet_NaN();
  return std::log2(coarse / fine);
}

Vec3 bohmian_velocity(const FieldSampler& field, const SpacetimeEvent& e,
                      double h) {
  check_stencil(field, e, h);
  const Stencil s = sample_stencil(field, e, h);
  if (s.max_abs == 0.0)
    throw DegenerateCurrentError("bohmian_velocity: field vanishes on the stencil");
  if (s.max_im <= 1e-12 * s.max_abs)
    throw DegenerateCurrentError(
        "bohmian_velocity: real-valued field carries an identically zero current");
  const Complex cc = std::conj(s.c);
  const double inv2h = 1.0 / (2.0 * h);
  const double jx = (cc * (s.xp - s.xm)).imag() * inv2h;
  const double jy = (cc * (s.yp - s.ym)).imag() * inv2h;
  const double jz = (cc * (s.zp - s.zm)).imag() * inv2h;
  const double j0 = -(cc * (s.tp - s.tm)).imag() * inv2h;
  // j0 is a first derivative of a |phi|^2-sized quantity; anything below
  // roundoff scale of that is a genuine degeneracy, not a small velocity.
  if (std::abs(j0) < 1e-12 * s.max_abs * s.max_abs / h)
    throw DegenerateCurrentError("bohmian_velocity: time component of the current vanishes");
  return Vec3{jx / j0, jy / j0, jz / j0};
}

ParticlePath integrate_particle_path(const FieldSampler& field, const Vec3& x0,
                                     double t0, double t1, double dt,
                                     double fd_step) {
  if (!(dt > 0.0)) throw std::invalid_argument("particle path: dt must be > 0");
  if (!(t1 > t0)) throw std::invalid_argument("particle path: empty time range");
  if (!(fd_step > 0.0))
    throw std::invalid_argument("particle path: fd_step must be > 0");

  const double span = t1 - t0;
  const long long n_steps = std::max(1LL, std::llround(span / dt));
  const double h = span / static_cast<double>(n_steps);

  ParticlePath path;
  path.times.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.positions.reserve(static_cast<std::size_t>(n_steps) + 1);
  path.times.push_back(t0);
  path.positions.push_back(x0);

  auto vel = [&](double t, const Vec3& p) {
    return bohmian_velocity(field, SpacetimeEvent{t, p.x, p.y, p.z}, fd_step);
  };

  Vec3 pos = x0;
  for (long long step = 0; step < n_steps; ++step) {
    const double t = t0 + h * static_cast<double>(step);
    try {
      const Vec3 k1 = vel(t, pos);
      const Vec3 k2 = vel(t + 0.5 * h, pos + (0.5 * h) * k1);
      const Vec3 k3 = vel(t + 0.5 * h, pos + (0.5 * h) * k2);
      const Vec3 k4 = vel(t + h, pos + h * k3);
      pos = pos + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const DegenerateCurrentError& err) {
      std::ostringstream msg;
      msg << "particle path aborted in step to t = " << t + h << ": "
          << err.what();
      throw PathAbort(msg.str(), std::move(path));
    }
    path.times.push_back(t0 + h * static_cast<double>(step + 1));
    path.positions.push_back(pos);
  }
  return path;
}

void write_residual_csv(std::ostream& os, const std::vector<ResidualRow>& rows) {
  os << "t,x,y,z,h,residual_massless,residual_kg_plus,residual_kg_minus\n";
  for (const ResidualRow& r : rows) {
    os << format_full(r.event.t) << ',' << format_full(r.event.x) << ','
       << format_full(r.event.y) << ',' << format_full(r.event.z) << ','
       << format_full(r.h) << ',' << format_full(r.massless) << ','
       << format_full(r.kg_plus) << ',' << format_full(r.kg_minus) << '\n';
  }
}

void write_path_csv(std::ostream& os, const ParticlePath& path) {
  os << "t,x,y,z\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    os << format_full(path.times[i]) << ',' << format_full(path.positions[i].x)
       << ',' << format_full(path.positions[i].y) << ','
       << format_full(path.positions[i].z) << '\n';
  }
}

}  // namespace efl::relativity
