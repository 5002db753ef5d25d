#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "efl/emergence.hpp"

using namespace efl;
using namespace efl::modes;
using namespace efl::emergence;
using efl::guidance::ShellSet;
using efl::guidance::shell_modes;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPi = std::numbers::pi;

GridSpec single_point(Vec3 x) {
  return GridSpec{x, Vec3{1.0, 1.0, 1.0}, {1, 1, 1}};
}
}  // namespace

TEST_CASE("field reconstruction") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const ShellSet shell = shell_modes(*lat, 0.0);
  const double volume = lat->volume();

  SUBCASE("vanishes before and at the switch-on") {
    for (double t : {-1.0, -0.2, 0.0}) {
      const FieldSample f =
          reconstruct_field(lat, shell, t, GridSpec::box_covering(kTwoPi, 8));
      CHECK(f.max_abs() == 0.0);
    }
  }

  SUBCASE("origin value counts the shell multiplicity") {
    const double t = 0.3;
    const FieldSample f = reconstruct_field(lat, shell, t, single_point({0, 0, 0}));
    const double expected =
        6.0 * std::sin(t) / (std::sqrt(2.0) * std::sqrt(volume));
    CHECK(f.values()[0].real() == doctest::Approx(expected).epsilon(1e-13));
    CHECK(f.values()[0].imag() == doctest::Approx(0.0));
  }

  SUBCASE("axis value pairs the six shell phases") {
    const double t = 1.1, x = 0.5;
    const FieldSample f =
        reconstruct_field(lat, shell, t, single_point({x, 0, 0}));
    // +-x modes contribute 2 cos(x); the four transverse modes contribute 1 each
    const double expected = (2.0 * std::cos(x) + 4.0) * std::sin(t) /
                            (std::sqrt(2.0) * std::sqrt(volume));
    CHECK(f.values()[0].real() == doctest::Approx(expected).epsilon(1e-13));
  }

  SUBCASE("real everywhere") {
    const FieldSample f =
        reconstruct_field(lat, shell, 0.7, GridSpec::box_covering(kTwoPi, 16));
    CHECK(f.is_real());
  }

  SUBCASE("space and time factorize exactly") {
    const GridSpec grid = GridSpec::box_covering(kTwoPi, 12);
    const double t1 = 0.4, t2 = 1.9;
    const FieldSample f1 = reconstruct_field(lat, shell, t1, grid);
    const FieldSample f2 = reconstruct_field(lat, shell, t2, grid);
    const double s1 = std::sin(t1), s2 = std::sin(t2);
    const double scale = f1.max_abs();
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
      CHECK(std::abs(f1.values()[p] * s2 - f2.values()[p] * s1) <=
            1e-14 * scale);
    }
  }

  SUBCASE("respects the cubic point group") {
    const int n = 16;
    const GridSpec grid = GridSpec::box_covering(kTwoPi, n);
    const FieldSample f = reconstruct_field(lat, shell, 0.9, grid);
    const double tol = 1e-12 * f.max_abs();
    auto at = [&](int i, int j, int k) {
      return f.values()[(static_cast<std::size_t>(i) * n + j) * n + k].real();
    };
    for (int i = 1; i < n; i += 3)
      for (int j = 1; j < n; j += 3)
        for (int k = 1; k < n; k += 3) {
          const double v = at(i, j, k);
          CHECK(std::abs(at(j, i, k) - v) <= tol);   // swap x, y
          CHECK(std::abs(at(k, j, i) - v) <= tol);   // swap x, z
          CHECK(std::abs(at(n - i, j, k) - v) <= tol);  // reflect x
          CHECK(std::abs(at(i, n - j, k) - v) <= tol);  // reflect y
        }
  }

  SUBCASE("round trips through the dense mode analyzer") {
    const double t = 0.4;
    const GridSpec grid = GridSpec::box_covering(kTwoPi, 8);
    const FieldSample f = reconstruct_field(lat, shell, t, grid);
    const ModeState recovered = analyze_field(lat, f);
    const double coeff = std::sin(t) / std::sqrt(2.0);
    for (const ModeIndex& m : lat->all_modes()) {
      const bool on_shell =
          std::count(shell.members.begin(), shell.members.end(), m) > 0;
      const Complex expected = on_shell ? Complex{coeff, 0.0} : Complex{0.0, 0.0};
      CHECK(std::abs(recovered.at(m) - expected) <= 1e-12);
    }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(reconstruct_field(lat, ShellSet{}, 0.5, single_point({0, 0, 0})),
                    guidance::EmptyShellError);
    CHECK_THROWS_AS(
        reconstruct_field(lat, shell, 0.5, GridSpec{{0, 0, 0}, {1, 1, 1}, {0, 4, 4}}),
        std::invalid_argument);
    auto massless = build_lattice(kTwoPi, 1, 0.0);
    ShellSet fake;
    fake.members = shell.members;
    CHECK_THROWS_AS(reconstruct_field(massless, fake, 0.5, single_point({0, 0, 0})),
                    std::invalid_argument);
  }
}

TEST_CASE("closed-form field") {
  const double volume = std::pow(kTwoPi, 3);

  SUBCASE("r = 0 limit") {
    const double mu = 2.0, t = 0.4;
    const double pref =
        1.0 / (std::sqrt(2.0 * volume * mu) * 2.0 * kPi * kPi);
    CHECK(oracle_field(mu, volume, 0.0, t) ==
          doctest::Approx(pref * mu * std::sin(mu * t)).epsilon(1e-15));
    CHECK(oracle_field(mu, volume, 1e-8, t) ==
          doctest::Approx(oracle_field(mu, volume, 0.0, t)).epsilon(1e-12));
  }

  SUBCASE("switched off for t <= 0") {
    CHECK(oracle_field(1.0, volume, 2.0, 0.0) == 0.0);
    CHECK(oracle_field(1.0, volume, 2.0, -3.0) == 0.0);
  }

  SUBCASE("first radial sign change sits at pi/mu") {
    for (double mu : {1.0, 2.5}) {
      const double t = 0.3 / mu;
      CHECK(oracle_field(mu, volume, 0.99 * kPi / mu, t) > 0.0);
      CHECK(oracle_field(mu, volume, 1.01 * kPi / mu, t) < 0.0);
    }
  }

  SUBCASE("amplitude scales as inverse square root of the volume") {
    const double a = oracle_field(1.5, volume, 0.7, 0.6);
    const double b = oracle_field(1.5, 4.0 * volume, 0.7, 0.6);
    CHECK(a == doctest::Approx(2.0 * b).epsilon(1e-14));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(oracle_field(0.0, volume, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(oracle_field(1.0, 0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(oracle_field(1.0, volume, -1.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("angular shell quadrature") {
  SUBCASE("matches sin(mu r)/(pi r)") {
    for (double mu : {1.0, 3.0}) {
      for (double r : {0.5, 2.0, 4.0}) {
        CHECK(shell_integral(mu, r, 64) ==
              doctest::Approx(std::sin(mu * r) / (kPi * r)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("r = 0 returns the limit mu/pi") {
    CHECK(shell_integral(2.0, 0.0, 16) == doctest::Approx(2.0 / kPi).epsilon(1e-15));
  }

  SUBCASE("converges spectrally in the node count") {
    const double mu = 5.0, r = 3.0;  // mu r = 15, needs real resolution
    const double exact = std::sin(mu * r) / (kPi * r);
    auto err = [&](int n) { return std::abs(shell_integral(mu, r, n) - exact); };
    // under-resolved rules give O(1) error; once n passes ~ mu r the error
    // collapses by orders of magnitude per refinement
    CHECK(err(16) > 1e-2);
    CHECK(err(24) <= 1e-2 * err(16));
    CHECK(err(32) <= 1e-9);
    CHECK(err(64) <= 1e-13);
  }

  SUBCASE("consistent with the closed-form field") {
    const double mu = 2.0, r = 1.3, t = 0.5, volume = 100.0;
    const double via_integral = shell_integral(mu, r, 64) /
                                (2.0 * kPi * std::sqrt(2.0 * volume * mu)) *
                                std::sin(mu * t);
    CHECK(oracle_field(mu, volume, r, t) ==
          doctest::Approx(via_integral).epsilon(1e-12));
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(shell_integral(0.0, 1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(shell_integral(1.0, -1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(shell_integral(1.0, 1.0, 1), std::invalid_argument);
  }
}

TEST_CASE("radial averaging") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const ShellSet shell = shell_modes(*lat, 0.0);
  const GridSpec grid = GridSpec::box_covering(kTwoPi, 24);

  SUBCASE("constant field averages to the constant") {
    std::vector<Complex> vals(grid.point_count(), Complex{3.25, 0.0});
    const FieldSample f(grid, std::move(vals), 1.0);
    const RadialProfile p = radial_average(f, 3.0, 0.25);
    CHECK(p.convention == "raw-binned");
    CHECK(p.time == 1.0);
    REQUIRE(!p.radii.empty());
    for (std::size_t i = 0; i < p.radii.size(); ++i) {
      CHECK(p.values[i] == doctest::Approx(3.25).epsilon(1e-15));
      if (i > 0) CHECK(p.radii[i] > p.radii[i - 1]);
      CHECK(p.radii[i] <= 3.0);
    }
  }

  SUBCASE("bin centers are odd half-multiples of the width") {
    std::vector<Complex> vals(grid.point_count(), Complex{1.0, 0.0});
    const FieldSample f(grid, std::move(vals), 1.0);
    const RadialProfile p = radial_average(f, 2.0, 0.5);
    for (double r : p.radii) {
      const double frac = r / 0.5 - std::floor(r / 0.5);
      CHECK(frac == doctest::Approx(0.5).epsilon(1e-12));
    }
  }

  SUBCASE("window beyond the grid reach rejected") {
    std::vector<Complex> vals(grid.point_count(), Complex{1.0, 0.0});
    const FieldSample f(grid, std::move(vals), 1.0);
    CHECK_THROWS_AS(radial_average(f, 100.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(radial_average(f, 3.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(radial_average(f, -1.0, 0.5), std::invalid_argument);
  }

  SUBCASE("empty window rejected") {
    const GridSpec far{{10.0, 10.0, 10.0}, {1.0, 1.0, 1.0}, {2, 2, 2}};
    const FieldSample f(far, std::vector<Complex>(8, Complex{1.0, 0.0}), 1.0);
    CHECK_THROWS_AS(radial_average(f, 1.0, 0.5), std::invalid_argument);
  }
}

TEST_CASE("profile comparison") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const ShellSet shell = shell_modes(*lat, 0.0);
  const double t = 0.3;
  const FieldSample f =
      reconstruct_field(lat, shell, t, GridSpec::box_covering(kTwoPi, 32));

  SUBCASE("six modes already track the first lobe") {
    // window past pi so the binned profile contains the sign change
    const ProfileComparison c = compare_profiles(f, 1.0, t, 4.0);
    CHECK(c.l2_error < 0.3);
    CHECK(c.first_zero_error < 0.1);
    CHECK(std::isnan(c.amplitude_ratio));
  }

  SUBCASE("amplitude ratio reported only with a volume") {
    const ProfileComparison c = compare_profiles(f, 1.0, t, 4.0, lat->volume());
    CHECK(std::isfinite(c.amplitude_ratio));
    CHECK(c.amplitude_ratio > 0.0);
  }

  SUBCASE("switched-off sample rejected") {
    const FieldSample off =
        reconstruct_field(lat, shell, -1.0, GridSpec::box_covering(kTwoPi, 16));
    CHECK_THROWS_AS(compare_profiles(off, 1.0, -1.0, kPi), std::invalid_argument);
  }

  SUBCASE("ball mismatch in the expected range for the coarsest shell") {
    const double m = field_mismatch(f, 1.0, lat->volume(), 5.0 * kPi);
    CHECK(m > 0.3);
    CHECK(m < 1.0);
  }

  SUBCASE("ball must contain grid points") {
    CHECK_THROWS_AS(field_mismatch(f, 1.0, lat->volume(), 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("profile CSV") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const ShellSet shell = shell_modes(*lat, 0.0);
  const FieldSample f =
      reconstruct_field(lat, shell, 0.5, GridSpec::box_covering(kTwoPi, 16));
  const RadialProfile p = radial_average(f, 3.0, kTwoPi / 16.0);

  std::ostringstream a, b;
  write_profile_csv(a, p, 1.0);
  write_profile_csv(b, p, 1.0);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "r,phi_reconstructed,phi_oracle,abs_diff");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == p.radii.size());
}
