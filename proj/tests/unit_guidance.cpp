#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "efl/guidance.hpp"
#include "oracles.hpp"

using namespace efl;
using namespace efl::modes;
using namespace efl::guidance;
using efl::wavefunctional::OneQuantumState;
using efl::wavefunctional::ProfileEntry;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

OneQuantumState shell_state(const LatticePtr& lat, double tol = 0.0) {
  const ShellSet shell = shell_modes(*lat, tol);
  return OneQuantumState::standing_wave(lat, shell.members);
}

ModeState equal_shell_modes(const LatticePtr& lat, const OneQuantumState& s,
                            Complex value, double t = 0.0) {
  std::vector<Complex> coeff(lat->size(), Complex{0.0, 0.0});
  for (const ProfileEntry& e : s.profile())
    coeff[lat->index_of(e.mode)] = value;
  return ModeState(lat, coeff, t, RealityPolicy::Allow);
}
}  // namespace

TEST_CASE("shell selection") {
  SUBCASE("unit shell has six members") {
    auto lat = build_lattice(kTwoPi, 1, 1.0);
    const ShellSet shell = shell_modes(*lat, 0.0);
    CHECK(shell.size() == 6);
    CHECK(shell.target == 1.0);
    const auto brute = oracles::integer_sphere(1, 1);
    REQUIRE(brute.size() == shell.size());
    for (const ModeIndex& m : shell.members)
      CHECK(brute.count({m.n1, m.n2, m.n3}) == 1);
  }

  SUBCASE("radius five picks up two integer families") {
    auto lat = build_lattice(kTwoPi, 5, 5.0);
    const ShellSet shell = shell_modes(*lat, 0.0);
    CHECK(shell.size() == 30);  // (5,0,0)-type and (3,4,0)-type
    const auto brute = oracles::integer_sphere(25, 5);
    REQUIRE(brute.size() == 30);
    for (const ModeIndex& m : shell.members)
      CHECK(brute.count({m.n1, m.n2, m.n3}) == 1);
  }

  SUBCASE("half-integer spacing from a larger box") {
    auto lat = build_lattice(2.0 * kTwoPi, 3, 1.5);  // k spacing 1/2
    CHECK(default_shell_tolerance(*lat) == 0.0);
    const ShellSet shell = shell_modes(*lat, 0.0);
    CHECK(shell.size() == 30);  // |n| = 3: (3,0,0) and (2,2,1) families
  }

  SUBCASE("closed under negation and lexicographically ordered") {
    auto lat = build_lattice(kTwoPi, 5, 5.0);
    const ShellSet shell = shell_modes(*lat, 0.0);
    for (std::size_t i = 1; i < shell.members.size(); ++i)
      CHECK(shell.members[i - 1] < shell.members[i]);
    for (const ModeIndex& m : shell.members) {
      const ModeIndex neg = m.negated();
      CHECK(std::count(shell.members.begin(), shell.members.end(), neg) == 1);
    }
  }

  SUBCASE("default tolerance") {
    auto on_lattice = build_lattice(kTwoPi, 2, 2.0);
    CHECK(default_shell_tolerance(*on_lattice) == 0.0);
    auto off_lattice = build_lattice(kTwoPi, 2, 1.3);
    CHECK(default_shell_tolerance(*off_lattice) ==
          doctest::Approx(0.5).epsilon(1e-15));
    // the half-spacing window spans |k| in [0.8, 1.8]
    const ShellSet shell = shell_modes(*off_lattice, 0.5);
    CHECK(shell.size() == 26);  // |n|^2 = 1 (6), 2 (12) and 3 (8)
  }

  SUBCASE("no matching mode raises") {
    auto lat = build_lattice(kTwoPi, 2, 0.5);
    CHECK_THROWS_AS(shell_modes(*lat, 0.1), EmptyShellError);
    CHECK_THROWS_AS(shell_modes(*lat, -1.0), std::invalid_argument);
  }
}

TEST_CASE("analytic mode solution") {
  SUBCASE("amplitude is 1/sqrt(2 omega)") {
    CHECK(std::abs(analytic_mode_solution(1.0, 0.0) -
                   Complex{1.0 / std::sqrt(2.0), 0.0}) <= 1e-15);
    CHECK(std::abs(analytic_mode_solution(8.0, 0.0)) ==
          doctest::Approx(0.25).epsilon(1e-15));
  }

  SUBCASE("satisfies dq/dt = 1/(2i q*) exactly") {
    for (double w : {0.5, 1.0, 3.0}) {
      for (double t : {0.0, 0.3, 2.1}) {
        const Complex q = analytic_mode_solution(w, t);
        const Complex flow = Complex{0.0, -0.5} / std::conj(q);
        const Complex deriv = Complex{0.0, -w} * q;
        CHECK(std::abs(flow - deriv) <= 1e-14);
      }
    }
  }

  SUBCASE("central difference confirms the rotation rate") {
    const double w = 2.0, t = 0.7, h = 1e-6;
    const Complex fd = (analytic_mode_solution(w, t + h) -
                        analytic_mode_solution(w, t - h)) /
                       (2.0 * h);
    const Complex exact = Complex{0.0, -w} * analytic_mode_solution(w, t);
    CHECK(std::abs(fd - exact) <= 1e-9);
  }

  SUBCASE("nonpositive frequency rejected") {
    CHECK_THROWS_AS(analytic_mode_solution(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(analytic_mode_solution(-2.0, 1.0), std::invalid_argument);
  }
}

TEST_CASE("guidance right-hand side") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);

  SUBCASE("collective reading moves each support mode by 1/(2i q*)") {
    const OneQuantumState s = shell_state(lat);
    const Complex qv{0.5, 0.0};
    const ModeState q = equal_shell_modes(lat, s, qv);
    const auto rhs = guidance_rhs(s, q, 0.0);
    const Complex expected{0.0, -1.0};  // 1/(2i * 0.5)
    for (const ProfileEntry& e : s.profile())
      CHECK(std::abs(rhs[lat->index_of(e.mode)] - expected) <= 1e-15);
    CHECK(std::abs(rhs[lat->index_of(ModeIndex{0, 0, 0})]) == 0.0);
  }

  SUBCASE("exact-profile reading divides by the full shell sum") {
    const OneQuantumState s = shell_state(lat);
    const ModeState q = equal_shell_modes(lat, s, Complex{0.5, 0.0});
    const auto rhs = guidance_rhs(s, q, 0.0, GradientReading::ExactProfile);
    const Complex expected = Complex{0.0, -1.0} / 6.0;
    for (const ProfileEntry& e : s.profile())
      CHECK(std::abs(rhs[lat->index_of(e.mode)] - expected) <= 1e-15);
  }
}

TEST_CASE("guidance integration") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const OneQuantumState s = shell_state(lat);
  const Complex q0v = analytic_mode_solution(1.0, 0.0);  // 1/sqrt(2)

  SUBCASE("standing-wave benchmark runs at unit frequency") {
    const ModeState q0 = equal_shell_modes(lat, s, q0v);
    const TrajectoryRecord rec = integrate_modes(s, q0, 0.0, 10.0, 1e-3);

    REQUIRE(rec.times.size() == 10001);
    CHECK(rec.times.back() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(rec.reality_drift.front() == 0.0);

    const Complex expected = analytic_mode_solution(1.0, 10.0);
    for (const ProfileEntry& e : s.profile()) {
      const Complex qf = rec.final().at(e.mode);
      CHECK(std::abs(qf - expected) <= 1e-8);
      CHECK(std::abs(std::abs(qf) - 1.0 / std::sqrt(2.0)) <= 1e-9);
    }

    // the equal-coordinate configuration is complex away from t = 0, so the
    // reality constraint is genuinely violated and must not be projected away
    const double drift_final = rec.reality_drift.back();
    CHECK(drift_final ==
          doctest::Approx(std::sqrt(2.0) * std::abs(std::sin(10.0))).epsilon(1e-6));

    // unwrapped phase grows linearly at (1 - sqrt(2)) per unit time: the
    // collective term advances at the flow rate while the explicit shell term
    // runs at the lattice dispersion sqrt(2)
    REQUIRE(rec.phase.size() == rec.times.size());
    CHECK(rec.phase.front() == doctest::Approx(0.0));
    CHECK(rec.phase.back() ==
          doctest::Approx((1.0 - std::sqrt(2.0)) * 10.0).epsilon(1e-6));
    CHECK(rec.unwrap_count >= 1);
  }

  SUBCASE("support modes stay exactly equal to each other") {
    const ModeState q0 = equal_shell_modes(lat, s, q0v);
    const TrajectoryRecord rec = integrate_modes(s, q0, 0.0, 2.0, 1e-3);
    const Complex ref = rec.final().at(s.profile()[0].mode);
    for (const ProfileEntry& e : s.profile()) {
      const Complex q = rec.final().at(e.mode);
      CHECK(q.real() == ref.real());
      CHECK(q.imag() == ref.imag());
    }
  }

  SUBCASE("classic fourth-order convergence") {
    const ModeState q0 = equal_shell_modes(lat, s, q0v);
    const Complex exact = analytic_mode_solution(1.0, 2.0);
    std::vector<double> errors;
    for (double dt : {0.04, 0.02, 0.01}) {
      const TrajectoryRecord rec = integrate_modes(s, q0, 0.0, 2.0, dt);
      double err = 0.0;
      for (const ProfileEntry& e : s.profile())
        err = std::max(err, std::abs(rec.final().at(e.mode) - exact));
      errors.push_back(err);
    }
    for (std::size_t i = 1; i < errors.size(); ++i) {
      const double order = std::log2(errors[i - 1] / errors[i]);
      CHECK(order >= 3.7);
      CHECK(order <= 4.3);
    }
  }

  SUBCASE("exact-profile reading slows the phase by the shell multiplicity") {
    const ModeState q0 = equal_shell_modes(lat, s, q0v);
    const TrajectoryRecord rec =
        integrate_modes(s, q0, 0.0, 3.0, 1e-3, GradientReading::ExactProfile);
    const Complex expected =
        std::polar(1.0 / std::sqrt(2.0), -3.0 / 6.0);  // omega / |M|
    for (const ProfileEntry& e : s.profile())
      CHECK(std::abs(rec.final().at(e.mode) - expected) <= 1e-8);
  }

  SUBCASE("exact-profile flow conserves the shell sum magnitude") {
    std::mt19937 rng(99);
    const ModeState q0 = oracles::random_free_state(lat, rng);
    auto shell_sum = [&](const ModeState& q) {
      Complex b{0.0, 0.0};
      for (const ProfileEntry& e : s.profile())
        b += e.f * std::conj(q.at(e.mode));
      return std::abs(b);
    };
    const TrajectoryRecord rec =
        integrate_modes(s, q0, 0.0, 2.0, 1e-3, GradientReading::ExactProfile);
    CHECK(shell_sum(rec.final()) ==
          doctest::Approx(shell_sum(q0)).epsilon(1e-8));
  }

  SUBCASE("parameter validation") {
    const ModeState q0 = equal_shell_modes(lat, s, q0v);
    CHECK_THROWS_AS(integrate_modes(s, q0, 0.0, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(integrate_modes(s, q0, 1.0, 1.0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(integrate_modes(s, q0, 2.0, 1.0, 1e-3), std::invalid_argument);
    // stability bound: 0.1 / dispersion(1,1,1) = 0.1 / 2 = 0.05
    CHECK_THROWS_AS(integrate_modes(s, q0, 0.0, 1.0, 0.06), std::invalid_argument);
    CHECK_NOTHROW(integrate_modes(s, q0, 0.0, 0.1, 0.045));
    auto other = build_lattice(kTwoPi, 2, 1.0);
    CHECK_THROWS_AS(integrate_modes(s, ModeState::zero(other), 0.0, 1.0, 1e-3),
                    std::invalid_argument);
  }

  SUBCASE("starting on a node halts immediately") {
    const OneQuantumState pair(
        lat, {{ModeIndex{-1, 0, 0}, Complex{1.0, 0.0}},
              {ModeIndex{1, 0, 0}, Complex{1.0, 0.0}}});
    std::vector<Complex> coeff(lat->size(), Complex{0.0, 0.0});
    coeff[lat->index_of(ModeIndex{1, 0, 0})] = Complex{0.5, 0.0};
    coeff[lat->index_of(ModeIndex{-1, 0, 0})] = Complex{-0.5, 0.0};
    const ModeState q0(lat, coeff, 0.0, RealityPolicy::Allow);
    CHECK_THROWS_AS(integrate_modes(pair, q0, 0.0, 1.0, 1e-3), NodeError);
  }
}

TEST_CASE("trajectory CSV") {
  auto lat = build_lattice(kTwoPi, 1, 1.0);
  const OneQuantumState s = shell_state(lat);
  const ModeState q0 = equal_shell_modes(lat, s, analytic_mode_solution(1.0, 0.0));
  const TrajectoryRecord rec = integrate_modes(s, q0, 0.0, 0.01, 1e-3);
  const std::vector<ModeIndex> cols{ModeIndex{1, 0, 0}, ModeIndex{-1, 0, 0}};

  std::ostringstream a, b;
  write_trajectory_csv(a, rec, cols);
  write_trajectory_csv(b, rec, cols);

  SUBCASE("byte deterministic") { CHECK(a.str() == b.str()); }

  SUBCASE("header names the requested modes") {
    std::istringstream in(a.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,re_q_1_0_0,im_q_1_0_0,re_q_-1_0_0,im_q_-1_0_0,reality_drift");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == rec.times.size());
  }

  SUBCASE("first row is the initial condition") {
    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);  // header
    std::getline(in, line);
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == 0.0);
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  }
}
