#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hierarchia/hierarchy.hpp"
#include "hierarchia/reproduction.hpp"

using namespace hierarchia;

namespace {

Polynomial sum_of_squares_objective(int n) {
  Polynomial f(n);
  for (int i = 0; i < n; ++i) f += Polynomial::variable(n, i).pow(2);
  return f;
}

EngineSettings quick_settings() {
  EngineSettings s;
  s.k_max = 5;
  return s;
}

}  // namespace

TEST_CASE("norm-squared has a single level at zero") {
  HierarchyProblem p;
  p.mode = HierarchyProblem::Mode::HMin;
  p.f = sum_of_squares_objective(2);
  HierarchyReport rep = full_hierarchy(p, quick_settings());
  REQUIRE(rep.levels.size() == 1);
  CHECK(rep.levels[0].value == doctest::Approx(0.0).epsilon(1e-7));
  REQUIRE(rep.levels[0].points.size() == 1);
  CHECK(rep.levels[0].points[0].point.cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(rep.levels[0].points[0].classification == Classification::StrictLocalMin);
  CHECK(rep.terminal_status == TerminalStatus::ProvedComplete);
}

TEST_CASE("biquartic objective certifies nonexistence") {
  HierarchyProblem p;
  p.mode = HierarchyProblem::Mode::HMin;
  p.f = biquartic_no_minimizer();
  HierarchyReport rep = full_hierarchy(p, quick_settings());
  CHECK(rep.no_minimizers);
  CHECK(rep.nonexistence_order == 3);
  CHECK(rep.levels.empty());
}

TEST_CASE("classification of standard model points") {
  EngineSettings st = quick_settings();
  const int n = 2;
  Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);

  SUBCASE("positive definite quadratic") {
    CHECK(classify(origin, sum_of_squares_objective(n), {}, st) ==
          Classification::StrictLocalMin);
  }
  SUBCASE("negative definite quadratic") {
    CHECK(classify(origin, -1.0 * sum_of_squares_objective(n), {}, st) ==
          Classification::StrictLocalMax);
  }
  SUBCASE("indefinite quadratic") {
    Polynomial f = Polynomial::variable(n, 0).pow(2) - Polynomial::variable(n, 1).pow(2);
    CHECK(classify(origin, f, {}, st) == Classification::Saddle);
  }
  SUBCASE("x^4 degenerate minimum, verified by the ball test") {
    Polynomial f = Polynomial::variable(1, 0).pow(4);
    Eigen::VectorXd o1 = Eigen::VectorXd::Zero(1);
    CHECK(classify(o1, f, {}, st) == Classification::LocalMinVerified);
  }
  SUBCASE("x^3 inflection refuted by the ball test") {
    Polynomial f = Polynomial::variable(1, 0).pow(3);
    Eigen::VectorXd o1 = Eigen::VectorXd::Zero(1);
    CHECK(classify(o1, f, {}, st) == Classification::NotLocalMin);
  }
  SUBCASE("non-stationary points are rejected") {
    Eigen::VectorXd u(2);
    u << 0.5, 0.5;
    CHECK_THROWS_AS(classify(u, sum_of_squares_objective(n), {}, st), std::invalid_argument);
  }
}

TEST_CASE("classify is sign-equivariant on random nondegenerate instances") {
  std::mt19937 rng(555);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  EngineSettings st = quick_settings();
  st.auto_ball = false;
  int done = 0;
  for (int trial = 0; done < 50 && trial < 120; ++trial) {
    const int n = 2 + trial % 2;
    // random quadratic+quartic with a stationary point at a random u
    Eigen::VectorXd u(n);
    for (int i = 0; i < n; ++i) u[i] = coef(rng);
    Polynomial f(n);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const double a = coef(rng);
        Polynomial di = Polynomial::variable(n, i) - Polynomial::constant(n, u[i]);
        Polynomial dj = Polynomial::variable(n, j) - Polynomial::constant(n, u[j]);
        f += a * (di * dj);
      }
    }
    Polynomial shift(n);
    for (int i = 0; i < n; ++i) {
      Polynomial di = Polynomial::variable(n, i) - Polynomial::constant(n, u[i]);
      shift += di * di;
    }
    f += 0.3 * (shift * shift);

    StationaryPoint d1, d2;
    Classification c1, c2;
    try {
      c1 = classify(u, f, {}, st, &d1);
      c2 = classify(u, -1.0 * f, {}, st, &d2);
    } catch (const std::exception&) {
      continue;
    }
    if (c1 == Classification::Degenerate || c2 == Classification::Degenerate) continue;
    ++done;
    if (c1 == Classification::StrictLocalMin) CHECK(c2 == Classification::StrictLocalMax);
    if (c1 == Classification::StrictLocalMax) CHECK(c2 == Classification::StrictLocalMin);
    if (c1 == Classification::Saddle) CHECK(c2 == Classification::Saddle);
  }
  CHECK(done == 50);
}

TEST_CASE("newton polish drives the stationarity residual down") {
  Polynomial f = motzkin_dehomogenized();
  Eigen::VectorXd u(2);
  u << 1.001, 0.9985;
  auto [polished, resid] = polish_stationary(u, f, {}, 5);
  CHECK(resid <= 1e-10);
  CHECK(std::abs(polished[0] - 1.0) <= 1e-6);
  CHECK(std::abs(polished[1] - 1.0) <= 1e-6);
}

TEST_CASE("constrained polish and classification on the sphere") {
  auto [f, h] = motzkin_on_sphere();
  EngineSettings st = quick_settings();
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::VectorXd u(3);
  u << s + 1e-3, s - 1e-3, s;
  auto [polished, resid] = polish_stationary(u, f, {h}, 5);
  CHECK(resid <= 1e-9);
  StationaryPoint sp;
  CHECK(classify(polished, f, {h}, st, &sp) == Classification::StrictLocalMin);
  REQUIRE(sp.multipliers.has_value());

  Eigen::VectorXd top(3);
  top << 0.0, 0.0, 1.0;
  CHECK(classify(top, f, {h}, st) == Classification::StrictLocalMax);

  Eigen::VectorXd mid(3);
  mid << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  CHECK(classify(mid, f, {h}, st) == Classification::StrictLocalMax);
}

TEST_CASE("ball verification on the cubic and quartic model cases") {
  EngineSettings st = quick_settings();
  Eigen::VectorXd o1 = Eigen::VectorXd::Zero(1);
  CHECK(verify_local_min_ball(o1, Polynomial::variable(1, 0).pow(3), {}, st).verdict ==
        BallVerdict::Refuted);
  CHECK(verify_local_min_ball(o1, Polynomial::variable(1, 0).pow(4), {}, st).verdict ==
        BallVerdict::Verified);
  Eigen::VectorXd o2 = Eigen::VectorXd::Zero(2);
  CHECK(verify_local_min_ball(o2, sum_of_squares_objective(2), {}, st).verdict ==
        BallVerdict::Verified);
}

TEST_CASE("Motzkin valley point is a verified local minimizer") {
  Polynomial f = motzkin_dehomogenized();
  EngineSettings st = quick_settings();
  st.value_tol = 1e-3;
  Eigen::VectorXd u(2);
  u << 2.0, 0.0;
  BallOutcome out = verify_local_min_ball(u, f, {}, st);
  CHECK(out.verdict == BallVerdict::Verified);
}

TEST_CASE("next_level walks the Motzkin hierarchy") {
  HierarchyProblem p;
  p.mode = HierarchyProblem::Mode::HMin;
  p.f = motzkin_dehomogenized();
  EngineSettings st = quick_settings();
  st.delta0 = 0.001;
  NextLevelResult nl = next_level(p, 0.0, st.delta0, st);
  REQUIRE(nl.kind == NextLevelResult::Kind::Found);
  CHECK(nl.above.value == doctest::Approx(1.0).epsilon(1e-4));

  NextLevelResult done = next_level(p, nl.above.value, st.delta0, st);
  REQUIRE(done.kind == NextLevelResult::Kind::Complete);
  CHECK(done.completeness.infeasibility_order == 3);
  CHECK(std::abs(done.completeness.below_value - 1.0) <= 1e-4);
  CHECK(done.completeness.certificate_verified);
}

TEST_CASE("solve_level converges flat on the first Motzkin level") {
  HierarchyProblem p;
  p.mode = HierarchyProblem::Mode::HMin;
  p.f = motzkin_dehomogenized();
  LevelOutcome out = solve_level(p, LevelPhase::First, std::nullopt, quick_settings());
  REQUIRE(out.status == LevelStatus::ConvergedFlat);
  CHECK(out.value == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(out.atoms.size() == 4);
  for (const auto& atom : out.atoms) {
    CHECK(std::abs(std::abs(atom[0]) - 1.0) <= 1e-4);
    CHECK(std::abs(std::abs(atom[1]) - 1.0) <= 1e-4);
  }
}
