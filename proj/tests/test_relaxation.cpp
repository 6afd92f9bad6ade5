#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hierarchia/moment.hpp"
#include "hierarchia/relaxation.hpp"
#include "hierarchia/reproduction.hpp"

using namespace hierarchia;

namespace {

// Checks that the moments of a Dirac at a feasible point satisfy the program.
void check_dirac_feasible(const LinearMatrixProgram& p, const RelaxationMeta& meta,
                          const Eigen::VectorXd& u, double tol) {
  Tms y = tms_from_atoms({u}, {1.0}, 2 * meta.order);
  REQUIRE(y.values().size() == p.num_vars);
  for (const auto& row : p.equalities) {
    double v = -row.rhs;
    for (const auto& [j, c] : row.coeffs) v += c * y.values()[j];
    CHECK(std::abs(v) <= tol);
  }
  for (const auto& blk : p.blocks) {
    Eigen::MatrixXd M = blk.evaluate(y.values());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -tol * (1.0 + M.cwiseAbs().maxCoeff()));
  }
  // objective of the Dirac moments is f(u) (after undoing the scaling)
  const double obj = meta.report_value(p.objective.dot(y.values()));
  const double fu = meta.maximize ? meta.objective.evaluate(u) : meta.objective.evaluate(u);
  CHECK(obj == doctest::Approx(fu).epsilon(1e-9));
}

}  // namespace

TEST_CASE("variable count follows the binomial dimension contract") {
  Polynomial f = motzkin_dehomogenized();
  for (int k = 3; k <= 5; ++k) {
    auto [p, meta] = build_hmin_first(f, k);
    CHECK(p.num_vars == static_cast<int>(binomial(2 + 2 * k, 2 * k)));
    CHECK(meta.order == k);
  }
  auto [fs, hs] = motzkin_on_sphere();
  auto [pc, mc] = build_critical_first(fs, {hs}, 3);
  CHECK(pc.num_vars == static_cast<int>(binomial(3 + 6, 6)));
  (void)mc;
}

TEST_CASE("builders are pure: same inputs give identical programs") {
  Polynomial f = motzkin_dehomogenized();
  auto [p1, m1] = build_hmin_above(f, 0.001, 3);
  auto [p2, m2] = build_hmin_above(f, 0.001, 3);
  REQUIRE(p1.num_vars == p2.num_vars);
  CHECK((p1.objective - p2.objective).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(p1.equalities.size() == p2.equalities.size());
  REQUIRE(p1.blocks.size() == p2.blocks.size());
  for (std::size_t b = 0; b < p1.blocks.size(); ++b) {
    CHECK((p1.blocks[b].F0 - p2.blocks[b].F0).cwiseAbs().maxCoeff() == 0.0);
    for (int v = 0; v < p1.num_vars; ++v) {
      REQUIRE(p1.blocks[b].vars[v].size() == p2.blocks[b].vars[v].size());
      for (std::size_t e = 0; e < p1.blocks[b].vars[v].size(); ++e) {
        CHECK(p1.blocks[b].vars[v][e].value == p2.blocks[b].vars[v][e].value);
      }
    }
  }
  (void)m1;
  (void)m2;
}

TEST_CASE("order below the minimum is rejected") {
  Polynomial f = motzkin_dehomogenized();
  CHECK_THROWS_AS(build_hmin_first(f, 2), std::invalid_argument);
  auto [fs, hs] = motzkin_on_sphere();
  CHECK_THROWS_AS(build_critical_first(fs, {hs}, 2), std::invalid_argument);
  CHECK_THROWS_AS(
      build_ball_verification(f, {}, Eigen::VectorXd::Zero(2), 0.0, 3),
      std::invalid_argument);
}

TEST_CASE("H-min relaxation admits the known minimizer moments") {
  Polynomial f = motzkin_dehomogenized();
  auto [p, meta] = build_hmin_first(f, 3);
  Eigen::VectorXd u(2);
  u << 1.0, 1.0;
  check_dirac_feasible(p, meta, u, 1e-9);
}

TEST_CASE("above/below builders localize the bound constraint") {
  Polynomial f = motzkin_dehomogenized();
  Eigen::VectorXd valley(2), minimizer(2);
  valley << 2.0, 0.0;     // f = 1
  minimizer << 1.0, 1.0;  // f = 0

  auto [pa, ma] = build_hmin_above(f, 0.001, 3);
  check_dirac_feasible(pa, ma, valley, 1e-9);
  // minimizer moments violate the above-bound block
  {
    Tms y = tms_from_atoms({minimizer}, {1.0}, 6);
    const auto& blk = pa.blocks.back();
    Eigen::MatrixXd M = blk.evaluate(y.values());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() < -1e-6);
  }

  auto [pb, mb] = build_hmax_below(f, 0.001, 3);
  check_dirac_feasible(pb, mb, minimizer, 1e-9);
  CHECK(mb.maximize);
  // report_value undoes the internal negation
  Tms y = tms_from_atoms({minimizer}, {1.0}, 6);
  CHECK(mb.report_value(pb.objective.dot(y.values())) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("critical relaxation carries h and the minors as equalities") {
  auto [f, h] = motzkin_on_sphere();
  auto [p, meta] = build_critical_first(f, {h}, 3);
  // equalities: normalization + localized rows for h and three minors
  CHECK(meta.equalities.size() == 4);
  CHECK(p.blocks.size() == 1);  // moment matrix only
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::VectorXd u(3);
  u << s, s, s;
  check_dirac_feasible(p, meta, u, 1e-9);
  u << 0.0, 0.0, 1.0;  // maximizer is also a critical point
  check_dirac_feasible(p, meta, u, 1e-9);
}

TEST_CASE("ball verification program pins the neighborhood") {
  Polynomial f = motzkin_dehomogenized();
  Eigen::VectorXd u(2);
  u << 2.0, 0.0;
  auto [p, meta] = build_ball_verification(f, {}, u, 0.1, 3);
  check_dirac_feasible(p, meta, u, 1e-9);
  // a faraway Dirac violates the ball block
  Eigen::VectorXd w(2);
  w << 0.0, 0.0;
  Tms y = tms_from_atoms({w}, {1.0}, 6);
  const auto& blk = p.blocks.back();
  Eigen::MatrixXd M = blk.evaluate(y.values());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() < -1e-6);
}

TEST_CASE("open-set builder adds one localizing block per inequality") {
  Polynomial f = motzkin_dehomogenized();
  std::vector<Polynomial> g = {Polynomial::variable(2, 0), Polynomial::variable(2, 1)};
  auto [p0, m0] = build_hmin_first(f, 3);
  auto [pg, mg] = build_open_set_hmin(f, g, std::nullopt, 3);
  CHECK(pg.blocks.size() == p0.blocks.size() + 2);
  Eigen::VectorXd u(2);
  u << 1.0, 1.0;
  check_dirac_feasible(pg, mg, u, 1e-9);
  // empty g falls back to the plain program shape
  auto [pe, me] = build_open_set_hmin(f, {}, std::nullopt, 3);
  CHECK(pe.blocks.size() == p0.blocks.size());
  (void)m0;
  (void)me;
}

TEST_CASE("closed-set builder uses g-weighted gradient and 2x2 minors") {
  // f = x1 on the unit disk: critical points (+-1, 0)
  const int n = 2;
  Polynomial f = Polynomial::variable(n, 0);
  Polynomial g = Polynomial::constant(n, 1) - Polynomial::variable(n, 0).pow(2) -
                 Polynomial::variable(n, 1).pow(2);
  const int k = min_order_closed_set(f, g);
  auto [p, meta] = build_closed_set_critical(f, g, std::nullopt, k);
  Eigen::VectorXd u(2);
  u << 1.0, 0.0;
  check_dirac_feasible(p, meta, u, 1e-9);
  u << -1.0, 0.0;
  check_dirac_feasible(p, meta, u, 1e-9);
  // interior non-critical point fails an equality row
  Tms y = tms_from_atoms({Eigen::VectorXd::Zero(2)}, {1.0}, 2 * meta.order);
  bool violated = false;
  for (const auto& row : p.equalities) {
    double v = -row.rhs;
    for (const auto& [j, c] : row.coeffs) v += c * y.values()[j];
    if (std::abs(v) > 1e-8) violated = true;
  }
  CHECK(violated);
}

TEST_CASE("monotonicity of bounds in k on a fixed instance") {
  Polynomial f = quintic_three_vars();
  auto [p3, m3] = build_hmin_first(f, 3);
  auto [p4, m4] = build_hmin_first(f, 4);
  SdpSolution s3 = solve(p3);
  SdpSolution s4 = solve(p4);
  if (s3.status == SdpStatus::Optimal && s4.status == SdpStatus::Optimal) {
    CHECK(m3.report_value(s3.objective) <=
          m4.report_value(s4.objective) + 1e-5 * (1.0 + std::abs(s4.objective)));
  }
}
