#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hierarchia/certificate.hpp"
#include "hierarchia/relaxation.hpp"
#include "hierarchia/reproduction.hpp"

using namespace hierarchia;

namespace {

// min y1 s.t. [[1, y1], [y1, 1]] >= 0  -> optimum -1
LinearMatrixProgram boundary_program() {
  LinearMatrixProgram p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Ones(1);
  LmiBlock blk;
  blk.size = 2;
  blk.F0 = Eigen::MatrixXd::Identity(2, 2);
  blk.vars.resize(1);
  blk.vars[0].push_back({0, 1, 1.0});
  p.blocks.push_back(blk);
  return p;
}

}  // namespace

TEST_CASE("2x2 boundary program solves to -1") {
  SdpSolution s = solve(boundary_program());
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(s.y[0] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("trivial normalized moment feasibility program") {
  // min 0 s.t. <1,y> = 1, M_1(y) >= 0 in one variable
  auto [prog, meta] = build_critical_first(Polynomial::zero(1), {}, 1);
  (void)meta;
  SdpSolution s = solve(prog);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(std::abs(s.objective) <= 1e-7);
  CHECK(s.y[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("equality presolve reduces and reconstructs") {
  LinearMatrixProgram p = boundary_program();
  // pin y1 = 0.25 through an equality; optimum is then 0.25
  EqualityRow row;
  row.coeffs.emplace_back(0, 2.0);
  row.rhs = 0.5;
  p.equalities.push_back(row);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.y[0] == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("infeasible diagonal program yields a verified certificate") {
  // y >= 1 and -y >= 0 simultaneously: infeasible
  LinearMatrixProgram p;
  p.num_vars = 1;
  p.objective = Eigen::VectorXd::Zero(1);
  LmiBlock a;
  a.size = 1;
  a.F0 = -Eigen::MatrixXd::Ones(1, 1);
  a.vars.resize(1);
  a.vars[0].push_back({0, 0, 1.0});
  LmiBlock b;
  b.size = 1;
  b.F0 = Eigen::MatrixXd::Zero(1, 1);
  b.vars.resize(1);
  b.vars[0].push_back({0, 0, -1.0});
  p.blocks.push_back(a);
  p.blocks.push_back(b);
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::PrimalInfeasible);
  REQUIRE(s.infeasibility_certificate.has_value());
  CHECK(verify_infeasibility_certificate(p, *s.infeasibility_certificate, 1e-6));
}

TEST_CASE("unbounded program reports a ray") {
  // min y s.t. [[1, 0], [0, 1+y]] >= 0 is unbounded below in y? no: y >= -1.
  // use min -y s.t. y >= 0 encoded as a 1x1 block
  LinearMatrixProgram p;
  p.num_vars = 1;
  p.objective = -Eigen::VectorXd::Ones(1);
  LmiBlock blk;
  blk.size = 1;
  blk.F0 = Eigen::MatrixXd::Zero(1, 1);
  blk.vars.resize(1);
  blk.vars[0].push_back({0, 0, 1.0});
  p.blocks.push_back(blk);
  SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::DualUnbounded);
  REQUIRE(s.unbounded_ray.has_value());
  CHECK((*s.unbounded_ray)[0] > 0.0);
}

TEST_CASE("weak duality and k-monotonicity on random coercive objectives") {
  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  int done = 0;
  for (int trial = 0; done < 50 && trial < 200; ++trial) {
    const int n = 2;
    MonomialBasis cubic(n, 3);
    Polynomial f(n);
    for (int i = 0; i < cubic.size(); ++i) f.add_term(cubic[i], coef(rng));
    // coercive quartic tail guarantees H-minimizers exist
    f += (Polynomial::variable(n, 0).pow(2) + Polynomial::variable(n, 1).pow(2)).pow(2);
    const int k0 = min_order_hmin(f);
    auto [p1, m1] = build_hmin_first(f, k0);
    auto [p2, m2] = build_hmin_first(f, k0 + 1);
    SolverSettings st;
    SdpSolution s1 = solve(p1, st);
    SdpSolution s2 = solve(p2, st);
    if (s1.status != SdpStatus::Optimal || s2.status != SdpStatus::Optimal) continue;
    ++done;
    const double v1 = m1.report_value(s1.objective);
    const double v2 = m2.report_value(s2.objective);
    // lower bounds tighten with k
    CHECK(v1 <= v2 + 1e-6 * (1.0 + std::abs(v2)));
    // weak duality against the dual certificate bound
    CertificateReport cert = certify_dual(p1, s1, m1);
    CHECK(cert.gamma <= v1 + 1e-5 * (1.0 + std::abs(v1)));
  }
  CHECK(done == 50);
}

TEST_CASE("solver determinism across runs") {
  Polynomial f = motzkin_dehomogenized();
  auto [p, meta] = build_hmin_first(f, 5);
  SolverSettings st;
  st.feas_tol = 1e-7;
  st.gap_tol = 1e-7;
  SdpSolution a = solve(p, st);
  SdpSolution b = solve(p, st);
  REQUIRE(a.status == b.status);
  CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("optimal status implies recorded residual bounds") {
  Polynomial f = motzkin_dehomogenized();
  auto [p, meta] = build_hmin_first(f, 5);
  SolverSettings st;
  st.feas_tol = 1e-7;
  st.gap_tol = 1e-7;
  SdpSolution s = solve(p, st);
  if (s.status == SdpStatus::Optimal) {
    CHECK(s.primal_residual <= st.feas_tol);
    CHECK(s.dual_residual <= st.feas_tol);
    // every block evaluates to a near-PSD matrix at the solution
    for (const auto& blk : p.blocks) {
      Eigen::MatrixXd M = blk.evaluate(s.y);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >=
            -1e-6 * (1.0 + blk.F0.cwiseAbs().maxCoeff() + M.cwiseAbs().maxCoeff()));
    }
    // equality rows hold
    for (const auto& row : p.equalities) {
      double v = -row.rhs;
      for (const auto& [j, c] : row.coeffs) v += c * s.y[j];
      CHECK(std::abs(v) <= 1e-6);
    }
  }
}

TEST_CASE("biquartic first relaxation is infeasible at k = 3") {
  Polynomial f = biquartic_no_minimizer();
  auto [p2, m2] = build_hmin_first(f, 2);
  auto [p3, m3] = build_hmin_first(f, 3);
  SdpSolution s3 = solve(p3);
  CHECK(s3.status == SdpStatus::PrimalInfeasible);
  REQUIRE(s3.infeasibility_certificate.has_value());
  CHECK(verify_infeasibility_certificate(p3, *s3.infeasibility_certificate, 1e-5));
  (void)p2;
  (void)m2;
  (void)m3;
}

TEST_CASE("Motzkin first relaxation solves to 0 with a usable Gram certificate") {
  Polynomial f = motzkin_dehomogenized();
  auto [p, meta] = build_hmin_first(f, 5);
  SolverSettings st;
  st.feas_tol = 1e-7;
  st.gap_tol = 1e-7;
  SdpSolution s = solve(p, st);
  REQUIRE((s.status == SdpStatus::Optimal || s.status == SdpStatus::MaxIterations));
  const double value = meta.report_value(s.objective);
  CHECK(value == doctest::Approx(0.0).epsilon(1e-5));
  if (s.status == SdpStatus::Optimal) {
    CertificateReport cert = certify_dual(p, s, meta);
    CHECK(cert.residual_rel <= 1e-6);
    CHECK(std::abs(cert.gamma - value) <= 1e-5);
  }
}

TEST_CASE("perturbed dual blocks are flagged as a non-certificate") {
  Polynomial f = motzkin_dehomogenized();
  auto [p, meta] = build_hmin_first(f, 5);
  SolverSettings st;
  st.feas_tol = 1e-7;
  st.gap_tol = 1e-7;
  SdpSolution s = solve(p, st);
  if (s.status != SdpStatus::Optimal) return;
  s.dual_blocks[0].diagonal().array() += 0.37;
  CertificateReport cert = certify_dual(p, s, meta);
  CHECK(cert.residual_rel > 1e-4);
  CHECK_FALSE(cert.ok);
}
