#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hierarchia/extraction.hpp"
#include "hierarchia/hierarchy.hpp"
#include "hierarchia/reproduction.hpp"

using namespace hierarchia;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("Dirac tms extracts a single atom") {
  Eigen::VectorXd u = vec2(1.0, -1.0);
  Tms y = tms_from_atoms({u}, {1.0}, 4);
  AtomicRepresentation rep = extract_atoms(y, 2, 1e-8);
  REQUIRE(rep.ok);
  REQUIRE(rep.atoms.size() == 1);
  CHECK((rep.atoms[0] - u).cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(rep.weights[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(rep.moment_residual <= 1e-9);
}

TEST_CASE("two symmetric atoms with equal weights") {
  Tms y = tms_from_atoms({vec2(0, 0), vec2(1, 1)}, {0.5, 0.5}, 6);
  AtomicRepresentation rep = extract_atoms(y, 2, 1e-8);
  REQUIRE(rep.ok);
  REQUIRE(rep.atoms.size() == 2);
  for (const auto& w : rep.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-7));
}

TEST_CASE("Dirac tms is flat at every truncation order") {
  Eigen::VectorXd u = vec2(0.3, 0.4);
  Tms z = tms_from_atoms({u}, {1.0}, 10);
  ConstraintDescriptor none;
  auto res = flat_truncation_search(z, none, 1e-8);
  REQUIRE(res.has_value());
  CHECK(res->first == 1);
  CHECK(res->second.inner_rank == 1);
  CHECK(res->second.outer_rank == 1);
}

TEST_CASE("flat truncation of a constructed two-atom sequence") {
  auto [f, h] = motzkin_on_sphere();
  const double s = 1.0 / std::sqrt(3.0);
  Eigen::VectorXd u(3), w(3);
  u << s, s, s;
  w << 0, 0, 1;
  Tms z = tms_from_atoms({u, w}, {0.5, 0.5}, 8);
  ConstraintDescriptor cons;
  cons.equalities = {h};
  auto res = flat_truncation_search(z, cons, 1e-7);
  REQUIRE(res.has_value());
  CHECK(res->second.outer_rank == 2);
}

TEST_CASE("dense gaussian-type moments admit no flat truncation") {
  Tms z(1, 8);
  const double m[9] = {1, 0, 1, 0, 3, 0, 15, 0, 105};
  for (int i = 0; i <= 8; ++i) z.values()[i] = m[i];
  ConstraintDescriptor none;
  CHECK_FALSE(flat_truncation_search(z, none, 1e-9).has_value());
}

TEST_CASE("atomic round trip recovers well-separated atoms") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pos(-1.0, 1.0);
  std::uniform_real_distribution<double> wgt(0.1, 1.0);
  int done = 0;
  for (int trial = 0; done < 100 && trial < 400; ++trial) {
    const int n = 2;
    const int r = 1 + trial % 3;
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> ws;
    for (int j = 0; j < r; ++j) {
      Eigen::VectorXd u(n);
      u << pos(rng), pos(rng);
      pts.push_back(u);
      ws.push_back(wgt(rng));
    }
    bool separated = true;
    for (int a = 0; a < r; ++a) {
      for (int b = a + 1; b < r; ++b) {
        if ((pts[a] - pts[b]).cwiseAbs().maxCoeff() < 1e-1) separated = false;
      }
    }
    if (!separated) continue;
    ++done;
    const int degree = 2 * r + 2;
    Tms y = tms_from_atoms(pts, ws, degree);
    AtomicRepresentation rep = extract_atoms(y, degree / 2, 1e-8);
    REQUIRE(rep.ok);
    REQUIRE(static_cast<int>(rep.atoms.size()) == r);
    for (int a = 0; a < r; ++a) {
      double best = 1e9;
      double bw = 0;
      for (std::size_t b = 0; b < rep.atoms.size(); ++b) {
        const double d = (rep.atoms[b] - pts[a]).cwiseAbs().maxCoeff();
        if (d < best) {
          best = d;
          bw = rep.weights[b];
        }
      }
      CHECK(best <= 1e-6);
      CHECK(std::abs(bw - ws[a]) <= 1e-6);
    }
  }
  CHECK(done == 100);
}

TEST_CASE("weights sum to the total mass") {
  std::vector<Eigen::VectorXd> pts = {vec2(0.8, -0.5), vec2(-0.4, 0.1)};
  Tms y = tms_from_atoms(pts, {0.3, 0.7}, 6);
  AtomicRepresentation rep = extract_atoms(y, 3, 1e-8);
  REQUIRE(rep.ok);
  double total = 0.0;
  for (double w : rep.weights) total += w;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep.source_rank == static_cast<int>(rep.atoms.size()));
}

TEST_CASE("solved Motzkin relaxation extracts the four minimizers") {
  // Full engine path: the raw interior-point solution spreads mass along the
  // non-compact critical lines, so the level search re-solves with a trace
  // penalty before extraction.
  HierarchyProblem problem;
  problem.mode = HierarchyProblem::Mode::HMin;
  problem.f = motzkin_dehomogenized();
  EngineSettings st;
  st.k_max = 5;
  LevelOutcome out = solve_level(problem, LevelPhase::First, std::nullopt, st);
  REQUIRE(out.status == LevelStatus::ConvergedFlat);
  REQUIRE(out.flatness.has_value());
  CHECK(out.flatness->inner_rank == out.flatness->outer_rank);
  CHECK(out.atoms.size() == 4);
  for (const auto& atom : out.atoms) {
    CHECK(std::abs(std::abs(atom[0]) - 1.0) <= 1e-3);
    CHECK(std::abs(std::abs(atom[1]) - 1.0) <= 1e-3);
  }
}
