#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hierarchia/moment.hpp"
#include "hierarchia/reproduction.hpp"

using namespace hierarchia;

namespace {

Polynomial random_poly(int n, int d, std::mt19937& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  MonomialBasis b(n, d);
  Polynomial p(n);
  for (int i = 0; i < b.size(); ++i) p.add_term(b[i], coef(rng));
  return p;
}

Tms random_tms(int n, int d, std::mt19937& rng) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  Tms y(n, d);
  for (int i = 0; i < y.values().size(); ++i) y.values()[i] = val(rng);
  return y;
}

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_CASE("riesz functional point evaluations") {
  // Dirac at (1,2): <x1+x2, y> = 3
  Tms y = tms_from_atoms({vec2(1, 2)}, {1.0}, 2);
  Polynomial p = Polynomial::variable(2, 0) + Polynomial::variable(2, 1);
  CHECK(riesz(y, p) == doctest::Approx(3.0));
  CHECK(riesz(y, Polynomial::constant(2, 1)) == doctest::Approx(1.0));

  // one-dimensional (1/2) delta_0 + (1/2) delta_2: <x^2, y> = 2
  Eigen::VectorXd a(1), b(1);
  a << 0.0;
  b << 2.0;
  Tms y1 = tms_from_atoms({a, b}, {0.5, 0.5}, 2);
  CHECK(riesz(y1, Polynomial::variable(1, 0).pow(2)) == doctest::Approx(2.0));
}

TEST_CASE("riesz rejects degree overflow") {
  Tms y(2, 2);
  CHECK_THROWS_AS(riesz(y, Polynomial::variable(2, 0).pow(3)), std::invalid_argument);
}

TEST_CASE("moment matrix of a Dirac is rank one and PSD") {
  Eigen::VectorXd u(2);
  u << 0.7, -1.3;
  Tms y = tms_from_atoms({u}, {1.0}, 6);
  Eigen::MatrixXd M = moment_matrix(y, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  CHECK(numeric_rank(M, 1e-8).rank == 1);
}

TEST_CASE("two-atom moment matrix has rank two") {
  Tms y = tms_from_atoms({vec2(0, 0), vec2(1, 1)}, {0.5, 0.5}, 2);
  Eigen::MatrixXd M = moment_matrix(y, 1);
  Eigen::MatrixXd want(3, 3);
  want << 1.0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5;
  CHECK(M.isApprox(want, 1e-12));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  CHECK(numeric_rank(M, 1e-8).rank == 2);
}

TEST_CASE("zero tms gives the zero moment matrix") {
  Tms y(2, 4);
  CHECK(moment_matrix(y, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("localizing matrix with q = 1 is the moment matrix") {
  std::mt19937 rng(5);
  Tms y = random_tms(2, 4, rng);
  Eigen::MatrixXd L = localizing_matrix(y, Polynomial::constant(2, 1.0), 2);
  CHECK(L.isApprox(moment_matrix(y, 2), 1e-14));
}

TEST_CASE("localizing matrix of a Dirac scales with q(u)") {
  Eigen::VectorXd u = vec2(0.4, 0.9);
  Tms y = tms_from_atoms({u}, {1.0}, 6);
  Polynomial q = Polynomial::variable(2, 0).pow(2) - Polynomial::variable(2, 1);
  Eigen::MatrixXd L = localizing_matrix(y, q, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
  const double qu = q.evaluate(u);
  if (qu >= 0) {
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  } else {
    CHECK(es.eigenvalues().minCoeff() < 0);
  }
  CHECK(numeric_rank(L, 1e-8).rank <= 1);
}

TEST_CASE("bilinear identity of the localizing matrix") {
  // vec(p1)' L_q(y) vec(p2) = <q p1 p2, y> on 200 random instances
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 2;
    const int k = 3;
    Tms y = random_tms(n, 2 * k, rng);
    Polynomial q = random_poly(n, 2, rng);
    const int sub = k - 1;  // ceil(2/2)
    MonomialBasis pb(n, sub);
    Polynomial p1 = random_poly(n, sub, rng);
    Polynomial p2 = random_poly(n, sub, rng);
    Eigen::VectorXd v1 = Eigen::VectorXd::Zero(pb.size());
    Eigen::VectorXd v2 = Eigen::VectorXd::Zero(pb.size());
    for (const auto& [a, c] : p1.terms()) v1[pb.index_of(a)] = c;
    for (const auto& [a, c] : p2.terms()) v2[pb.index_of(a)] = c;
    Eigen::MatrixXd L = localizing_matrix(y, q, k);
    const double lhs = v1.dot(L * v2);
    const double rhs = riesz(y, q * p1 * p2);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("block localizing matrix of the identity is block diagonal moments") {
  std::mt19937 rng(17);
  Tms y = random_tms(2, 4, rng);
  SymmetricMatrixPolynomial H(2, 2);
  H.set(0, 0, Polynomial::constant(2, 1));
  H.set(1, 1, Polynomial::constant(2, 1));
  Eigen::MatrixXd L = block_localizing_matrix(y, H, 2);
  // d_H = 1 for constant H, so blocks are M_{k-1}(y)
  Eigen::MatrixXd M = moment_matrix(y, 1);
  const int s = static_cast<int>(M.rows());
  CHECK(L.rows() == 2 * s);
  CHECK(L.topLeftCorner(s, s).isApprox(M, 1e-14));
  CHECK(L.bottomRightCorner(s, s).isApprox(M, 1e-14));
  CHECK(L.topRightCorner(s, s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("block localizing matrix of a Dirac is PSD iff H(u) is PSD") {
  auto check_point = [](double a, double b, bool want_psd) {
    Eigen::VectorXd u = vec2(a, b);
    Tms y = tms_from_atoms({u}, {1.0}, 8);
    Polynomial f = motzkin_dehomogenized();
    SymmetricMatrixPolynomial H = hessian(f);
    Eigen::MatrixXd L = block_localizing_matrix(y, H, 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eh(H.evaluate(u));
    const bool hu_psd = eh.eigenvalues().minCoeff() >= -1e-10;
    CHECK(hu_psd == want_psd);
    if (want_psd) {
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    } else {
      CHECK(es.eigenvalues().minCoeff() < -1e-8);
    }
  };
  check_point(1.0, 1.0, true);    // Hessian PD at the minimizer
  check_point(0.5, 0.5, false);   // Hessian indefinite inside the valley
}

TEST_CASE("xi-compression identity for the block localizing matrix") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2;
    const int ell = 2;
    const int k = 3;
    Tms y = random_tms(n, 2 * k, rng);
    SymmetricMatrixPolynomial H(n, ell);
    for (int i = 0; i < ell; ++i) {
      for (int j = i; j < ell; ++j) H.set(i, j, random_poly(n, 2, rng));
    }
    Eigen::VectorXd xi(ell);
    xi << val(rng), val(rng);
    Eigen::MatrixXd L = block_localizing_matrix(y, H, k);
    const int s = static_cast<int>(L.rows()) / ell;
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(ell * s, s);
    for (int i = 0; i < ell; ++i) {
      kron.block(i * s, 0, s, s) = xi[i] * Eigen::MatrixXd::Identity(s, s);
    }
    Eigen::MatrixXd lhs = kron.transpose() * L * kron;
    Polynomial xHx(n);
    for (int i = 0; i < ell; ++i) {
      for (int j = 0; j < ell; ++j) xHx += xi[i] * xi[j] * H.at(i, j);
    }
    // same row basis: d_H = 1 here since entries have degree 2
    Eigen::MatrixXd rhs = localizing_matrix(y, xHx, k);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("tms_from_atoms basics and symmetry") {
  Eigen::VectorXd u = vec2(1, 1), w = vec2(-1, -1);
  Tms y = tms_from_atoms({u, w}, {0.5, 0.5}, 2);
  CHECK(y.at(Exponent{0, 0}) == doctest::Approx(1.0));
  CHECK(y.at(Exponent{1, 0}) == doctest::Approx(0.0));
  CHECK(y.at(Exponent{0, 1}) == doctest::Approx(0.0));
  CHECK(y.at(Exponent{1, 1}) == doctest::Approx(1.0));
  CHECK(y.at(Exponent{2, 0}) == doctest::Approx(1.0));
}

TEST_CASE("moment matrix rank equals atom count at high enough order") {
  std::vector<Eigen::VectorXd> pts = {vec2(0.3, -0.2), vec2(-0.8, 0.5), vec2(0.9, 0.9)};
  Tms y = tms_from_atoms(pts, {0.2, 0.5, 0.3}, 8);
  CHECK(numeric_rank(moment_matrix(y, 4), 1e-9).rank == 3);
}

TEST_CASE("feasible atomic measures satisfy all localized conditions") {
  // atoms inside {h = 0, g >= 0, H >= 0} give PSD/zero localized matrices
  std::mt19937 rng(29);
  auto [f, h] = motzkin_on_sphere();
  SymmetricMatrixPolynomial H = hessian(f);
  Eigen::VectorXd u(3);
  const double s = 1.0 / std::sqrt(3.0);
  u << s, s, s;
  Tms y = tms_from_atoms({u}, {1.0}, 10);
  const int k = 4;
  Eigen::MatrixXd M = moment_matrix(y, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esM(M);
  const double scaleM = std::max(1.0, M.cwiseAbs().maxCoeff());
  CHECK(esM.eigenvalues().minCoeff() >= -1e-9 * scaleM);
  Eigen::MatrixXd Lh = localizing_matrix(y, h, k);
  CHECK(Lh.cwiseAbs().maxCoeff() <= 1e-9);
  Eigen::MatrixXd LH = block_localizing_matrix(y, H, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esH(LH);
  CHECK(esH.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, LH.cwiseAbs().maxCoeff()));
  (void)rng;
}

TEST_CASE("truncation keeps the leading principal moment structure") {
  std::mt19937 rng(31);
  Tms z = random_tms(2, 8, rng);
  Tms y = z.truncate(4);
  Eigen::MatrixXd My = moment_matrix(y, 2);
  Eigen::MatrixXd Mz = moment_matrix(z, 4);
  CHECK(My.isApprox(Mz.topLeftCorner(My.rows(), My.cols()), 1e-14));
}

TEST_CASE("flatness of constructed atomic instances") {
  auto [f, h] = motzkin_on_sphere();
  Eigen::VectorXd u(3);
  const double s = 1.0 / std::sqrt(3.0);
  u << s, s, s;
  Eigen::VectorXd w(3);
  w << 1.0, 0.0, 0.0;
  Tms y = tms_from_atoms({u, w}, {0.6, 0.4}, 8);
  FlatnessReport rep = check_flatness(y, {h}, {}, std::nullopt, 1e-7);
  CHECK(rep.is_flat);
  CHECK(rep.inner_rank == 2);
  CHECK(rep.outer_rank == 2);
  CHECK(rep.d_star == 1);
}

TEST_CASE("flatness fails on a negative moment matrix") {
  Tms y(1, 4);
  y.values()[0] = 1.0;
  y.values()[2] = -1.0;  // y_2 < 0 makes M_2 indefinite
  FlatnessReport rep = check_flatness(y, {}, {}, std::nullopt, 1e-7);
  CHECK_FALSE(rep.is_flat);
  CHECK_FALSE(rep.psd_ok);
}

TEST_CASE("flatness flags a PMI violation at the atom") {
  // Dirac at a point whose Hessian is indefinite
  Polynomial f = motzkin_dehomogenized();
  Eigen::VectorXd u = vec2(0.5, 0.5);
  Tms y = tms_from_atoms({u}, {1.0}, 8);
  FlatnessReport rep = check_flatness(y, {}, {}, hessian(f), 1e-7);
  CHECK_FALSE(rep.pmi_ok);
  CHECK_FALSE(rep.is_flat);
}

TEST_CASE("gaussian-like dense moments never flatten") {
  // standard normal moments in one variable: ranks strictly increase
  Tms y(1, 8);
  const double m[9] = {1, 0, 1, 0, 3, 0, 15, 0, 105};
  for (int i = 0; i <= 8; ++i) y.values()[i] = m[i];
  FlatnessReport rep = check_flatness(y, {}, {}, std::nullopt, 1e-9);
  CHECK_FALSE(rep.is_flat);
  CHECK(rep.inner_rank < rep.outer_rank);
}
