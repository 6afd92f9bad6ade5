#include "hierarchia/extraction.hpp"

#include <Eigen/Eigenvalues>
#include <random>

namespace hierarchia {

namespace {

// Nonnegative least squares, Lawson-Hanson active set.
Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const int n = static_cast<int>(A.cols());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  Eigen::VectorXd w = A.transpose() * (b - A * x);
  const double tol = 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());
  for (int outer = 0; outer < 3 * n + 10; ++outer) {
    int t = -1;
    double best = tol;
    for (int j = 0; j < n; ++j) {
      if (!passive[j] && w[j] > best) {
        best = w[j];
        t = j;
      }
    }
    if (t < 0) break;
    passive[t] = true;
    for (int inner = 0; inner < 3 * n + 10; ++inner) {
      std::vector<int> idx;
      for (int j = 0; j < n; ++j) {
        if (passive[j]) idx.push_back(j);
      }
      Eigen::MatrixXd Ap(A.rows(), idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) Ap.col(c) = A.col(idx[c]);
      Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
      bool all_pos = true;
      for (int c = 0; c < zp.size(); ++c) {
        if (zp[c] <= 0.0) all_pos = false;
      }
      if (all_pos) {
        x.setZero();
        for (std::size_t c = 0; c < idx.size(); ++c) x[idx[c]] = zp[c];
        break;
      }
      double alpha = 1.0;
      for (std::size_t c = 0; c < idx.size(); ++c) {
        if (zp[c] <= 0.0) {
          const double xi = x[idx[c]];
          if (xi - zp[c] > 0) alpha = std::min(alpha, xi / (xi - zp[c]));
        }
      }
      for (std::size_t c = 0; c < idx.size(); ++c) {
        x[idx[c]] += alpha * (zp[c] - x[idx[c]]);
        if (x[idx[c]] <= 1e-14) {
          x[idx[c]] = 0.0;
          passive[idx[c]] = false;
        }
      }
    }
    w = A.transpose() * (b - A * x);
  }
  return x;
}

}  // namespace

std::optional<std::pair<int, FlatnessReport>> flat_truncation_search(
    const Tms& z, const ConstraintDescriptor& constraints, double rank_tol) {
  int t_min = 1;
  for (const auto& q : constraints.equalities) t_min = std::max(t_min, (q.degree() + 1) / 2);
  for (const auto& q : constraints.inequalities) t_min = std::max(t_min, (q.degree() + 1) / 2);
  if (constraints.pmi) {
    t_min = std::max(t_min, std::max(1, (constraints.pmi->degree() + 1) / 2) + 1);
  }
  const int t_max = z.degree() / 2;
  for (int t = t_min; t <= t_max; ++t) {
    Tms y = z.truncate(2 * t);
    FlatnessReport rep =
        check_flatness(y, constraints.equalities, constraints.inequalities, constraints.pmi, rank_tol);
    if (rep.is_flat) return std::make_pair(t, rep);
  }
  return std::nullopt;
}

AtomicRepresentation extract_atoms(const Tms& y, int k, double rank_tol, double residual_tol) {
  AtomicRepresentation out;
  const int n = y.vars();
  if (2 * k > y.degree()) {
    out.failure = "order exceeds tms degree";
    return out;
  }
  const Eigen::MatrixXd M = moment_matrix(y, k);
  const MonomialBasis rows(n, k);
  const RankResult rr = numeric_rank(M, rank_tol);
  if (!rr.confident) {
    out.failure = "ambiguous numeric rank";
    return out;
  }
  const int r = rr.rank;
  out.source_rank = r;
  if (r == 0) {
    out.failure = "zero moment matrix";
    return out;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  // Columns of V' span the row space of M; take the top-r eigenpairs.
  Eigen::MatrixXd Vt(r, rows.size());
  for (int i = 0; i < r; ++i) {
    const int src = static_cast<int>(rows.size()) - 1 - i;
    const double lam = std::max(es.eigenvalues()[src], 0.0);
    Vt.row(i) = std::sqrt(lam) * es.eigenvectors().col(src).transpose();
  }

  // Column-echelon reduction over the graded basis order picks the monomial
  // basis of the quotient space: pivot columns are the basis elements.
  std::vector<int> pivots;
  {
    Eigen::MatrixXd W = Vt;
    double colmax = 0.0;
    for (int c = 0; c < W.cols(); ++c) colmax = std::max(colmax, W.col(c).norm());
    const double pivot_tol = rank_tol * std::max(colmax, 1e-300);
    int row = 0;
    for (int c = 0; c < W.cols() && row < r; ++c) {
      int arg = -1;
      double best = pivot_tol;
      for (int i = row; i < r; ++i) {
        if (std::abs(W(i, c)) > best) {
          best = std::abs(W(i, c));
          arg = i;
        }
      }
      if (arg < 0) continue;
      W.row(arg).swap(W.row(row));
      W.row(row) /= W(row, c);
      for (int i = 0; i < r; ++i) {
        if (i != row && W(i, c) != 0.0) W.row(i) -= W(i, c) * W.row(row);
      }
      pivots.push_back(c);
      ++row;
    }
    if (static_cast<int>(pivots.size()) != r) {
      out.failure = "echelon reduction found fewer pivots than the rank";
      return out;
    }
    Vt = W;  // now Vt[:, pivots] = I
  }

  // Multiplication operators on the quotient basis.
  std::vector<Eigen::MatrixXd> N(n, Eigen::MatrixXd::Zero(r, r));
  for (int v = 0; v < n; ++v) {
    for (int j = 0; j < r; ++j) {
      Exponent shifted = rows[pivots[j]];
      shifted[v] += 1;
      const int col = rows.index_of(shifted);
      if (col < 0) {
        out.failure = "basis monomial leaves the truncation under multiplication";
        return out;
      }
      N[v].col(j) = Vt.col(col);
    }
  }

  // Joint diagonalization through the Schur form of a random convex
  // combination; deterministic seeds, re-drawn when eigenvalues collide.
  std::vector<Eigen::VectorXd> points;
  bool separated = false;
  for (unsigned attempt = 0; attempt < 3 && !separated; ++attempt) {
    std::mt19937 rng(12345u + 777u * attempt);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    Eigen::VectorXd lam(n);
    double s = 0.0;
    for (int v = 0; v < n; ++v) {
      lam[v] = unif(rng);
      s += lam[v];
    }
    lam /= s;
    Eigen::MatrixXd Nmix = Eigen::MatrixXd::Zero(r, r);
    for (int v = 0; v < n; ++v) Nmix += lam[v] * N[v];
    Eigen::RealSchur<Eigen::MatrixXd> schur(Nmix);
    if (schur.info() != Eigen::Success) continue;
    const Eigen::MatrixXd& T = schur.matrixT();
    const Eigen::MatrixXd& Q = schur.matrixU();
    bool ok = true;
    const double tscale = std::max(1.0, T.cwiseAbs().maxCoeff());
    for (int i = 0; i + 1 < r; ++i) {
      if (std::abs(T(i + 1, i)) > 1e-7 * tscale) ok = false;  // complex pair
    }
    for (int i = 0; i + 1 < r && ok; ++i) {
      for (int j = i + 1; j < r; ++j) {
        // need simple joint eigenvalues for a clean readout
        if (std::abs(T(i, i) - T(j, j)) < 1e-8 * tscale) ok = false;
      }
    }
    if (!ok && attempt + 1 < 3) continue;
    separated = true;
    points.assign(r, Eigen::VectorXd::Zero(n));
    for (int v = 0; v < n; ++v) {
      Eigen::MatrixXd D = Q.transpose() * N[v] * Q;
      for (int j = 0; j < r; ++j) points[j][v] = D(j, j);
    }
  }
  if (points.empty()) {
    out.failure = "no eigenvalue separation after retries";
    return out;
  }

  // Weights by nonnegative least squares against the full truncation.
  const MonomialBasis& all = y.basis();
  Eigen::MatrixXd Avm(all.size(), r);
  for (int i = 0; i < all.size(); ++i) {
    for (int j = 0; j < r; ++j) {
      double m = 1.0;
      for (int v = 0; v < n; ++v) {
        for (int e = 0; e < all[i][v]; ++e) m *= points[j][v];
      }
      Avm(i, j) = m;
    }
  }
  Eigen::VectorXd w = nnls(Avm, y.values());
  for (int j = 0; j < r; ++j) {
    if (w[j] < -1e-8) {
      out.failure = "negative weight";
      return out;
    }
    if (w[j] < 0.0) w[j] = 0.0;
  }
  const double yscale = std::max(1.0, y.values().cwiseAbs().maxCoeff());
  out.moment_residual = (Avm * w - y.values()).cwiseAbs().maxCoeff();

  for (int j = 0; j < r; ++j) {
    if (w[j] <= 1e-10) continue;  // numerically absent atom
    out.atoms.push_back(points[j]);
    out.weights.push_back(w[j]);
  }
  if (out.atoms.empty()) {
    out.failure = "all weights vanished";
    return out;
  }
  out.ok = out.moment_residual <= residual_tol * yscale;
  if (!out.ok) out.failure = "moment residual above tolerance";
  return out;
}

}  // namespace hierarchia
