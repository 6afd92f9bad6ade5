#include "hierarchia/moment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hierarchia {

namespace {

std::shared_ptr<const MonomialBasis> make_basis(int n, int d) {
  return std::make_shared<const MonomialBasis>(n, d);
}

int localizing_shift(const Polynomial& q) {
  return (std::max(q.degree(), 0) + 1) / 2;
}

}  // namespace

TruncatedMomentSequence::TruncatedMomentSequence(int n, int degree)
    : n_(n), d_(degree), basis_(make_basis(n, degree)) {
  values_ = Eigen::VectorXd::Zero(basis_->size());
}

TruncatedMomentSequence::TruncatedMomentSequence(int n, int degree, Eigen::VectorXd values)
    : n_(n), d_(degree), basis_(make_basis(n, degree)), values_(std::move(values)) {
  if (values_.size() != basis_->size()) {
    throw std::invalid_argument("tms value vector has wrong length");
  }
}

double TruncatedMomentSequence::at(const Exponent& a) const {
  int i = basis_->index_of(a);
  if (i < 0) throw std::invalid_argument("moment index out of range");
  return values_[i];
}

Tms TruncatedMomentSequence::truncate(int degree) const {
  if (degree > d_) throw std::invalid_argument("truncate cannot extend a tms");
  Tms out(n_, degree);
  // Grlex bases are nested: the lower-degree basis is a prefix.
  out.values_ = values_.head(out.basis_->size());
  return out;
}

double riesz(const Tms& y, const Polynomial& p) {
  if (p.vars() != y.vars()) throw std::invalid_argument("variable count mismatch");
  if (p.degree() > y.degree()) throw std::invalid_argument("riesz: polynomial degree exceeds tms degree");
  double s = 0.0;
  for (const auto& [a, c] : p.terms()) s += c * y.at(a);
  return s;
}

Eigen::MatrixXd moment_matrix(const Tms& y, int k) {
  if (2 * k > y.degree()) throw std::invalid_argument("moment_matrix: 2k exceeds tms degree");
  MonomialBasis rows(y.vars(), k);
  const int s = rows.size();
  Eigen::MatrixXd M(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      M(i, j) = M(j, i) = y.at(exponent_sum(rows[i], rows[j]));
    }
  }
  return M;
}

Eigen::MatrixXd localizing_matrix(const Tms& y, const Polynomial& q, int k) {
  if (q.vars() != y.vars()) throw std::invalid_argument("variable count mismatch");
  if (q.degree() > 2 * k || 2 * k > y.degree()) {
    throw std::invalid_argument("localizing_matrix: degree bounds violated");
  }
  MonomialBasis rows(y.vars(), k - localizing_shift(q));
  const int s = rows.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = i; j < s; ++j) {
      double v = 0.0;
      const Exponent ab = exponent_sum(rows[i], rows[j]);
      for (const auto& [g, c] : q.terms()) v += c * y.at(exponent_sum(g, ab));
      L(i, j) = L(j, i) = v;
    }
  }
  return L;
}

Eigen::MatrixXd block_localizing_matrix(const Tms& y, const SymmetricMatrixPolynomial& H, int k) {
  if (H.vars() != y.vars()) throw std::invalid_argument("variable count mismatch");
  const int dH = std::max(1, (std::max(H.degree(), 0) + 1) / 2);
  if (H.degree() > 2 * k || 2 * k > y.degree()) {
    throw std::invalid_argument("block_localizing_matrix: degree bounds violated");
  }
  MonomialBasis rows(y.vars(), k - dH);
  const int s = rows.size();
  const int ell = H.size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(ell * s, ell * s);
  for (int bi = 0; bi < ell; ++bi) {
    for (int bj = bi; bj < ell; ++bj) {
      const Polynomial& q = H.at(bi, bj);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          double v = 0.0;
          const Exponent ab = exponent_sum(rows[i], rows[j]);
          for (const auto& [g, c] : q.terms()) v += c * y.at(exponent_sum(g, ab));
          L(bi * s + i, bj * s + j) = v;
          L(bj * s + j, bi * s + i) = v;
        }
      }
    }
  }
  return L;
}

Tms tms_from_atoms(const std::vector<Eigen::VectorXd>& points,
                   const std::vector<double>& weights, int degree) {
  if (points.empty()) throw std::invalid_argument("tms_from_atoms: need at least one atom");
  if (points.size() != weights.size()) throw std::invalid_argument("atom/weight count mismatch");
  const int n = static_cast<int>(points[0].size());
  for (const auto& p : points) {
    if (p.size() != n) throw std::invalid_argument("atom dimension mismatch");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("atom weights must be positive");
  }
  Tms y(n, degree);
  const auto& basis = y.basis();
  for (int i = 0; i < basis.size(); ++i) {
    const Exponent& a = basis[i];
    double v = 0.0;
    for (std::size_t j = 0; j < points.size(); ++j) {
      double m = weights[j];
      for (int t = 0; t < n; ++t) {
        for (int e = 0; e < a[t]; ++e) m *= points[j][t];
      }
      v += m;
    }
    y.values()[i] = v;
  }
  return y;
}

RankResult numeric_rank(const Eigen::MatrixXd& M, double rank_tol) {
  RankResult out;
  if (M.rows() == 0) {
    out.rank = 0;
    out.confident = true;
    return out;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  if (smax <= 0.0) {
    out.rank = 0;
    out.confident = true;
    return out;
  }
  const double cut = rank_tol * smax;
  int r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  out.rank = r;
  if (r == 0 || r == sv.size()) {
    out.confident = true;
    out.gap = std::numeric_limits<double>::infinity();
  } else {
    out.gap = sv[r - 1] / std::max(sv[r], 1e-300);
    out.confident = out.gap >= 1e2;
  }
  return out;
}

FlatnessReport check_flatness(const Tms& y, const std::vector<Polynomial>& equalities,
                              const std::vector<Polynomial>& inequalities,
                              const std::optional<SymmetricMatrixPolynomial>& pmi,
                              double rank_tol) {
  FlatnessReport rep;
  rep.tolerance_used = rank_tol;
  if (y.degree() % 2 != 0) throw std::invalid_argument("check_flatness: tms degree must be even");
  const int k = y.degree() / 2;
  rep.k = k;

  int d_star = 1;
  for (const auto& q : equalities) d_star = std::max(d_star, (std::max(q.degree(), 0) + 1) / 2);
  for (const auto& q : inequalities) d_star = std::max(d_star, (std::max(q.degree(), 0) + 1) / 2);
  if (pmi) d_star = std::max(d_star, (std::max(pmi->degree(), 0) + 1) / 2);
  rep.d_star = d_star;

  for (const auto& q : equalities) {
    if (q.degree() > 2 * k) return rep;  // not representable, cannot be flat
  }
  for (const auto& q : inequalities) {
    if (q.degree() > 2 * k) return rep;
  }
  if (pmi && pmi->degree() > 2 * k) return rep;

  const double ynorm = y.values().cwiseAbs().maxCoeff();
  const double feas_tol = 1e-6 * (1.0 + ynorm);

  const Eigen::MatrixXd Mk = moment_matrix(y, k);
  const double mscale = std::max(1.0, Mk.cwiseAbs().maxCoeff());
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Mk, Eigen::EigenvaluesOnly);
    rep.psd_ok = es.eigenvalues().minCoeff() >= -rank_tol * mscale;
  }

  rep.equalities_ok = true;
  for (const auto& q : equalities) {
    const Eigen::MatrixXd L = localizing_matrix(y, q, k);
    if (L.size() > 0 && L.cwiseAbs().maxCoeff() > feas_tol) {
      rep.equalities_ok = false;
      break;
    }
  }

  rep.inequalities_ok = true;
  for (const auto& q : inequalities) {
    const Eigen::MatrixXd L = localizing_matrix(y, q, k);
    if (L.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -rank_tol * scale) {
      rep.inequalities_ok = false;
      break;
    }
  }

  rep.pmi_ok = true;
  if (pmi) {
    const Eigen::MatrixXd L = block_localizing_matrix(y, *pmi, k);
    if (L.size() > 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(L, Eigen::EigenvaluesOnly);
      const double scale = std::max(1.0, L.cwiseAbs().maxCoeff());
      rep.pmi_ok = es.eigenvalues().minCoeff() >= -rank_tol * scale;
    }
  }

  if (k - d_star < 0) return rep;
  const RankResult outer = numeric_rank(Mk, rank_tol);
  const RankResult inner = numeric_rank(moment_matrix(y, k - d_star), rank_tol);
  rep.outer_rank = outer.rank;
  rep.inner_rank = inner.rank;
  rep.rank_confident = outer.confident && inner.confident;

  rep.is_flat = rep.psd_ok && rep.equalities_ok && rep.inequalities_ok && rep.pmi_ok &&
                rep.rank_confident && rep.inner_rank == rep.outer_rank && rep.outer_rank > 0;
  return rep;
}

}  // namespace hierarchia
