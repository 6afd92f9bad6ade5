#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "hierarchia/polynomial.hpp"

namespace hierarchia {

// Truncated moment sequence: one real value per monomial of degree <= degree(),
// in grlex order.
class TruncatedMomentSequence {
 public:
  TruncatedMomentSequence(int n, int degree);
  TruncatedMomentSequence(int n, int degree, Eigen::VectorXd values);

  int vars() const { return n_; }
  int degree() const { return d_; }
  const MonomialBasis& basis() const { return *basis_; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double at(const Exponent& a) const;

  TruncatedMomentSequence truncate(int degree) const;

 private:
  int n_;
  int d_;
  std::shared_ptr<const MonomialBasis> basis_;
  Eigen::VectorXd values_;
};

using Tms = TruncatedMomentSequence;

double riesz(const Tms& y, const Polynomial& p);

Eigen::MatrixXd moment_matrix(const Tms& y, int k);
Eigen::MatrixXd localizing_matrix(const Tms& y, const Polynomial& q, int k);
Eigen::MatrixXd block_localizing_matrix(const Tms& y, const SymmetricMatrixPolynomial& H, int k);

Tms tms_from_atoms(const std::vector<Eigen::VectorXd>& points,
                   const std::vector<double>& weights, int degree);

struct FlatnessReport {
  bool is_flat = false;
  int k = 0;            // half-degree checked
  int inner_rank = 0;   // rank of the shifted moment matrix
  int outer_rank = 0;   // rank of the full moment matrix
  int d_star = 1;       // shift used for the rank comparison
  double tolerance_used = 0.0;
  bool psd_ok = false;
  bool equalities_ok = false;
  bool inequalities_ok = false;
  bool pmi_ok = false;
  bool rank_confident = false;  // singular-value gap at the cut is decisive
};

// Numeric rank: count of singular values > tol * sigma_max. Marks the rank
// ambiguous unless the relative gap at the cut is at least 1e2.
struct RankResult {
  int rank = 0;
  bool confident = true;
  double gap = 0.0;
};
RankResult numeric_rank(const Eigen::MatrixXd& M, double rank_tol);

FlatnessReport check_flatness(const Tms& y, const std::vector<Polynomial>& equalities,
                              const std::vector<Polynomial>& inequalities,
                              const std::optional<SymmetricMatrixPolynomial>& pmi,
                              double rank_tol);

}  // namespace hierarchia
