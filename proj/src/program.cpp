#include "hierarchia/program.hpp"

#include <Eigen/SVD>
#include <stdexcept>

namespace hierarchia {

Eigen::MatrixXd LmiBlock::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd M = F0;
  for (int a = 0; a < static_cast<int>(vars.size()); ++a) {
    const double ya = y[a];
    if (ya == 0.0) continue;
    for (const auto& e : vars[a]) {
      M(e.row, e.col) += ya * e.value;
      if (e.row != e.col) M(e.col, e.row) += ya * e.value;
    }
  }
  return M;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SdpStatus::DualUnbounded: return "DualUnbounded";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

Presolve presolve_equalities(const LinearMatrixProgram& p, double tol) {
  Presolve out;
  const int m = static_cast<int>(p.equalities.size());
  const int n = p.num_vars;
  if (m == 0) {
    out.y0 = Eigen::VectorXd::Zero(n);
    out.Z = Eigen::MatrixXd::Identity(n, n);
    return out;
  }
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m, n);
  Eigen::VectorXd e(m);
  for (int i = 0; i < m; ++i) {
    for (const auto& [j, v] : p.equalities[i].coeffs) E(i, j) += v;
    e[i] = p.equalities[i].rhs;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  int rank = 0;
  while (rank < sv.size() && sv[rank] > tol * std::max(1.0, smax)) ++rank;

  // Minimum-norm particular solution restricted to the numerical row space.
  Eigen::VectorXd ue = svd.matrixU().transpose() * e;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < rank; ++i) w[i] = ue[i] / sv[i];
  out.y0 = svd.matrixV().leftCols(sv.size()) * w;

  Eigen::VectorXd resid = E * out.y0 - e;
  out.inconsistency = resid.size() > 0 ? resid.cwiseAbs().maxCoeff() : 0.0;
  out.consistent = out.inconsistency <= 1e-7 * (1.0 + e.cwiseAbs().maxCoeff());
  out.Z = svd.matrixV().rightCols(n - rank);
  return out;
}

bool verify_infeasibility_certificate(const LinearMatrixProgram& p,
                                      const InfeasibilityCertificate& cert,
                                      double tol) {
  if (cert.blocks.size() != p.blocks.size()) return false;
  double scale = 0.0;
  for (const auto& Z : cert.blocks) scale = std::max(scale, Z.cwiseAbs().maxCoeff());
  if (!(scale > 0.0)) return false;
  for (const auto& Z : cert.blocks) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol * scale) return false;
  }
  // The certificate functional l(y) = sum_b <block_b(y), Z_b> must be constant
  // and negative on the affine set E y = e, while l(y) >= 0 for any feasible y.
  double offset = 0.0;
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(p.num_vars);
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    const auto& Z = cert.blocks[b];
    offset += (blk.F0.array() * Z.array()).sum();
    for (int a = 0; a < p.num_vars; ++a) {
      double s = 0.0;
      for (const auto& en : blk.vars[a]) {
        s += en.value * Z(en.row, en.col) * (en.row == en.col ? 1.0 : 2.0);
      }
      dir[a] += s;
    }
  }
  if (!p.equalities.empty()) {
    const int m = static_cast<int>(p.equalities.size());
    Eigen::MatrixXd Et = Eigen::MatrixXd::Zero(p.num_vars, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
      for (const auto& [j, v] : p.equalities[i].coeffs) Et(j, i) += v;
      rhs[i] = p.equalities[i].rhs;
    }
    // dir must lie in the equality row space: dir = E' mu, so that the
    // variable part of l reduces to mu'e on the affine set.
    Eigen::VectorXd mu = Et.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(dir);
    offset += mu.dot(rhs);
    dir -= Et * mu;
  }
  const double dir_norm = dir.size() > 0 ? dir.cwiseAbs().maxCoeff() : 0.0;
  return dir_norm <= tol * std::max(1.0, scale) && offset < -tol;
}

}  // namespace hierarchia
