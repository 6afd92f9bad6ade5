#include "hierarchia/certificate.hpp"

#include <stdexcept>

namespace hierarchia {

CertificateReport certify_dual(const LinearMatrixProgram& p, const SdpSolution& s,
                               const RelaxationMeta& meta) {
  if (s.status != SdpStatus::Optimal && s.status != SdpStatus::MaxIterations) {
    throw std::invalid_argument("certify_dual: need a solved program with dual blocks");
  }
  if (s.dual_blocks.size() != p.blocks.size()) {
    throw std::invalid_argument("certify_dual: missing dual blocks");
  }

  CertificateReport rep;
  // Dual stationarity in coefficient space: c = A*(Z) + E' nu. The residual of
  // this vector identity is the coefficient vector of the residual polynomial
  // f_scaled - gamma - sigma_0 - (localized parts).
  Eigen::VectorXd r = p.objective;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    const auto& Z = s.dual_blocks[b];
    for (int a = 0; a < p.num_vars; ++a) {
      double acc = 0.0;
      for (const auto& en : blk.vars[a]) {
        acc += en.value * Z(en.row, en.col) * (en.row == en.col ? 1.0 : 2.0);
      }
      r[a] -= acc;
    }
  }

  Eigen::VectorXd nu;
  if (!p.equalities.empty()) {
    const int me = static_cast<int>(p.equalities.size());
    Eigen::MatrixXd Et = Eigen::MatrixXd::Zero(p.num_vars, me);
    for (int i = 0; i < me; ++i) {
      for (const auto& [j, v] : p.equalities[i].coeffs) Et(j, i) += v;
    }
    nu = Et.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(r);
    r -= Et * nu;
  }

  rep.residual_inf = r.size() > 0 ? r.cwiseAbs().maxCoeff() : 0.0;
  const double cn = std::max(1.0, p.objective.cwiseAbs().maxCoeff());
  rep.residual_rel = rep.residual_inf / cn;

  // The normalization row <1,y> = 1 is always the first equality; its
  // multiplier is the certified bound for the scaled objective.
  const double gamma_scaled = nu.size() > 0 ? nu[0] : 0.0;
  rep.gamma = meta.report_value(gamma_scaled);

  rep.min_block_eig = 0.0;
  for (const auto& Z : s.dual_blocks) {
    if (Z.size() == 0) {
      rep.block_min_eigs.push_back(0.0);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Z, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    rep.block_min_eigs.push_back(lmin);
    rep.min_block_eig = std::min(rep.min_block_eig, lmin);
  }

  double zscale = 1.0;
  for (const auto& Z : s.dual_blocks) {
    if (Z.size() > 0) zscale = std::max(zscale, Z.cwiseAbs().maxCoeff());
  }
  rep.ok = rep.residual_rel <= 1e-6 && rep.min_block_eig >= -1e-7 * zscale;
  return rep;
}

}  // namespace hierarchia
