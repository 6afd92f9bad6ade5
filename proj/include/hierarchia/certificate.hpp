#pragma once

#include <vector>

#include "hierarchia/program.hpp"
#include "hierarchia/relaxation.hpp"

namespace hierarchia {

// Result of reconstructing the dual polynomial identity
//   f - gamma = sigma_0 + <constraint parts, multipliers>
// from the Gram (dual) blocks of a solved relaxation.
struct CertificateReport {
  bool ok = false;
  double gamma = 0.0;           // certified bound, in original objective units
  double residual_inf = 0.0;    // coefficientwise residual of the identity
  double residual_rel = 0.0;    // residual relative to the scaled objective
  std::vector<double> block_min_eigs;
  double min_block_eig = 0.0;
};

CertificateReport certify_dual(const LinearMatrixProgram& p, const SdpSolution& s,
                               const RelaxationMeta& meta);

}  // namespace hierarchia
