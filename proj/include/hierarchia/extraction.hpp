#pragma once

#include <optional>
#include <vector>

#include "hierarchia/moment.hpp"
#include "hierarchia/relaxation.hpp"

namespace hierarchia {

struct AtomicRepresentation {
  bool ok = false;
  std::vector<Eigen::VectorXd> atoms;
  std::vector<double> weights;
  int source_rank = 0;
  double moment_residual = 0.0;
  std::string failure;
};

// Constraint set a truncation must satisfy to count as flat.
struct ConstraintDescriptor {
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;
  std::optional<SymmetricMatrixPolynomial> pmi;

  static ConstraintDescriptor from_meta(const RelaxationMeta& meta) {
    return {meta.equalities, meta.inequalities, meta.pmi};
  }
};

// Scans truncations z|_{2t} from the smallest representable order upward and
// returns the first flat one.
std::optional<std::pair<int, FlatnessReport>> flat_truncation_search(
    const Tms& z, const ConstraintDescriptor& constraints, double rank_tol);

// Henrion-Lasserre eigenvalue extraction from a flat tms.
AtomicRepresentation extract_atoms(const Tms& y, int k, double rank_tol,
                                   double residual_tol = 1e-3);

}  // namespace hierarchia
