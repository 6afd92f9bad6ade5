#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hierarchia/monomial.hpp"

namespace hierarchia {

// One entry of a coefficient matrix F_alpha inside an affine LMI block.
struct MatrixEntry {
  int row = 0;  // row <= col, upper triangle
  int col = 0;
  double value = 0.0;
};

// Affine symmetric-matrix map y -> F0 + sum_a y_a F_a, required PSD.
struct LmiBlock {
  std::string name;
  int size = 0;
  Eigen::MatrixXd F0;                          // size x size, symmetric
  std::vector<std::vector<MatrixEntry>> vars;  // per variable, upper-triangle entries

  Eigen::MatrixXd evaluate(const Eigen::VectorXd& y) const;
};

// Scalar linear equality sum_a coeffs[a] * y_a = rhs, sparse.
struct EqualityRow {
  std::vector<std::pair<int, double>> coeffs;
  double rhs = 0.0;
};

// min c'y  s.t.  every LMI block PSD and E y = e.
struct LinearMatrixProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<LmiBlock> blocks;
  std::vector<EqualityRow> equalities;
  // Monomial indexing of y when the program is a moment relaxation.
  std::shared_ptr<const MonomialBasis> var_index;
};

enum class SdpStatus {
  Optimal,
  PrimalInfeasible,
  DualUnbounded,
  MaxIterations,
  NumericalFailure,
};

std::string to_string(SdpStatus s);

struct SolverSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  double certificate_tol = 1e-7;
  int max_iterations = 200;
  double step_fraction = 0.98;
  bool verbose = false;
};

// Farkas-type certificate of an empty LMI feasible set: a PSD functional
// vanishing on the variable directions and negative on the affine offset.
struct InfeasibilityCertificate {
  std::vector<Eigen::MatrixXd> blocks;  // one PSD matrix per LMI block
  double offset_value = 0.0;            // <F0, Z> aggregated, < 0
  double direction_residual = 0.0;      // max_j |<F_j, Z>| after equality projection
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  Eigen::VectorXd y;
  double objective = 0.0;
  std::vector<Eigen::MatrixXd> dual_blocks;  // Gram matrices, one per LMI block
  Eigen::VectorXd dual_eq;                   // multipliers for equality rows
  std::optional<InfeasibilityCertificate> infeasibility_certificate;
  std::optional<Eigen::VectorXd> unbounded_ray;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double duality_gap = 0.0;
};

// Equality presolve: full-row-rank reduction and affine reparameterization
// y = y0 + Z t with Z an orthonormal nullspace basis.
struct Presolve {
  bool consistent = true;
  double inconsistency = 0.0;
  Eigen::VectorXd y0;
  Eigen::MatrixXd Z;
};

Presolve presolve_equalities(const LinearMatrixProgram& p, double tol = 1e-9);

SdpSolution solve(const LinearMatrixProgram& p, const SolverSettings& settings = {});

// Independent check of a returned infeasibility certificate.
bool verify_infeasibility_certificate(const LinearMatrixProgram& p,
                                      const InfeasibilityCertificate& cert,
                                      double tol);

// Phase-1 feasibility probe: minimizes the uniform slack s with every block
// shifted by s*I. A positive optimal slack proves infeasibility and the dual
// blocks of the probe form the Farkas certificate. Returns the certificate
// when infeasibility is established, nullopt otherwise; margin receives the
// optimal slack when the probe solved.
std::optional<InfeasibilityCertificate> probe_infeasibility(const LinearMatrixProgram& p,
                                                            const SolverSettings& settings,
                                                            double* margin = nullptr);

}  // namespace hierarchia
