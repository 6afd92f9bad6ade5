#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hierarchia/moment.hpp"
#include "hierarchia/program.hpp"

namespace hierarchia {

enum class RelaxationKind {
  HMinFirst,
  HMinAbove,
  HMaxBelow,
  CriticalFirst,
  CriticalAbove,
  CriticalMaxBelow,
  BallVerify,
  OpenSetHMin,
  ClosedSetCritical,
  UnconstrainedCritical,
};

// Everything a solved relaxation needs to be interpreted: the constraint set
// for flatness checks, the objective with its scaling, and the order used.
struct RelaxationMeta {
  RelaxationKind kind = RelaxationKind::HMinFirst;
  int n = 0;
  int order = 0;
  std::optional<double> bound;
  bool maximize = false;        // objective internally negated
  double objective_scale = 1.0;  // reported value = raw * objective_scale (* -1 if maximize)
  int d_star = 1;
  std::vector<Polynomial> equalities;    // localized to zero
  std::vector<Polynomial> inequalities;  // localized nonnegative (includes bound rows)
  std::optional<SymmetricMatrixPolynomial> pmi;
  Polynomial objective{1};  // original unscaled objective (f, not -f)

  double report_value(double raw) const {
    const double v = raw * objective_scale;
    return maximize ? -v : v;
  }
};

using BuiltRelaxation = std::pair<LinearMatrixProgram, RelaxationMeta>;

// Smallest admissible order for each formulation.
int min_order_hmin(const Polynomial& f);
int min_order_critical(const Polynomial& f, const std::vector<Polynomial>& h);
int min_order_ball(const Polynomial& f, const std::vector<Polynomial>& h);
int min_order_closed_set(const Polynomial& f, const Polynomial& g);

BuiltRelaxation build_hmin_first(const Polynomial& f, int k);
BuiltRelaxation build_hmin_above(const Polynomial& f, double bound, int k);
BuiltRelaxation build_hmax_below(const Polynomial& f, double bound, int k);
BuiltRelaxation build_critical_first(const Polynomial& f, const std::vector<Polynomial>& h, int k);
BuiltRelaxation build_critical_above(const Polynomial& f, const std::vector<Polynomial>& h,
                                     double bound, int k);
BuiltRelaxation build_critical_max_below(const Polynomial& f, const std::vector<Polynomial>& h,
                                         double bound, int k);
BuiltRelaxation build_ball_verification(const Polynomial& f, const std::vector<Polynomial>& h,
                                        const Eigen::VectorXd& u, double rho, int k);
BuiltRelaxation build_open_set_hmin(const Polynomial& f, const std::vector<Polynomial>& g,
                                    std::optional<double> bound, int k);
BuiltRelaxation build_closed_set_critical(const Polynomial& f, const Polynomial& g,
                                          std::optional<double> bound, int k);

// Appends one localizing LMI block for q >= 0 to an already-built program
// (q is scaled to unit coefficient norm first; the scaled copy is returned).
Polynomial append_localizing_block(LinearMatrixProgram& prog, const Polynomial& q, int k,
                                   const std::string& name);

}  // namespace hierarchia
