#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hierarchia/certificate.hpp"
#include "hierarchia/extraction.hpp"
#include "hierarchia/relaxation.hpp"

namespace hierarchia {

enum class Classification {
  StrictLocalMin,
  LocalMinVerified,
  Saddle,
  StrictLocalMax,
  Degenerate,
  NotLocalMin,
};

std::string to_string(Classification c);

struct StationaryPoint {
  Eigen::VectorXd point;
  double value = 0.0;
  std::optional<Eigen::VectorXd> multipliers;
  Classification classification = Classification::Degenerate;
  Eigen::VectorXd hessian_eigenvalues;  // reduced to the tangent space when constrained
  double stationarity_residual = 0.0;
};

struct EngineSettings {
  double delta0 = 0.01;
  double delta_floor = 1e-6;
  int k_scan_extra = 4;           // scan k_min .. k_min + k_scan_extra
  std::optional<int> k_max;       // absolute cap on the order scan
  double rank_tol = 1e-6;
  double value_tol = 1e-4;        // relative tolerance for value agreement checks
  double extraction_tol = 1e-3;
  double trace_reg = 1e-5;  // trace penalty for the compact-representative re-solve
  int newton_steps = 5;
  int stable_needed = 2;          // consecutive stable orders accepted without flatness
  std::vector<double> ball_radii = {0.1, 0.01};
  bool auto_ball = true;
  double scale = 1.0;  // optional pre-multiplier on the objective
  int max_levels = 64;
  bool verbose = false;
  // the engine runs the solver at slightly relaxed targets; moment bodies
  // often have empty interior and stall just above 1e-8
  SolverSettings solver{.feas_tol = 1e-7, .gap_tol = 1e-7, .certificate_tol = 1e-7,
                        .max_iterations = 200, .step_fraction = 0.98, .verbose = false};
};

struct HierarchyProblem {
  enum class Mode { HMin, Critical, ClosedSet } mode = Mode::HMin;
  Polynomial f{1};
  std::vector<Polynomial> h;       // equalities (Critical)
  std::vector<Polynomial> g_open;  // open-set inequalities (HMin)
  std::optional<Polynomial> g_closed;
};

enum class LevelStatus { Infeasible, ConvergedFlat, ConvergedValue, Unresolved, Failure };

struct LevelOutcome {
  LevelStatus status = LevelStatus::Failure;
  double value = 0.0;
  double value_accuracy = 1e300;
  std::vector<Eigen::VectorXd> atoms;  // polished, verified stationary points
  std::optional<Eigen::VectorXd> multipliers_hint;
  int order = 0;
  double delta_used = 0.0;
  std::optional<FlatnessReport> flatness;
  std::optional<CertificateReport> certificate;
  bool infeasibility_verified = false;
  std::vector<double> value_trajectory;
  std::string detail;
};

enum class TerminalStatus { ProvedComplete, MaxOrderReached, GapTooSmall, SolverFailure };
std::string to_string(TerminalStatus s);

struct CompletenessInfo {
  double delta = 0.0;
  int infeasibility_order = 0;
  bool certificate_verified = false;
  double below_value = 0.0;
};

struct HierarchyLevel {
  int index = 0;
  double value = 0.0;
  std::vector<StationaryPoint> points;
  int order_used = 0;
  double delta_used = 0.0;
  std::optional<FlatnessReport> flatness;
  std::optional<CertificateReport> certificate;
};

struct HierarchyReport {
  std::vector<HierarchyLevel> levels;
  TerminalStatus terminal_status = TerminalStatus::SolverFailure;
  std::optional<CompletenessInfo> completeness;
  bool no_minimizers = false;  // first relaxation certified infeasible
  int nonexistence_order = 0;
  std::string problem_echo;
  std::string hypotheses_note;
};

// Which program of the per-level family to build.
enum class LevelPhase { First, Above, MaxBelow };

LevelOutcome solve_level(const HierarchyProblem& problem, LevelPhase phase,
                         std::optional<double> bound, const EngineSettings& settings);

struct NextLevelResult {
  enum class Kind { Found, Complete, GapTooSmall, Unresolved, Failure } kind = Kind::Failure;
  LevelOutcome above;
  double delta_used = 0.0;
  CompletenessInfo completeness;
};

NextLevelResult next_level(const HierarchyProblem& problem, double current_value,
                           double delta0, const EngineSettings& settings);

HierarchyReport full_hierarchy(const HierarchyProblem& problem, const EngineSettings& settings);

Classification classify(const Eigen::VectorXd& u, const Polynomial& f,
                        const std::vector<Polynomial>& h, const EngineSettings& settings,
                        StationaryPoint* detail = nullptr);

enum class BallVerdict { Verified, Refuted, Inconclusive };

struct BallOutcome {
  BallVerdict verdict = BallVerdict::Inconclusive;
  double witness_value = 0.0;  // best certified value below f(u) when refuted
  double rho_used = 0.0;
};

BallOutcome verify_local_min_ball(const Eigen::VectorXd& u, const Polynomial& f,
                                  const std::vector<Polynomial>& h,
                                  const EngineSettings& settings);

// Damped Newton refinement of an approximate stationary point; returns the
// refined point and the final residual of the stationarity system.
std::pair<Eigen::VectorXd, double> polish_stationary(const Eigen::VectorXd& u,
                                                     const Polynomial& f,
                                                     const std::vector<Polynomial>& h,
                                                     int steps);

}  // namespace hierarchia
