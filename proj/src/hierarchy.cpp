#include "hierarchia/hierarchy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hierarchia {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::StrictLocalMin: return "StrictLocalMin";
    case Classification::LocalMinVerified: return "LocalMinVerified";
    case Classification::Saddle: return "Saddle";
    case Classification::StrictLocalMax: return "StrictLocalMax";
    case Classification::Degenerate: return "Degenerate";
    case Classification::NotLocalMin: return "NotLocalMin";
  }
  return "Unknown";
}

std::string to_string(TerminalStatus s) {
  switch (s) {
    case TerminalStatus::ProvedComplete: return "ProvedComplete";
    case TerminalStatus::MaxOrderReached: return "MaxOrderReached";
    case TerminalStatus::GapTooSmall: return "GapTooSmall";
    case TerminalStatus::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

namespace {

Polynomial scaled_objective(const HierarchyProblem& pr, const EngineSettings& st) {
  return st.scale == 1.0 ? pr.f : pr.f * st.scale;
}

// Equalities the stationarity system uses for polish/classification.
std::vector<Polynomial> active_equalities(const HierarchyProblem& pr) {
  if (pr.mode == HierarchyProblem::Mode::Critical) return pr.h;
  return {};
}

BuiltRelaxation build_phase(const HierarchyProblem& pr, const EngineSettings& st,
                            LevelPhase phase, std::optional<double> bound, int k) {
  const Polynomial f = scaled_objective(pr, st);
  switch (pr.mode) {
    case HierarchyProblem::Mode::HMin: {
      if (!pr.g_open.empty()) {
        if (phase == LevelPhase::MaxBelow) {
          auto [prog, meta] = build_open_set_hmin(f, pr.g_open, std::nullopt, k);
          prog.objective = -prog.objective;
          const Polynomial below = append_localizing_block(
              prog, Polynomial::constant(f.vars(), *bound) - f, k, "below-bound");
          meta.maximize = true;
          meta.bound = bound;
          meta.inequalities.push_back(below);
          return {std::move(prog), std::move(meta)};
        }
        return build_open_set_hmin(f, pr.g_open,
                                   phase == LevelPhase::Above ? bound : std::nullopt, k);
      }
      if (phase == LevelPhase::First) return build_hmin_first(f, k);
      if (phase == LevelPhase::Above) return build_hmin_above(f, *bound, k);
      return build_hmax_below(f, *bound, k);
    }
    case HierarchyProblem::Mode::Critical: {
      if (phase == LevelPhase::First) return build_critical_first(f, pr.h, k);
      if (phase == LevelPhase::Above) return build_critical_above(f, pr.h, *bound, k);
      return build_critical_max_below(f, pr.h, *bound, k);
    }
    case HierarchyProblem::Mode::ClosedSet: {
      if (phase == LevelPhase::MaxBelow) {
        auto [prog, meta] = build_closed_set_critical(f, *pr.g_closed, std::nullopt, k);
        prog.objective = -prog.objective;
        const Polynomial below = append_localizing_block(
            prog, Polynomial::constant(f.vars(), *bound) - f, k, "below-bound");
        meta.maximize = true;
        meta.bound = bound;
        meta.inequalities.push_back(below);
        return {std::move(prog), std::move(meta)};
      }
      return build_closed_set_critical(f, *pr.g_closed,
                                       phase == LevelPhase::Above ? bound : std::nullopt, k);
    }
  }
  throw std::logic_error("unreachable");
}

int phase_min_order(const HierarchyProblem& pr, const EngineSettings& st) {
  const Polynomial f = scaled_objective(pr, st);
  switch (pr.mode) {
    case HierarchyProblem::Mode::HMin:
      return min_order_hmin(f);
    case HierarchyProblem::Mode::Critical:
      return min_order_critical(f, pr.h);
    case HierarchyProblem::Mode::ClosedSet:
      return min_order_closed_set(f, *pr.g_closed);
  }
  return 1;
}

double rel_tol(double tol, double v) { return tol * (1.0 + std::abs(v)); }

struct StationarityOps {
  std::vector<Polynomial> grad_f;
  SymmetricMatrixPolynomial hess_f;
  std::vector<std::vector<Polynomial>> grad_h;
  std::vector<SymmetricMatrixPolynomial> hess_h;

  StationarityOps(const Polynomial& f, const std::vector<Polynomial>& h)
      : grad_f(gradient(f)), hess_f(hessian(f)) {
    for (const auto& hi : h) {
      grad_h.push_back(gradient(hi));
      hess_h.push_back(hessian(hi));
    }
  }

  Eigen::VectorXd eval_grad_f(const Eigen::VectorXd& u) const {
    Eigen::VectorXd g(grad_f.size());
    for (std::size_t i = 0; i < grad_f.size(); ++i) g[i] = grad_f[i].evaluate(u);
    return g;
  }

  Eigen::MatrixXd eval_jac_h(const Eigen::VectorXd& u) const {
    Eigen::MatrixXd J(grad_h.size(), u.size());
    for (std::size_t i = 0; i < grad_h.size(); ++i) {
      for (int j = 0; j < u.size(); ++j) J(i, j) = grad_h[i][j].evaluate(u);
    }
    return J;
  }
};

}  // namespace

std::pair<Eigen::VectorXd, double> polish_stationary(const Eigen::VectorXd& u0,
                                                     const Polynomial& f,
                                                     const std::vector<Polynomial>& h,
                                                     int steps) {
  const int n = f.vars();
  const int m = static_cast<int>(h.size());
  StationarityOps ops(f, h);

  Eigen::VectorXd u = u0;
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(m);
  auto residual = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& l) {
    Eigen::VectorXd g = ops.eval_grad_f(x);
    if (m > 0) g -= ops.eval_jac_h(x).transpose() * l;
    Eigen::VectorXd r(n + m);
    r.head(n) = g;
    for (int i = 0; i < m; ++i) r[n + i] = h[i].evaluate(x);
    return r;
  };

  if (m > 0) {
    Eigen::MatrixXd Jt = ops.eval_jac_h(u).transpose();
    lam = Jt.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(ops.eval_grad_f(u));
  }

  Eigen::VectorXd r = residual(u, lam);
  double rn = r.cwiseAbs().maxCoeff();
  for (int it = 0; it < steps; ++it) {
    if (rn < 1e-13) break;
    Eigen::MatrixXd K(n + m, n + m);
    Eigen::MatrixXd HL = ops.hess_f.evaluate(u);
    for (int i = 0; i < m; ++i) HL -= lam[i] * ops.hess_h[i].evaluate(u);
    K.topLeftCorner(n, n) = HL;
    if (m > 0) {
      Eigen::MatrixXd J = ops.eval_jac_h(u);
      K.topRightCorner(n, m) = -J.transpose();
      K.bottomLeftCorner(m, n) = J;
      K.bottomRightCorner(m, m).setZero();
    }
    Eigen::VectorXd step = K.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 6; ++ls) {
      Eigen::VectorXd ut = u + alpha * step.head(n);
      Eigen::VectorXd lt = lam + alpha * step.tail(m);
      Eigen::VectorXd rt = residual(ut, lt);
      const double rtn = rt.cwiseAbs().maxCoeff();
      if (rtn < rn) {
        u = ut;
        lam = lt;
        r = rt;
        rn = rtn;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
  }
  return {u, rn};
}

Classification classify(const Eigen::VectorXd& u, const Polynomial& f,
                        const std::vector<Polynomial>& h, const EngineSettings& settings,
                        StationaryPoint* detail) {
  const int n = f.vars();
  const int m = static_cast<int>(h.size());
  StationarityOps ops(f, h);

  Eigen::VectorXd g = ops.eval_grad_f(u);
  Eigen::VectorXd lam;
  Eigen::MatrixXd HL = ops.hess_f.evaluate(u);
  Eigen::MatrixXd reduced;
  double station_resid = 0.0;

  if (m == 0) {
    station_resid = g.cwiseAbs().maxCoeff();
    reduced = HL;
  } else {
    Eigen::MatrixXd J = ops.eval_jac_h(u);
    lam = J.transpose().bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(g);
    station_resid = (g - J.transpose() * lam).cwiseAbs().maxCoeff();
    for (int i = 0; i < m; ++i) {
      station_resid = std::max(station_resid, std::abs(h[i].evaluate(u)));
      HL -= lam[i] * ops.hess_h[i].evaluate(u);
    }
    // Orthonormal basis of the tangent space (intersection of grad h_i
    // orthogonal complements).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
    int rank = 0;
    const auto& sv = svd.singularValues();
    for (int i = 0; i < sv.size(); ++i) {
      if (sv[i] > 1e-9 * std::max(1.0, sv[0])) ++rank;
    }
    if (rank >= n) {
      // Zero-dimensional tangent space: the point is isolated on the variety.
      if (detail) {
        detail->multipliers = lam;
        detail->stationarity_residual = station_resid;
        detail->hessian_eigenvalues.resize(0);
      }
      return Classification::StrictLocalMin;
    }
    Eigen::MatrixXd Nsp = svd.matrixV().rightCols(n - rank);
    reduced = Nsp.transpose() * HL * Nsp;
  }

  const double hscale = std::max(1.0, HL.cwiseAbs().maxCoeff());
  const double station_tol = 1e-4 * hscale;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (reduced + reduced.transpose()));
  Eigen::VectorXd eigs = es.eigenvalues();
  const double eig_tol = 1e-6 * std::max(eigs.cwiseAbs().maxCoeff(), 1e-12);

  if (detail) {
    if (m > 0) detail->multipliers = lam;
    detail->stationarity_residual = station_resid;
    detail->hessian_eigenvalues = eigs;
  }
  if (station_resid > station_tol) throw std::invalid_argument("classify: point is not stationary");

  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (eigs[i] > eig_tol) {
      ++pos;
    } else if (eigs[i] < -eig_tol) {
      ++neg;
    } else {
      ++zero;
    }
  }
  if (zero == 0 && neg == 0 && pos > 0) return Classification::StrictLocalMin;
  if (zero == 0 && pos == 0 && neg > 0) return Classification::StrictLocalMax;
  if (pos > 0 && neg > 0) return Classification::Saddle;
  if (eigs.size() == 0) return Classification::StrictLocalMin;

  // Semidefinite with a nontrivial kernel: second-order conditions are silent.
  if (!settings.auto_ball) return Classification::Degenerate;
  BallOutcome ball = verify_local_min_ball(u, f, h, settings);
  if (ball.verdict == BallVerdict::Verified) return Classification::LocalMinVerified;
  if (ball.verdict == BallVerdict::Refuted) {
    return pos > 0 ? Classification::Saddle : Classification::NotLocalMin;
  }
  return Classification::Degenerate;
}

namespace {

struct SolvedRelaxation {
  bool usable = false;
  double value = 0.0;
  double accuracy = 1e300;
  SdpSolution sol;
  RelaxationMeta meta;
  LinearMatrixProgram prog;
};

}  // namespace

LevelOutcome solve_level(const HierarchyProblem& problem, LevelPhase phase,
                         std::optional<double> bound, const EngineSettings& settings) {
  LevelOutcome out;
  const Polynomial f = scaled_objective(problem, settings);
  const std::vector<Polynomial> h = active_equalities(problem);

  const int k_min = phase_min_order(problem, settings);
  int k_hi = k_min + settings.k_scan_extra;
  if (settings.k_max) k_hi = std::min(k_hi, std::max(*settings.k_max, k_min));

  int stable = 0;
  bool have_prev = false;
  double prev_value = 0.0;
  SolvedRelaxation last;

  for (int k = k_min; k <= k_hi; ++k) {
    BuiltRelaxation built;
    try {
      built = build_phase(problem, settings, phase, bound, k);
    } catch (const std::exception& e) {
      out.detail = e.what();
      continue;
    }
    auto& [prog, meta] = built;
    SdpSolution sol = solve(prog, settings.solver);
    if (settings.verbose) {
      std::printf("  [solve_level] k=%d status=%s obj=%.8g pres=%.1e dres=%.1e gap=%.1e it=%d\n",
                  k, to_string(sol.status).c_str(),
                  meta.report_value(sol.objective), sol.primal_residual, sol.dual_residual,
                  sol.duality_gap, sol.iterations);
    }

    if (sol.status == SdpStatus::PrimalInfeasible) {
      out.status = LevelStatus::Infeasible;
      out.order = k;
      out.infeasibility_verified =
          sol.infeasibility_certificate &&
          verify_infeasibility_certificate(prog, *sol.infeasibility_certificate, 1e-5);
      return out;
    }
    if (sol.status == SdpStatus::DualUnbounded) {
      // the truncation is still too loose to bound the objective; go higher
      out.detail = "relaxation unbounded at order " + std::to_string(k);
      stable = 0;
      have_prev = false;
      continue;
    }

    const bool usable =
        sol.status == SdpStatus::Optimal ||
        ((sol.status == SdpStatus::MaxIterations || sol.status == SdpStatus::NumericalFailure) &&
         sol.y.size() == prog.num_vars && sol.primal_residual <= 1e-5 &&
         sol.dual_residual <= 1e-5);
    if (!usable) {
      // A breakdown often hides an infeasible program whose Farkas direction
      // the embedding could not certify; the phase-1 probe is well-posed.
      double margin = 0.0;
      auto cert = probe_infeasibility(prog, settings.solver, &margin);
      if (cert && verify_infeasibility_certificate(prog, *cert, 1e-5)) {
        if (settings.verbose) {
          std::printf("  [solve_level] k=%d infeasible via phase-1 probe (slack %.3e)\n", k,
                      margin);
        }
        out.status = LevelStatus::Infeasible;
        out.order = k;
        out.infeasibility_verified = true;
        return out;
      }
      out.detail = "solver " + to_string(sol.status) + " at order " + std::to_string(k);
      continue;
    }

    const double value = meta.report_value(sol.objective);
    out.value_trajectory.push_back(value);
    const double solver_err = std::max({sol.duality_gap, sol.primal_residual, sol.dual_residual});

    // Flat truncation, then atom extraction, then verification against the
    // original stationarity system.
    const SymmetricMatrixPolynomial Hf = hessian(f);
    auto try_extract = [&](const Eigen::VectorXd& moments, double rank_tol,
                           double residual_tol) -> bool {
      Tms z(f.vars(), 2 * k, moments);
      auto flat =
          flat_truncation_search(z, ConstraintDescriptor::from_meta(meta), rank_tol);
      if (!flat) return false;
      Tms yt = z.truncate(2 * flat->first);
      AtomicRepresentation rep = extract_atoms(yt, flat->first, rank_tol, residual_tol);
      if (!rep.ok) return false;
      std::vector<Eigen::VectorXd> verified;
      double refined_value = 0.0;
      bool first_atom = true;
      for (const auto& atom : rep.atoms) {
        auto [u, resid] = polish_stationary(atom, f, h, settings.newton_steps);
        const double hscale = std::max(1.0, Hf.evaluate(u).cwiseAbs().maxCoeff());
        if (resid > 1e-4 * hscale) continue;
        bool feas = true;
        if (problem.mode == HierarchyProblem::Mode::HMin) {
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hf.evaluate(u),
                                                            Eigen::EigenvaluesOnly);
          if (es.eigenvalues().minCoeff() < -1e-4 * hscale) feas = false;
          for (const auto& gi : problem.g_open) {
            if (gi.evaluate(u) < -1e-6 * (1.0 + gi.coeff_inf_norm())) feas = false;
          }
        }
        if (problem.mode == HierarchyProblem::Mode::ClosedSet) {
          if (problem.g_closed->evaluate(u) < -1e-6) feas = false;
        }
        if (bound) {
          const double fu = f.evaluate(u);
          const double tol = rel_tol(settings.value_tol, *bound);
          if (phase == LevelPhase::Above && fu < *bound - tol) feas = false;
          if (phase == LevelPhase::MaxBelow && fu > *bound + tol) feas = false;
        }
        if (!feas) continue;
        const double fu = f.evaluate(u);
        if (std::abs(fu - value) > rel_tol(10 * settings.value_tol, value)) continue;
        bool dup = false;
        for (const auto& v : verified) {
          if ((v - u).cwiseAbs().maxCoeff() <= 1e-4 * (1.0 + u.cwiseAbs().maxCoeff())) dup = true;
        }
        if (dup) continue;
        verified.push_back(u);
        if (first_atom) {
          refined_value = fu;
          first_atom = false;
        } else {
          refined_value = phase == LevelPhase::MaxBelow ? std::max(refined_value, fu)
                                                        : std::min(refined_value, fu);
        }
      }
      if (verified.empty()) return false;
      out.status = LevelStatus::ConvergedFlat;
      out.value = refined_value;
      out.value_accuracy = rel_tol(1e-8, refined_value);
      out.atoms = std::move(verified);
      out.order = k;
      out.flatness = flat->second;
      if (!sol.dual_blocks.empty()) {
        try {
          out.certificate = certify_dual(prog, sol, meta);
        } catch (const std::exception&) {
        }
      }
      return true;
    };

    if (try_extract(sol.y, settings.rank_tol, settings.extraction_tol)) return out;

    // The optimal face may be unbounded (mass escaping along non-compact
    // critical sets); a small trace penalty selects a compact atomic
    // representative of the same face without moving the value.
    if (settings.trace_reg > 0.0) {
      LinearMatrixProgram reg = prog;
      MonomialBasis half(f.vars(), k);
      for (int i = 0; i < half.size(); ++i) {
        Exponent sq = exponent_sum(half[i], half[i]);
        reg.objective[prog.var_index->index_of(sq)] += settings.trace_reg;
      }
      SdpSolution sol2 = solve(reg, settings.solver);
      const bool usable2 =
          sol2.status == SdpStatus::Optimal ||
          ((sol2.status == SdpStatus::MaxIterations ||
            sol2.status == SdpStatus::NumericalFailure) &&
           sol2.y.size() == reg.num_vars && sol2.primal_residual <= 1e-5 &&
           sol2.dual_residual <= 1e-5);
      if (usable2) {
        const double v2 = meta.report_value(prog.objective.dot(sol2.y));
        // the penalty leaves O(gap/eps) residue in the moments, so the rank
        // cut is coarser here; the singular-value gap rule still gates it
        const double reg_rank_tol = std::max(settings.rank_tol, 1e-3);
        const double reg_residual_tol = std::max(settings.extraction_tol, 1e-2);
        if (std::abs(v2 - value) <= rel_tol(50 * settings.value_tol, value) &&
            try_extract(sol2.y, reg_rank_tol, reg_residual_tol)) {
          return out;
        }
      }
    }

    // A value glued to the bound without a flat certificate is the signature
    // of a spurious pseudo-moment pinned by the localizing block; it does not
    // count as evidence of convergence.
    if (bound && std::abs(value - *bound) <= rel_tol(1e-5, *bound)) {
      out.detail = "value pinned at the bound at order " + std::to_string(k);
      continue;
    }

    if (have_prev && std::abs(value - prev_value) <= rel_tol(settings.value_tol, value)) {
      ++stable;
    } else {
      stable = 0;
    }
    have_prev = true;
    prev_value = value;
    out.value = value;
    out.order = k;
    out.value_accuracy = std::max(rel_tol(2e-5, value),
                                  std::abs(meta.objective_scale) * solver_err * 10.0);
    if (stable + 1 >= settings.stable_needed && k > k_min) {
      out.status = LevelStatus::ConvergedValue;
      return out;
    }
  }

  if (have_prev) {
    out.status = LevelStatus::Unresolved;
    return out;
  }
  out.status = LevelStatus::Failure;
  return out;
}

BallOutcome verify_local_min_ball(const Eigen::VectorXd& u, const Polynomial& f,
                                  const std::vector<Polynomial>& h,
                                  const EngineSettings& settings) {
  BallOutcome out;
  const double fu = f.evaluate(u);
  bool all_refuted = true;
  double best_witness = fu;

  for (double rho : settings.ball_radii) {
    const int k_min = min_order_ball(f, h);
    int k_hi = k_min + settings.k_scan_extra;
    if (settings.k_max) k_hi = std::min(k_hi, std::max(*settings.k_max, k_min));
    bool refuted_here = false;
    bool resolved_here = false;
    double prev = 0.0;
    bool have_prev = false;
    int stable = 0;
    for (int k = k_min; k <= k_hi; ++k) {
      BuiltRelaxation built;
      try {
        built = build_ball_verification(f, h, u, rho, k);
      } catch (const std::exception&) {
        break;
      }
      auto& [prog, meta] = built;
      SdpSolution sol = solve(prog, settings.solver);
      const bool usable =
          sol.status == SdpStatus::Optimal ||
          (sol.y.size() == prog.num_vars && sol.primal_residual <= 1e-5 &&
           sol.dual_residual <= 1e-5);
      if (!usable) continue;
      const double value = meta.report_value(sol.objective);
      // The decision scale is the solve accuracy, not the coarse level
      // tolerance: a shrinking ball makes the true defect arbitrarily small.
      const double solver_err = std::max({sol.duality_gap, sol.primal_residual,
                                          sol.dual_residual});
      const double tol = std::max(rel_tol(1e-7, fu),
                                  10.0 * solver_err * std::abs(meta.objective_scale));
      // Lower bound at or above f(u) settles the question immediately.
      if (value >= fu - tol) {
        out.verdict = BallVerdict::Verified;
        out.rho_used = rho;
        return out;
      }
      Tms z(f.vars(), 2 * k, sol.y);
      auto flat =
          flat_truncation_search(z, ConstraintDescriptor::from_meta(meta), settings.rank_tol);
      const bool stable_now =
          have_prev && std::abs(value - prev) <= rel_tol(settings.value_tol, value);
      stable = stable_now ? stable + 1 : 0;
      have_prev = true;
      prev = value;
      if (flat || stable + 1 >= settings.stable_needed) {
        resolved_here = true;
        if (value < fu - tol) {
          refuted_here = true;
          best_witness = std::min(best_witness, value);
        }
        break;
      }
    }
    if (!resolved_here || !refuted_here) all_refuted = false;
    if (!resolved_here) {
      // could not certify anything at this radius
      continue;
    }
  }

  if (all_refuted) {
    out.verdict = BallVerdict::Refuted;
    out.witness_value = best_witness;
    return out;
  }
  out.verdict = BallVerdict::Inconclusive;
  return out;
}

NextLevelResult next_level(const HierarchyProblem& problem, double current_value,
                           double delta0, const EngineSettings& settings) {
  NextLevelResult out;
  double delta = delta0;
  while (delta >= settings.delta_floor) {
    const double bound = current_value + delta;
    LevelOutcome below = solve_level(problem, LevelPhase::MaxBelow, bound, settings);
    if (below.status == LevelStatus::Failure) {
      out.kind = NextLevelResult::Kind::Failure;
      return out;
    }
    if (below.status == LevelStatus::Unresolved || below.status == LevelStatus::Infeasible) {
      out.kind = NextLevelResult::Kind::Unresolved;
      return out;
    }
    const double equal_tol = std::min(
        0.49 * delta, std::max(below.value_accuracy, rel_tol(1e-7, current_value)));
    const bool below_equal = below.value - current_value <= equal_tol;
    if (!below_equal) {
      // a further value hides inside (current, current + delta): shrink
      delta *= 0.5;
      continue;
    }

    LevelOutcome above = solve_level(problem, LevelPhase::Above, bound, settings);
    if (above.status == LevelStatus::Infeasible) {
      out.kind = NextLevelResult::Kind::Complete;
      out.delta_used = delta;
      out.completeness.delta = delta;
      out.completeness.infeasibility_order = above.order;
      out.completeness.certificate_verified = above.infeasibility_verified;
      out.completeness.below_value = below.value;
      return out;
    }
    if (above.status == LevelStatus::ConvergedFlat || above.status == LevelStatus::ConvergedValue) {
      out.kind = NextLevelResult::Kind::Found;
      out.above = std::move(above);
      out.above.delta_used = delta;
      out.delta_used = delta;
      return out;
    }
    if (above.status == LevelStatus::Unresolved) {
      out.kind = NextLevelResult::Kind::Unresolved;
      return out;
    }
    out.kind = NextLevelResult::Kind::Failure;
    return out;
  }
  out.kind = NextLevelResult::Kind::GapTooSmall;
  return out;
}

namespace {

HierarchyLevel make_level(int index, const HierarchyProblem& problem,
                          const EngineSettings& settings, const LevelOutcome& outcome) {
  HierarchyLevel lvl;
  lvl.index = index;
  lvl.value = outcome.value;
  lvl.order_used = outcome.order;
  lvl.delta_used = outcome.delta_used;
  lvl.flatness = outcome.flatness;
  lvl.certificate = outcome.certificate;
  const Polynomial f = scaled_objective(problem, settings);
  const std::vector<Polynomial> h = active_equalities(problem);
  for (const auto& u : outcome.atoms) {
    StationaryPoint sp;
    sp.point = u;
    sp.value = f.evaluate(u);
    try {
      sp.classification = classify(u, f, h, settings, &sp);
    } catch (const std::exception&) {
      sp.classification = Classification::Degenerate;
    }
    lvl.points.push_back(std::move(sp));
  }
  return lvl;
}

}  // namespace

HierarchyReport full_hierarchy(const HierarchyProblem& problem, const EngineSettings& settings) {
  HierarchyReport rep;
  rep.problem_echo = problem.f.to_string();
  rep.hypotheses_note =
      "completeness subject to generic-case hypotheses (finiteness/compactness of the "
      "critical set) that are not checkable at runtime";

  LevelOutcome first = solve_level(problem, LevelPhase::First, std::nullopt, settings);
  if (first.status == LevelStatus::Infeasible) {
    rep.no_minimizers = true;
    rep.nonexistence_order = first.order;
    rep.terminal_status = TerminalStatus::ProvedComplete;
    return rep;
  }
  if (first.status == LevelStatus::Failure) {
    rep.terminal_status = TerminalStatus::SolverFailure;
    return rep;
  }
  if (first.status == LevelStatus::Unresolved) {
    rep.terminal_status = TerminalStatus::MaxOrderReached;
    return rep;
  }

  LevelOutcome current = std::move(first);
  int r = 1;
  while (true) {
    rep.levels.push_back(make_level(r, problem, settings, current));
    if (r >= settings.max_levels) {
      rep.terminal_status = TerminalStatus::MaxOrderReached;
      return rep;
    }
    NextLevelResult nl = next_level(problem, current.value, settings.delta0, settings);
    switch (nl.kind) {
      case NextLevelResult::Kind::Found: {
        if (nl.above.value <= current.value) {
          rep.terminal_status = TerminalStatus::SolverFailure;
          return rep;
        }
        current = std::move(nl.above);
        ++r;
        break;
      }
      case NextLevelResult::Kind::Complete:
        rep.completeness = nl.completeness;
        rep.terminal_status = TerminalStatus::ProvedComplete;
        return rep;
      case NextLevelResult::Kind::GapTooSmall:
        rep.terminal_status = TerminalStatus::GapTooSmall;
        return rep;
      case NextLevelResult::Kind::Unresolved:
        rep.terminal_status = TerminalStatus::MaxOrderReached;
        return rep;
      case NextLevelResult::Kind::Failure:
        rep.terminal_status = TerminalStatus::SolverFailure;
        return rep;
    }
  }
}

}  // namespace hierarchia
