#include "hierarchia/relaxation.hpp"

#include <stdexcept>

namespace hierarchia {

namespace {

int half_up(int d) { return (std::max(d, 0) + 1) / 2; }

Polynomial unit_scaled(const Polynomial& p) {
  const double s = p.coeff_inf_norm();
  return s > 0.0 ? p * (1.0 / s) : p;
}

// Assembles the common program shape: variables y over N^n_{2k}, the
// normalization row, one moment-matrix block, localizing equalities emitted
// row-by-row (deduplicated by exponent sum), localizing LMI blocks for the
// inequalities and an optional block-localizing LMI.
struct ProgramAssembler {
  int n;
  int k;
  std::shared_ptr<const MonomialBasis> vars;
  LinearMatrixProgram prog;

  ProgramAssembler(int n_, int k_) : n(n_), k(k_) {
    vars = std::make_shared<const MonomialBasis>(n, 2 * k);
    prog.num_vars = vars->size();
    prog.var_index = vars;
    prog.objective = Eigen::VectorXd::Zero(prog.num_vars);
    EqualityRow norm_row;
    norm_row.coeffs.emplace_back(vars->index_of(Exponent(n, 0)), 1.0);
    norm_row.rhs = 1.0;
    prog.equalities.push_back(std::move(norm_row));
    add_moment_block();
  }

  void set_objective(const Polynomial& f) {
    for (const auto& [a, c] : f.terms()) {
      const int idx = vars->index_of(a);
      if (idx < 0) throw std::invalid_argument("objective degree exceeds 2k");
      prog.objective[idx] += c;
    }
  }

  void add_moment_block() {
    MonomialBasis rows(n, k);
    LmiBlock blk;
    blk.name = "moment";
    blk.size = rows.size();
    blk.F0 = Eigen::MatrixXd::Zero(blk.size, blk.size);
    blk.vars.resize(prog.num_vars);
    for (int i = 0; i < rows.size(); ++i) {
      for (int j = i; j < rows.size(); ++j) {
        const int idx = vars->index_of(exponent_sum(rows[i], rows[j]));
        blk.vars[idx].push_back({i, j, 1.0});
      }
    }
    prog.blocks.push_back(std::move(blk));
  }

  void add_localizing_block(const Polynomial& q, const std::string& name) {
    const int dq = half_up(q.degree());
    if (k - dq < 0) throw std::invalid_argument("order too small for localizing block");
    MonomialBasis rows(n, k - dq);
    LmiBlock blk;
    blk.name = name;
    blk.size = rows.size();
    blk.F0 = Eigen::MatrixXd::Zero(blk.size, blk.size);
    blk.vars.resize(prog.num_vars);
    for (int i = 0; i < rows.size(); ++i) {
      for (int j = i; j < rows.size(); ++j) {
        const Exponent ab = exponent_sum(rows[i], rows[j]);
        for (const auto& [g, c] : q.terms()) {
          const int idx = vars->index_of(exponent_sum(g, ab));
          blk.vars[idx].push_back({i, j, c});
        }
      }
    }
    prog.blocks.push_back(std::move(blk));
  }

  void add_block_localizing(const SymmetricMatrixPolynomial& H, const std::string& name) {
    const int dH = std::max(1, half_up(H.degree()));
    if (k - dH < 0) throw std::invalid_argument("order too small for matrix localizing block");
    MonomialBasis rows(n, k - dH);
    const int s = rows.size();
    const int ell = H.size();
    LmiBlock blk;
    blk.name = name;
    blk.size = ell * s;
    blk.F0 = Eigen::MatrixXd::Zero(blk.size, blk.size);
    blk.vars.resize(prog.num_vars);
    for (int bi = 0; bi < ell; ++bi) {
      for (int bj = bi; bj < ell; ++bj) {
        const Polynomial& q = H.at(bi, bj);
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            const int r = bi * s + i;
            const int c = bj * s + j;
            if (r > c) continue;
            const Exponent ab = exponent_sum(rows[i], rows[j]);
            for (const auto& [g, cf] : q.terms()) {
              const int idx = vars->index_of(exponent_sum(g, ab));
              blk.vars[idx].push_back({r, c, cf});
            }
          }
        }
      }
    }
    prog.blocks.push_back(std::move(blk));
  }

  void add_localizing_equalities(const Polynomial& q) {
    const int dq = q.degree();
    if (2 * k - dq < 0) throw std::invalid_argument("order too small for localizing equality");
    // The functional must annihilate the whole degree-2k truncation of the
    // ideal: one row per multiplier monomial gamma with deg(q * x^gamma) <= 2k.
    // Rows of the localizing matrix with matching exponent sums coincide, so
    // this emission is already deduplicated.
    MonomialBasis sums(n, 2 * k - dq);
    for (int r = 0; r < sums.size(); ++r) {
      EqualityRow row;
      row.rhs = 0.0;
      for (const auto& [g, c] : q.terms()) {
        row.coeffs.emplace_back(vars->index_of(exponent_sum(g, sums[r])), c);
      }
      prog.equalities.push_back(std::move(row));
    }
  }
};

BuiltRelaxation finish(ProgramAssembler& asmbl, RelaxationMeta meta) {
  meta.n = asmbl.n;
  meta.order = asmbl.k;
  int d = 1;
  for (const auto& q : meta.equalities) d = std::max(d, half_up(q.degree()));
  for (const auto& q : meta.inequalities) d = std::max(d, half_up(q.degree()));
  if (meta.pmi) d = std::max(d, half_up(meta.pmi->degree()));
  meta.d_star = d;
  return {std::move(asmbl.prog), std::move(meta)};
}

}  // namespace

Polynomial append_localizing_block(LinearMatrixProgram& prog, const Polynomial& q, int k,
                                   const std::string& name) {
  if (!prog.var_index) throw std::invalid_argument("program carries no monomial index");
  const Polynomial qs = unit_scaled(q);
  const int dq = half_up(qs.degree());
  if (k - dq < 0) throw std::invalid_argument("order too small for localizing block");
  MonomialBasis rows(qs.vars(), k - dq);
  LmiBlock blk;
  blk.name = name;
  blk.size = rows.size();
  blk.F0 = Eigen::MatrixXd::Zero(blk.size, blk.size);
  blk.vars.resize(prog.num_vars);
  for (int i = 0; i < rows.size(); ++i) {
    for (int j = i; j < rows.size(); ++j) {
      const Exponent ab = exponent_sum(rows[i], rows[j]);
      for (const auto& [g, c] : qs.terms()) {
        blk.vars[prog.var_index->index_of(exponent_sum(g, ab))].push_back({i, j, c});
      }
    }
  }
  prog.blocks.push_back(std::move(blk));
  return qs;
}

int min_order_hmin(const Polynomial& f) {
  const int df = std::max(f.degree(), 1);
  int k = half_up(df);
  k = std::max(k, half_up(df - 1));
  k = std::max(k, std::max(1, half_up(df - 2)) + 1);  // matrix block must be nonempty
  return std::max(k, 1);
}

int min_order_critical(const Polynomial& f, const std::vector<Polynomial>& h) {
  int k = half_up(std::max(f.degree(), 1));
  for (const auto& hi : h) k = std::max(k, half_up(hi.degree()));
  for (const auto& phi : critical_minors(f, h)) k = std::max(k, half_up(phi.degree()));
  return std::max(k, 1);
}

int min_order_ball(const Polynomial& f, const std::vector<Polynomial>& h) {
  int k = std::max(1, half_up(f.degree()));
  for (const auto& hi : h) k = std::max(k, half_up(hi.degree()));
  return k;
}

int min_order_closed_set(const Polynomial& f, const Polynomial& g) {
  int k = std::max(1, half_up(f.degree()));
  k = std::max(k, half_up(g.degree()));
  k = std::max(k, half_up(std::max(f.degree() - 1, 0) + std::max(g.degree(), 0)));
  k = std::max(k, half_up(std::max(f.degree() - 1, 0) + std::max(g.degree() - 1, 0)));
  return k;
}

BuiltRelaxation build_hmin_first(const Polynomial& f, int k) {
  if (k < min_order_hmin(f)) throw std::invalid_argument("order below minimal for H-min relaxation");
  ProgramAssembler a(f.vars(), k);
  RelaxationMeta meta;
  meta.kind = RelaxationKind::HMinFirst;
  meta.objective = f;
  const double sf = f.coeff_inf_norm();
  meta.objective_scale = sf > 0.0 ? sf : 1.0;
  a.set_objective(f * (1.0 / meta.objective_scale));

  for (const auto& gi : gradient(f)) {
    if (gi.is_zero()) continue;
    const Polynomial gs = unit_scaled(gi);
    a.add_localizing_equalities(gs);
    meta.equalities.push_back(gs);
  }
  SymmetricMatrixPolynomial H = hessian(f);
  double sh = 0.0;
  for (int i = 0; i < H.size(); ++i) {
    for (int j = i; j < H.size(); ++j) sh = std::max(sh, H.at(i, j).coeff_inf_norm());
  }
  if (sh > 0.0) {
    SymmetricMatrixPolynomial Hs(H.vars(), H.size());
    for (int i = 0; i < H.size(); ++i) {
      for (int j = i; j < H.size(); ++j) Hs.set(i, j, H.at(i, j) * (1.0 / sh));
    }
    H = Hs;
  }
  a.add_block_localizing(H, "hessian");
  meta.pmi = H;
  return finish(a, std::move(meta));
}

BuiltRelaxation build_hmin_above(const Polynomial& f, double bound, int k) {
  auto [prog, meta] = build_hmin_first(f, k);
  const Polynomial above =
      append_localizing_block(prog, f - Polynomial::constant(f.vars(), bound), k, "above-bound");
  meta.kind = RelaxationKind::HMinAbove;
  meta.bound = bound;
  meta.inequalities.push_back(above);
  meta.d_star = std::max(meta.d_star, half_up(above.degree()));
  return {std::move(prog), std::move(meta)};
}

BuiltRelaxation build_hmax_below(const Polynomial& f, double bound, int k) {
  auto [prog, meta] = build_hmin_first(f, k);
  prog.objective = -prog.objective;
  const Polynomial below =
      append_localizing_block(prog, Polynomial::constant(f.vars(), bound) - f, k, "below-bound");
  meta.kind = RelaxationKind::HMaxBelow;
  meta.bound = bound;
  meta.maximize = true;
  meta.inequalities.push_back(below);
  meta.d_star = std::max(meta.d_star, half_up(below.degree()));
  return {std::move(prog), std::move(meta)};
}

BuiltRelaxation build_critical_first(const Polynomial& f, const std::vector<Polynomial>& h,
                                     int k) {
  if (k < min_order_critical(f, h)) {
    throw std::invalid_argument("order below minimal for critical relaxation");
  }
  ProgramAssembler a(f.vars(), k);
  RelaxationMeta meta;
  meta.kind = h.empty() ? RelaxationKind::UnconstrainedCritical : RelaxationKind::CriticalFirst;
  meta.objective = f;
  const double sf = f.coeff_inf_norm();
  meta.objective_scale = sf > 0.0 ? sf : 1.0;
  a.set_objective(f * (1.0 / meta.objective_scale));

  for (const auto& hi : h) {
    const Polynomial hs = unit_scaled(hi);
    a.add_localizing_equalities(hs);
    meta.equalities.push_back(hs);
  }
  for (const auto& phi : critical_minors(f, h)) {
    if (phi.is_zero()) continue;
    const Polynomial ps = unit_scaled(phi);
    a.add_localizing_equalities(ps);
    meta.equalities.push_back(ps);
  }
  return finish(a, std::move(meta));
}

BuiltRelaxation build_critical_above(const Polynomial& f, const std::vector<Polynomial>& h,
                                     double bound, int k) {
  auto [prog, meta] = build_critical_first(f, h, k);
  const Polynomial above =
      append_localizing_block(prog, f - Polynomial::constant(f.vars(), bound), k, "above-bound");
  meta.kind = RelaxationKind::CriticalAbove;
  meta.bound = bound;
  meta.inequalities.push_back(above);
  meta.d_star = std::max(meta.d_star, half_up(above.degree()));
  return {std::move(prog), std::move(meta)};
}

BuiltRelaxation build_critical_max_below(const Polynomial& f, const std::vector<Polynomial>& h,
                                         double bound, int k) {
  auto [prog, meta] = build_critical_first(f, h, k);
  prog.objective = -prog.objective;
  const Polynomial below =
      append_localizing_block(prog, Polynomial::constant(f.vars(), bound) - f, k, "below-bound");
  meta.kind = RelaxationKind::CriticalMaxBelow;
  meta.bound = bound;
  meta.maximize = true;
  meta.inequalities.push_back(below);
  meta.d_star = std::max(meta.d_star, half_up(below.degree()));
  return {std::move(prog), std::move(meta)};
}

BuiltRelaxation build_ball_verification(const Polynomial& f, const std::vector<Polynomial>& h,
                                        const Eigen::VectorXd& u, double rho, int k) {
  if (!(rho > 0.0)) throw std::invalid_argument("ball radius must be positive");
  const int n = f.vars();
  if (u.size() != n) throw std::invalid_argument("center dimension mismatch");
  if (k < min_order_ball(f, h)) throw std::invalid_argument("order below minimal for ball relaxation");
  ProgramAssembler a(n, k);
  RelaxationMeta meta;
  meta.kind = RelaxationKind::BallVerify;
  meta.objective = f;
  const double sf = f.coeff_inf_norm();
  meta.objective_scale = sf > 0.0 ? sf : 1.0;
  a.set_objective(f * (1.0 / meta.objective_scale));

  for (const auto& hi : h) {
    const Polynomial hs = unit_scaled(hi);
    a.add_localizing_equalities(hs);
    meta.equalities.push_back(hs);
  }
  Polynomial ball = Polynomial::constant(n, rho * rho);
  for (int i = 0; i < n; ++i) {
    Polynomial d = Polynomial::variable(n, i) - Polynomial::constant(n, u[i]);
    ball -= d * d;
  }
  const Polynomial bs = unit_scaled(ball);
  a.add_localizing_block(bs, "ball");
  meta.inequalities.push_back(bs);
  return finish(a, std::move(meta));
}

BuiltRelaxation build_open_set_hmin(const Polynomial& f, const std::vector<Polynomial>& g,
                                    std::optional<double> bound, int k) {
  auto [prog, meta] = bound ? build_hmin_above(f, *bound, k) : build_hmin_first(f, k);
  for (const auto& gi : g) {
    const Polynomial gs = append_localizing_block(prog, gi, k, "open-set");
    meta.inequalities.push_back(gs);
    meta.d_star = std::max(meta.d_star, half_up(gs.degree()));
  }
  meta.kind = RelaxationKind::OpenSetHMin;
  return {std::move(prog), std::move(meta)};
}

BuiltRelaxation build_closed_set_critical(const Polynomial& f, const Polynomial& g,
                                          std::optional<double> bound, int k) {
  const int n = f.vars();
  if (k < min_order_closed_set(f, g)) {
    throw std::invalid_argument("order below minimal for closed-set relaxation");
  }
  ProgramAssembler a(n, k);
  RelaxationMeta meta;
  meta.kind = RelaxationKind::ClosedSetCritical;
  meta.objective = f;
  const double sf = f.coeff_inf_norm();
  meta.objective_scale = sf > 0.0 ? sf : 1.0;
  a.set_objective(f * (1.0 / meta.objective_scale));

  const auto gf = gradient(f);
  const auto gg = gradient(g);
  for (int i = 0; i < n; ++i) {
    const Polynomial q = g * gf[i];
    if (q.is_zero()) continue;
    const Polynomial qs = unit_scaled(q);
    a.add_localizing_equalities(qs);
    meta.equalities.push_back(qs);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Polynomial minor = gf[i] * gg[j] - gf[j] * gg[i];
      if (minor.is_zero()) continue;
      const Polynomial ms = unit_scaled(minor);
      a.add_localizing_equalities(ms);
      meta.equalities.push_back(ms);
    }
  }
  const Polynomial gsc = unit_scaled(g);
  a.add_localizing_block(gsc, "set");
  meta.inequalities.push_back(gsc);
  if (bound) {
    const Polynomial above = unit_scaled(f - Polynomial::constant(n, *bound));
    a.add_localizing_block(above, "above-bound");
    meta.inequalities.push_back(above);
    meta.bound = bound;
  }
  return finish(a, std::move(meta));
}

}  // namespace hierarchia
