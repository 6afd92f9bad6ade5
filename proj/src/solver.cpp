#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hierarchia/program.hpp"

// Homogeneous self-dual interior-point method with Nesterov-Todd scaling for
// the cone form  min c'x  s.t.  s = g0 + G x,  s in a product of PSD cones.
// Equalities of the original program are eliminated beforehand by the
// nullspace reparameterization y = y0 + Z t, so x here is the reduced t.

namespace hierarchia {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int packed_size(int s) { return s * (s + 1) / 2; }

void pack_sym(const MatrixXd& A, double* out) {
  const int s = static_cast<int>(A.rows());
  const double rt2 = std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < s; ++i) {
    out[idx++] = A(i, i);
    for (int j = i + 1; j < s; ++j) out[idx++] = rt2 * 0.5 * (A(i, j) + A(j, i));
  }
}

void unpack_sym(const double* in, MatrixXd& A) {
  const int s = static_cast<int>(A.rows());
  const double irt2 = 1.0 / std::sqrt(2.0);
  int idx = 0;
  for (int i = 0; i < s; ++i) {
    A(i, i) = in[idx++];
    for (int j = i + 1; j < s; ++j) {
      const double v = in[idx++] * irt2;
      A(i, j) = v;
      A(j, i) = v;
    }
  }
}

double sym_dot(const MatrixXd& A, const MatrixXd& B) { return (A.array() * B.array()).sum(); }

struct ConeData {
  std::vector<int> sizes;
  std::vector<MatrixXd> G0;       // per block, symmetric
  std::vector<MatrixXd> PackedG;  // per block, packed_size x m
  VectorXd c;
  int m = 0;
  int degree = 0;  // sum of block sizes

  double g0_norm() const {
    double s = 0.0;
    for (const auto& g : G0) s += g.squaredNorm();
    return std::sqrt(s);
  }
};

struct Scaling {
  std::vector<MatrixXd> R, Rinv, Winv;
  std::vector<VectorXd> lambda;
  double lambda_tk = 0.0;  // sqrt(tau*kappa)
};

struct Point {
  VectorXd x;
  std::vector<MatrixXd> S, Z;
  double tau = 1.0, kappa = 1.0;
};

struct Direction {
  VectorXd dx;
  std::vector<MatrixXd> dS, dZ;
  double dtau = 0.0, dkappa = 0.0;
};

bool compute_scaling(const Point& pt, Scaling& W) {
  const std::size_t nb = pt.S.size();
  W.R.resize(nb);
  W.Rinv.resize(nb);
  W.Winv.resize(nb);
  W.lambda.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    Eigen::LLT<MatrixXd> lltS(pt.S[b]);
    Eigen::LLT<MatrixXd> lltZ(pt.Z[b]);
    if (lltS.info() != Eigen::Success || lltZ.info() != Eigen::Success) return false;
    MatrixXd Ls = lltS.matrixL();
    MatrixXd Lz = lltZ.matrixL();
    Eigen::BDCSVD<MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd sv = svd.singularValues();
    if (sv.minCoeff() <= 0.0) return false;
    VectorXd si = sv.array().sqrt().inverse();
    W.R[b] = Ls * svd.matrixV() * si.asDiagonal();
    W.Rinv[b] = si.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    W.Winv[b] = W.Rinv[b].transpose() * W.Rinv[b];
    W.lambda[b] = sv;
  }
  W.lambda_tk = std::sqrt(pt.tau * pt.kappa);
  return true;
}

// Largest t with lambda + t*D psd, where D is the NT-scaled direction.
double max_step_scaled(const VectorXd& lambda, const MatrixXd& D) {
  VectorXd li = lambda.array().sqrt().inverse();
  MatrixXd A = li.asDiagonal() * D * li.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (A + A.transpose()), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (-lmin);
}

struct IpmWork {
  MatrixXd Mchol;  // cholesky factor storage
  Eigen::LLT<MatrixXd> llt;
  std::vector<MatrixXd> WinvG0Winv;
  VectorXd u_g0;  // G' svec(Winv G0 Winv)
  VectorXd q2;
};

VectorXd gather(const ConeData& cd, const std::vector<MatrixXd>& mats) {
  VectorXd out = VectorXd::Zero(cd.m);
  std::vector<double> buf;
  for (std::size_t b = 0; b < cd.G0.size(); ++b) {
    const int p = packed_size(cd.sizes[b]);
    buf.resize(p);
    pack_sym(mats[b], buf.data());
    Eigen::Map<const VectorXd> v(buf.data(), p);
    out.noalias() += cd.PackedG[b].transpose() * v;
  }
  return out;
}

// mats_b += coeff * mat(G_b x)
void scatter_add(const ConeData& cd, const VectorXd& x, std::vector<MatrixXd>& mats,
                 double coeff = 1.0) {
  for (std::size_t b = 0; b < cd.G0.size(); ++b) {
    VectorXd v = cd.PackedG[b] * x;
    MatrixXd A(cd.sizes[b], cd.sizes[b]);
    unpack_sym(v.data(), A);
    mats[b] += coeff * A;
  }
}

double block_dot(const std::vector<MatrixXd>& A, const std::vector<MatrixXd>& B) {
  double s = 0.0;
  for (std::size_t b = 0; b < A.size(); ++b) s += sym_dot(A[b], B[b]);
  return s;
}

}  // namespace

namespace detail {

struct ConeSolveResult {
  SdpStatus status = SdpStatus::NumericalFailure;
  VectorXd x;
  std::vector<MatrixXd> Z;  // dual blocks, tau-normalized on Optimal
  double tau = 0.0, kappa = 0.0;
  int iterations = 0;
  double pres = 0.0, dres = 0.0, gap = 0.0;
  double pinfres = std::numeric_limits<double>::infinity();
  double dinfres = std::numeric_limits<double>::infinity();
  std::vector<MatrixXd> inf_cert;  // primal-infeasibility certificate blocks
  VectorXd unbounded_ray;
};

ConeSolveResult solve_cone_program(const ConeData& cd, const SolverSettings& st) {
  ConeSolveResult out;
  const int m = cd.m;
  const std::size_t nb = cd.G0.size();

  Point pt;
  pt.x = VectorXd::Zero(m);
  pt.S.resize(nb);
  pt.Z.resize(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    pt.S[b] = MatrixXd::Identity(cd.sizes[b], cd.sizes[b]);
    pt.Z[b] = MatrixXd::Identity(cd.sizes[b], cd.sizes[b]);
  }

  const double resc = std::max(1.0, cd.c.norm());
  const double resg0 = std::max(1.0, cd.g0_norm());
  const int deg = cd.degree + 1;

  Scaling W;
  IpmWork wk;
  std::vector<MatrixXd> rp(nb);
  // Best near-feasible iterate, kept as a fallback when late iterations
  // break down before the strict tolerances are met.
  struct Snapshot {
    double score = std::numeric_limits<double>::infinity();
    VectorXd x;
    std::vector<MatrixXd> Z;
    double tau = 1.0;
    double pres = 0.0, dres = 0.0, gap = 0.0;
  } best;
  struct InfSnapshot {
    double pinfres = std::numeric_limits<double>::infinity();
    std::vector<MatrixXd> cert;
  } best_inf;
  int stall_count = 0;
  double progress_mark = std::numeric_limits<double>::infinity();
  int since_progress = 0;
  Direction daff, dcmb;
  daff.dS.resize(nb);
  daff.dZ.resize(nb);
  dcmb.dS.resize(nb);
  dcmb.dZ.resize(nb);

  auto residuals = [&](VectorXd& rd, std::vector<MatrixXd>& rpb, double& rg) {
    rd = gather(cd, pt.Z) - cd.c * pt.tau;
    for (std::size_t b = 0; b < nb; ++b) rpb[b] = pt.S[b] - cd.G0[b] * pt.tau;
    scatter_add(cd, pt.x, rpb, -1.0);
    double g0z = 0.0;
    for (std::size_t b = 0; b < nb; ++b) g0z += sym_dot(cd.G0[b], pt.Z[b]);
    rg = pt.kappa + cd.c.dot(pt.x) + g0z;
  };

  for (int iter = 0; iter <= st.max_iterations; ++iter) {
    out.iterations = iter;

    VectorXd rd;
    double rg;
    residuals(rd, rp, rg);
    double rp_norm = 0.0;
    for (const auto& M : rp) rp_norm += M.squaredNorm();
    rp_norm = std::sqrt(rp_norm);

    const double sz = block_dot(pt.S, pt.Z);
    const double mu = (sz + pt.tau * pt.kappa) / deg;
    const double gap = sz / pt.tau / pt.tau;
    double g0z = 0.0;
    for (std::size_t b = 0; b < nb; ++b) g0z += sym_dot(cd.G0[b], pt.Z[b]);
    const double pcost = cd.c.dot(pt.x) / pt.tau;
    const double dcost = -g0z / pt.tau;
    const double relgap = gap / std::max(1.0, std::abs(pcost));

    out.pres = rp_norm / pt.tau / resg0;
    out.dres = rd.norm() / pt.tau / resc;
    out.gap = gap;

    // Certificate quality for the two infeasibility directions.
    const double cx = cd.c.dot(pt.x);
    if (g0z < 0.0) {
      out.pinfres = (gather(cd, pt.Z)).norm() / (-g0z) / resc;
    } else {
      out.pinfres = std::numeric_limits<double>::infinity();
    }
    if (cx < 0.0) {
      double s = 0.0;
      std::vector<MatrixXd> ray = pt.S;
      scatter_add(cd, pt.x, ray, -1.0);
      for (const auto& M : ray) s += M.squaredNorm();
      out.dinfres = std::sqrt(s) / (-cx) / resg0;
    } else {
      out.dinfres = std::numeric_limits<double>::infinity();
    }

    if (st.verbose) {
      std::printf("it %3d  pcost % .6e dcost % .6e gap %.2e pres %.2e dres %.2e tau %.2e kap %.2e\n",
                  iter, pcost, dcost, gap, out.pres, out.dres, pt.tau, pt.kappa);
    }

    {
      const double score = std::max({out.pres, out.dres, std::min(relgap, gap)});
      if (score < best.score) {
        best.score = score;
        best.x = pt.x / pt.tau;
        best.Z.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) best.Z[b] = pt.Z[b] / pt.tau;
        best.tau = pt.tau;
        best.pres = out.pres;
        best.dres = out.dres;
        best.gap = gap;
      }
      if (g0z < 0.0 && out.pinfres < best_inf.pinfres) {
        best_inf.pinfres = out.pinfres;
        best_inf.cert.resize(nb);
        for (std::size_t b = 0; b < nb; ++b) best_inf.cert[b] = pt.Z[b] / (-g0z);
      }
    }

    auto finish_fail = [&](SdpStatus s) {
      out.status = s;
      if (best_inf.pinfres <= st.certificate_tol) {
        out.status = SdpStatus::PrimalInfeasible;
        out.inf_cert = best_inf.cert;
        out.pinfres = best_inf.pinfres;
        return out;
      }
      if (best.x.size() > 0) {
        out.x = best.x;
        out.Z = best.Z;
        out.tau = best.tau;
        out.pres = best.pres;
        out.dres = best.dres;
        out.gap = best.gap;
      }
      return out;
    };

    if (out.pres <= st.feas_tol && out.dres <= st.feas_tol &&
        (gap <= st.gap_tol * std::max(1.0, std::abs(pcost)) || relgap <= st.gap_tol)) {
      out.status = SdpStatus::Optimal;
      out.x = pt.x / pt.tau;
      out.Z.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) out.Z[b] = pt.Z[b] / pt.tau;
      out.tau = pt.tau;
      out.kappa = pt.kappa;
      return out;
    }
    if (out.pinfres <= st.certificate_tol) {
      out.status = SdpStatus::PrimalInfeasible;
      out.inf_cert.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) out.inf_cert[b] = pt.Z[b] / (-g0z);
      return out;
    }
    if (out.dinfres <= st.certificate_tol) {
      out.status = SdpStatus::DualUnbounded;
      out.unbounded_ray = pt.x / (-cx);
      return out;
    }
    if (iter == st.max_iterations) return finish_fail(SdpStatus::MaxIterations);

    // Abandon runs that stopped making headway on every front.
    {
      const double mark = std::min({best.score, best_inf.pinfres, out.dinfres});
      if (mark < 0.99 * progress_mark) {
        progress_mark = mark;
        since_progress = 0;
      } else if (++since_progress >= 40) {
        return finish_fail(SdpStatus::NumericalFailure);
      }
    }

    if (!compute_scaling(pt, W)) return finish_fail(SdpStatus::NumericalFailure);

    // Schur complement M = G' (Winv (.) Winv) G, shared by both directions.
    MatrixXd M = MatrixXd::Zero(m, m);
    {
      std::vector<double> buf;
      for (std::size_t b = 0; b < nb; ++b) {
        const int s = cd.sizes[b];
        const int p = packed_size(s);
        MatrixXd T(p, m);
        MatrixXd A(s, s), U(s, s);
        buf.resize(p);
        for (int j = 0; j < m; ++j) {
          unpack_sym(cd.PackedG[b].col(j).data(), A);
          U.noalias() = W.Winv[b] * A * W.Winv[b];
          U = 0.5 * (U + U.transpose());
          pack_sym(U, buf.data());
          T.col(j) = Eigen::Map<const VectorXd>(buf.data(), p);
        }
        M.noalias() += T.transpose() * cd.PackedG[b];
      }
      M = 0.5 * (M + M.transpose());
    }
    double ridge = 0.0;
    wk.llt.compute(M);
    while (wk.llt.info() != Eigen::Success) {
      ridge = ridge == 0.0 ? 1e-12 * std::max(1.0, M.trace() / m) : ridge * 100;
      if (ridge > 1e-4 * std::max(1.0, M.trace() / m)) {
        return finish_fail(SdpStatus::NumericalFailure);
      }
      wk.llt.compute(M + ridge * MatrixXd::Identity(m, m));
    }
    auto msolve = [&](const VectorXd& rhs) {
      VectorXd sol = wk.llt.solve(rhs);
      sol += wk.llt.solve(rhs - M * sol);
      sol += wk.llt.solve(rhs - M * sol);
      return sol;
    };

    wk.WinvG0Winv.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      MatrixXd U = W.Winv[b] * cd.G0[b] * W.Winv[b];
      wk.WinvG0Winv[b] = 0.5 * (U + U.transpose());
    }
    wk.u_g0 = gather(cd, wk.WinvG0Winv);
    wk.q2 = msolve(wk.u_g0 + cd.c);

    // One Newton direction for given residual scale eta, centering sigma and
    // correction terms (Mehrotra).
    auto newton = [&](double eta, double sigma, const std::vector<MatrixXd>* corr,
                      double corr_tk, Direction& d) -> bool {
      const double mu_t = sigma * mu;
      // Scaled complementarity rhs: Dcomp = mu_t I - Lambda^2 - corr
      // Dct = Lop^-1(Dcomp).
      std::vector<MatrixXd> RDctRt(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        const int s = cd.sizes[b];
        MatrixXd Dcomp = MatrixXd::Zero(s, s);
        for (int i = 0; i < s; ++i) Dcomp(i, i) = mu_t - W.lambda[b][i] * W.lambda[b][i];
        if (corr) Dcomp -= (*corr)[b];
        MatrixXd Dct(s, s);
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            Dct(i, j) = 2.0 * Dcomp(i, j) / (W.lambda[b][i] + W.lambda[b][j]);
          }
        }
        RDctRt[b] = W.R[b] * Dct * W.R[b].transpose();
        RDctRt[b] = 0.5 * (RDctRt[b] + RDctRt[b].transpose());
      }

      // Dp_b = -eta * rp_b ; dd = -eta * rd ; dg = -eta * rg
      // A_b := RDctRt_b - Dp_b - G q1-part handled below.
      std::vector<MatrixXd> Abase(nb);
      for (std::size_t b = 0; b < nb; ++b) Abase[b] = RDctRt[b] + eta * rp[b];

      std::vector<MatrixXd> WAW(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        MatrixXd U = W.Winv[b] * Abase[b] * W.Winv[b];
        WAW[b] = 0.5 * (U + U.transpose());
      }
      VectorXd v1 = gather(cd, WAW);
      VectorXd q1 = msolve(v1 + eta * rd);

      // dz(dtau) = Winv(Abase - G q1)Winv + dtau * Winv(G q2 - G0)Winv
      std::vector<MatrixXd> Z1(nb), Z2(nb);
      {
        std::vector<MatrixXd> t1 = Abase;
        scatter_add(cd, q1, t1, -1.0);
        std::vector<MatrixXd> t2(nb);
        for (std::size_t b = 0; b < nb; ++b) t2[b] = -cd.G0[b];
        scatter_add(cd, wk.q2, t2, 1.0);
        for (std::size_t b = 0; b < nb; ++b) {
          MatrixXd U = W.Winv[b] * t1[b] * W.Winv[b];
          Z1[b] = 0.5 * (U + U.transpose());
          U = W.Winv[b] * t2[b] * W.Winv[b];
          Z2[b] = 0.5 * (U + U.transpose());
        }
      }

      const double dg = -eta * rg;
      const double dtk = sigma * mu - pt.tau * pt.kappa - corr_tk;
      double g0Z1 = 0.0, g0Z2 = 0.0;
      for (std::size_t b = 0; b < nb; ++b) {
        g0Z1 += sym_dot(cd.G0[b], Z1[b]);
        g0Z2 += sym_dot(cd.G0[b], Z2[b]);
      }
      const double denom = pt.kappa + pt.tau * cd.c.dot(wk.q2) - pt.tau * g0Z2;
      if (std::abs(denom) < 1e-300) return false;
      d.dtau = (dtk - pt.tau * dg + pt.tau * cd.c.dot(q1) + pt.tau * g0Z1) / denom;
      d.dx = q1 - wk.q2 * d.dtau;
      for (std::size_t b = 0; b < nb; ++b) {
        d.dZ[b] = Z1[b] + d.dtau * Z2[b];
        d.dS[b] = -eta * rp[b] + cd.G0[b] * d.dtau;
      }
      scatter_add(cd, d.dx, d.dS, 1.0);
      double g0dz = 0.0;
      for (std::size_t b = 0; b < nb; ++b) g0dz += sym_dot(cd.G0[b], d.dZ[b]);
      d.dkappa = dg - cd.c.dot(d.dx) - g0dz;
      return true;
    };

    auto max_step = [&](const Direction& d) {
      double a = std::numeric_limits<double>::infinity();
      for (std::size_t b = 0; b < nb; ++b) {
        MatrixXd Ds = W.Rinv[b] * d.dS[b] * W.Rinv[b].transpose();
        MatrixXd Dz = W.R[b].transpose() * d.dZ[b] * W.R[b];
        a = std::min(a, max_step_scaled(W.lambda[b], 0.5 * (Ds + Ds.transpose())));
        a = std::min(a, max_step_scaled(W.lambda[b], 0.5 * (Dz + Dz.transpose())));
      }
      if (d.dtau < 0.0) a = std::min(a, -pt.tau / d.dtau);
      if (d.dkappa < 0.0) a = std::min(a, -pt.kappa / d.dkappa);
      return a;
    };

    if (!newton(1.0, 0.0, nullptr, 0.0, daff)) return finish_fail(SdpStatus::NumericalFailure);
    const double a_aff = std::min(1.0, max_step(daff));

    // Centering weight from the affine trial point.
    double sz_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      sz_aff += sym_dot(pt.S[b] + a_aff * daff.dS[b], pt.Z[b] + a_aff * daff.dZ[b]);
    }
    sz_aff += (pt.tau + a_aff * daff.dtau) * (pt.kappa + a_aff * daff.dkappa);
    double sigma = std::pow(std::max(0.0, sz_aff / (deg * mu)), 3.0);
    sigma = std::min(1.0, sigma);

    // Mehrotra correction in the scaled space.
    std::vector<MatrixXd> corr(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      MatrixXd Ds = W.Rinv[b] * daff.dS[b] * W.Rinv[b].transpose();
      MatrixXd Dz = W.R[b].transpose() * daff.dZ[b] * W.R[b];
      MatrixXd P = Ds * Dz;
      corr[b] = 0.5 * (P + P.transpose());
    }
    const double corr_tk = daff.dtau * daff.dkappa;

    if (!newton(1.0 - sigma, sigma, &corr, corr_tk, dcmb)) {
      return finish_fail(SdpStatus::NumericalFailure);
    }
    double alpha = std::min(1.0, st.step_fraction * max_step(dcmb));
    if (!(alpha > 1e-12)) return finish_fail(SdpStatus::NumericalFailure);
    stall_count = alpha < 1e-4 ? stall_count + 1 : 0;
    if (stall_count >= 3) return finish_fail(SdpStatus::NumericalFailure);

    pt.x += alpha * dcmb.dx;
    pt.tau += alpha * dcmb.dtau;
    pt.kappa += alpha * dcmb.dkappa;
    for (std::size_t b = 0; b < nb; ++b) {
      pt.S[b] += alpha * dcmb.dS[b];
      pt.Z[b] += alpha * dcmb.dZ[b];
      pt.S[b] = 0.5 * (pt.S[b] + pt.S[b].transpose()).eval();
      pt.Z[b] = 0.5 * (pt.Z[b] + pt.Z[b].transpose()).eval();
    }
    if (!(pt.tau > 0.0) || !(pt.kappa >= 0.0) || !std::isfinite(pt.tau)) {
      return finish_fail(SdpStatus::NumericalFailure);
    }
    // The embedding is homogeneous, so the iterate scale is free; renormalize
    // to keep tau + kappa fixed and avoid drift toward zero.
    const double rho = 2.0 / (pt.tau + pt.kappa);
    if (std::isfinite(rho) && rho > 0.0) {
      pt.x *= rho;
      pt.tau *= rho;
      pt.kappa *= rho;
      for (std::size_t b = 0; b < nb; ++b) {
        pt.S[b] *= rho;
        pt.Z[b] *= rho;
      }
    }
  }
  return out;
}

}  // namespace detail

std::optional<InfeasibilityCertificate> probe_infeasibility(const LinearMatrixProgram& p,
                                                            const SolverSettings& settings,
                                                            double* margin) {
  LinearMatrixProgram ph = p;
  const int s_var = ph.num_vars;
  ph.num_vars += 1;
  ph.objective = Eigen::VectorXd::Zero(ph.num_vars);
  ph.objective[s_var] = 1.0;
  for (auto& blk : ph.blocks) {
    blk.vars.resize(ph.num_vars);
    for (int i = 0; i < blk.size; ++i) blk.vars[s_var].push_back({i, i, 1.0});
  }
  {
    // keep the probe bounded: s >= -1
    LmiBlock cap;
    cap.name = "slack-floor";
    cap.size = 1;
    cap.F0 = Eigen::MatrixXd::Ones(1, 1);
    cap.vars.resize(ph.num_vars);
    cap.vars[s_var].push_back({0, 0, 1.0});
    ph.blocks.push_back(std::move(cap));
  }

  SolverSettings st = settings;
  st.feas_tol = std::max(settings.feas_tol, 1e-8);
  st.gap_tol = std::max(settings.gap_tol, 1e-8);
  SdpSolution sol = solve(ph, st);
  const bool usable = sol.status == SdpStatus::Optimal ||
                      ((sol.status == SdpStatus::MaxIterations ||
                        sol.status == SdpStatus::NumericalFailure) &&
                       sol.y.size() == ph.num_vars && sol.primal_residual <= 1e-6 &&
                       sol.dual_residual <= 1e-6);
  if (!usable) return std::nullopt;
  const double s_opt = sol.y[s_var];
  if (margin) *margin = s_opt;
  double scale = 1.0;
  for (const auto& blk : p.blocks) scale = std::max(scale, blk.F0.cwiseAbs().maxCoeff());
  if (!(s_opt > 1e-6 * scale)) return std::nullopt;
  if (sol.dual_blocks.size() != ph.blocks.size()) return std::nullopt;

  InfeasibilityCertificate cert;
  cert.blocks.assign(sol.dual_blocks.begin(),
                     sol.dual_blocks.begin() + static_cast<long>(p.blocks.size()));
  // Normalize the functional so it evaluates to -1 on the affine part.
  double offset = 0.0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    offset += (p.blocks[b].F0.array() * cert.blocks[b].array()).sum();
  }
  if (!p.equalities.empty() && sol.dual_eq.size() == static_cast<long>(p.equalities.size())) {
    for (std::size_t i = 0; i < p.equalities.size(); ++i) {
      offset += sol.dual_eq[i] * p.equalities[i].rhs;
    }
  }
  if (!(offset < 0.0)) return std::nullopt;
  for (auto& Z : cert.blocks) Z /= -offset;
  cert.offset_value = -1.0;
  double dir = 0.0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    for (int a = 0; a < p.num_vars; ++a) {
      double s = 0.0;
      for (const auto& en : blk.vars[a]) {
        s += en.value * cert.blocks[b](en.row, en.col) * (en.row == en.col ? 1.0 : 2.0);
      }
      dir = std::max(dir, std::abs(s));
    }
  }
  cert.direction_residual = dir;  // before equality projection
  return cert;
}

SdpSolution solve(const LinearMatrixProgram& p, const SolverSettings& settings) {
  SdpSolution sol;
  if (p.blocks.empty()) throw std::invalid_argument("solve: program has no LMI blocks");
  if (p.objective.size() != p.num_vars) throw std::invalid_argument("solve: objective size mismatch");

  Presolve pre = presolve_equalities(p);
  if (!pre.consistent) {
    sol.status = SdpStatus::PrimalInfeasible;
    return sol;
  }
  const int m = static_cast<int>(pre.Z.cols());
  const std::size_t nb = p.blocks.size();

  ConeData cd;
  cd.m = m;
  cd.sizes.resize(nb);
  cd.G0.resize(nb);
  cd.PackedG.resize(nb);
  cd.degree = 0;
  for (std::size_t b = 0; b < nb; ++b) {
    const auto& blk = p.blocks[b];
    cd.sizes[b] = blk.size;
    cd.degree += blk.size;
    cd.G0[b] = blk.evaluate(pre.y0);
    // PackedG column j = svec(sum_a Z(a,j) F_a)
    const int ps = packed_size(blk.size);
    MatrixXd P = MatrixXd::Zero(ps, m);
    const double rt2 = std::sqrt(2.0);
    for (int a = 0; a < p.num_vars; ++a) {
      if (blk.vars[a].empty()) continue;
      for (const auto& en : blk.vars[a]) {
        // packed index of (row, col), row <= col
        const int i = en.row, j = en.col;
        const int idx = i * blk.size - i * (i - 1) / 2 + (j - i);
        const double v = (i == j) ? en.value : rt2 * en.value;
        P.row(idx) += v * pre.Z.row(a);
      }
    }
    cd.PackedG[b] = std::move(P);
  }
  cd.c = pre.Z.transpose() * p.objective;

  if (m == 0) {
    // Fully pinned variable: feasibility is a single eigenvalue check.
    bool psd = true;
    double worst = 0.0;
    std::size_t worst_b = 0;
    Eigen::VectorXd worst_v;
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(cd.G0[b]);
      const double lmin = es.eigenvalues().minCoeff();
      if (lmin < -settings.feas_tol * std::max(1.0, cd.G0[b].norm())) {
        psd = false;
        if (lmin < worst) {
          worst = lmin;
          worst_b = b;
          worst_v = es.eigenvectors().col(0);
        }
      }
    }
    if (psd) {
      sol.status = SdpStatus::Optimal;
      sol.y = pre.y0;
      sol.objective = p.objective.dot(sol.y);
      sol.dual_blocks.assign(nb, MatrixXd());
      for (std::size_t b = 0; b < nb; ++b) {
        sol.dual_blocks[b] = MatrixXd::Zero(p.blocks[b].size, p.blocks[b].size);
      }
    } else {
      sol.status = SdpStatus::PrimalInfeasible;
      InfeasibilityCertificate cert;
      cert.blocks.assign(nb, MatrixXd());
      for (std::size_t b = 0; b < nb; ++b) {
        cert.blocks[b] = MatrixXd::Zero(p.blocks[b].size, p.blocks[b].size);
      }
      cert.blocks[worst_b] = worst_v * worst_v.transpose() / (-worst);
      cert.offset_value = -1.0;
      sol.infeasibility_certificate = cert;
    }
    return sol;
  }

  // Column equilibration: normalize each variable direction to unit
  // Frobenius norm across blocks, undone on output.
  VectorXd colnorm = VectorXd::Ones(m);
  for (int j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b) s += cd.PackedG[b].col(j).squaredNorm();
    colnorm[j] = std::sqrt(s);
    if (!(colnorm[j] > 1e-300)) colnorm[j] = 1.0;
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (int j = 0; j < m; ++j) cd.PackedG[b].col(j) /= colnorm[j];
  }
  VectorXd cscaled(m);
  for (int j = 0; j < m; ++j) cscaled[j] = cd.c[j] / colnorm[j];
  const double obj_scale = std::max(1.0, cscaled.cwiseAbs().maxCoeff());
  cd.c = cscaled / obj_scale;


  detail::ConeSolveResult res = detail::solve_cone_program(cd, settings);
  sol.status = res.status;
  sol.iterations = res.iterations;
  sol.primal_residual = res.pres;
  sol.dual_residual = res.dres;
  sol.duality_gap = res.gap;

  auto unscale_x = [&](const VectorXd& x) {
    VectorXd t(m);
    for (int j = 0; j < m; ++j) t[j] = x[j] / colnorm[j];
    return t;
  };

  switch (res.status) {
    case SdpStatus::Optimal:
    case SdpStatus::MaxIterations:
    case SdpStatus::NumericalFailure: {
      if (res.x.size() != m) break;
      VectorXd t = unscale_x(res.x);
      sol.y = pre.y0 + pre.Z * t;
      sol.objective = p.objective.dot(sol.y);
      sol.dual_blocks.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) sol.dual_blocks[b] = res.Z[b] * obj_scale;
      // Equality multipliers from the full-space dual stationarity condition.
      if (!p.equalities.empty()) {
        const int me = static_cast<int>(p.equalities.size());
        Eigen::MatrixXd Et = Eigen::MatrixXd::Zero(p.num_vars, me);
        for (int i = 0; i < me; ++i) {
          for (const auto& [j, v] : p.equalities[i].coeffs) Et(j, i) += v;
        }
        VectorXd resid = p.objective;
        for (std::size_t b = 0; b < nb; ++b) {
          const auto& blk = p.blocks[b];
          for (int a = 0; a < p.num_vars; ++a) {
            double s = 0.0;
            for (const auto& en : blk.vars[a]) {
              s += en.value * sol.dual_blocks[b](en.row, en.col) * (en.row == en.col ? 1.0 : 2.0);
            }
            resid[a] -= s;
          }
        }
        sol.dual_eq = Et.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(resid);
      }
      break;
    }
    case SdpStatus::PrimalInfeasible: {
      InfeasibilityCertificate cert;
      cert.blocks = res.inf_cert;
      for (auto& Z : cert.blocks) Z = 0.5 * (Z + Z.transpose()).eval();
      cert.offset_value = -1.0;
      double dres = 0.0;
      {
        VectorXd g = gather(cd, cert.blocks);
        dres = g.size() > 0 ? g.cwiseAbs().maxCoeff() : 0.0;
      }
      cert.direction_residual = dres;
      sol.infeasibility_certificate = std::move(cert);
      break;
    }
    case SdpStatus::DualUnbounded: {
      VectorXd t = unscale_x(res.unbounded_ray);
      sol.unbounded_ray = pre.Z * t;
      break;
    }
    default:
      break;
  }
  return sol;
}

}  // namespace hierarchia
