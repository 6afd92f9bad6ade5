#include "hierarchia/reproduction.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

namespace hierarchia {

namespace {

Polynomial X(int n, int i) { return Polynomial::variable(n, i); }
Polynomial C(int n, double c) { return Polynomial::constant(n, c); }

}  // namespace

Polynomial motzkin_dehomogenized() {
  const int n = 2;
  auto x1 = X(n, 0), x2 = X(n, 1);
  return C(n, 1) + x1.pow(4) * x2.pow(2) + x1.pow(2) * x2.pow(4) -
         3.0 * (x1.pow(2) * x2.pow(2));
}

Polynomial robinson_dehomogenized() {
  const int n = 2;
  auto x1 = X(n, 0), x2 = X(n, 1);
  return x1.pow(6) + x2.pow(6) + C(n, 1) + 3.0 * (x1.pow(2) * x2.pow(2)) -
         x1.pow(4) * (x2.pow(2) + C(n, 1)) - x2.pow(4) * (C(n, 1) + x1.pow(2)) -
         (x1.pow(2) + x2.pow(2));
}

Polynomial biquartic_no_minimizer() {
  const int n = 2;
  auto x1 = X(n, 0), x2 = X(n, 1);
  return x1.pow(2) + (x1 * x2 - C(n, 1)).pow(2);
}

Polynomial octic_no_minimizer() {
  const int n = 2;
  auto x1 = X(n, 0), x2 = X(n, 1);
  auto s = x1 + x2;
  return 2.0 * (x2.pow(4) * s.pow(4)) + x2.pow(2) * s.pow(2) + 2.0 * (x2 * s) + x2.pow(2);
}

Polynomial sextic_four_vars() {
  const int n = 4;
  auto x1 = X(n, 0), x2 = X(n, 1), x3 = X(n, 2), x4 = X(n, 3);
  return x1.pow(6) + x2.pow(6) + x3.pow(6) + x4.pow(6) -
         5.0 * (x1.pow(3) * x2.pow(2) + x2.pow(2) * x3.pow(3) + x3 * x4.pow(4)) +
         6.0 * (x1.pow(2) * x2.pow(2) + x3.pow(3) * x4 + x1 * x2 * x3 * x4) -
         7.0 * (x1 * x2 * x3 + x2 * x3 * x4) +
         (x1 + x2 + x3 + x4 - C(n, 1)).pow(2) - C(n, 1);
}

Polynomial quintic_three_vars() {
  const int n = 3;
  auto x1 = X(n, 0), x2 = X(n, 1), x3 = X(n, 2);
  return 21.0 * x2.pow(2) - 92.0 * (x1 * x3.pow(2)) - 70.0 * (x2.pow(2) * x3) -
         95.0 * x1.pow(4) - 47.0 * (x1 * x3.pow(3)) + 51.0 * (x2.pow(2) * x3.pow(2)) +
         47.0 * x1.pow(5) + 5.0 * (x1 * x2.pow(4)) + 33.0 * x3.pow(5);
}

std::pair<Polynomial, Polynomial> motzkin_on_sphere() {
  const int n = 3;
  auto x1 = X(n, 0), x2 = X(n, 1), x3 = X(n, 2);
  Polynomial f = x1.pow(4) * x2.pow(2) + x1.pow(2) * x2.pow(4) + x3.pow(6) -
                 3.0 * (x1.pow(2) * x2.pow(2) * x3.pow(2));
  Polynomial h = x1.pow(2) + x2.pow(2) + x3.pow(2) - C(n, 1);
  return {f, h};
}

std::pair<Polynomial, Polynomial> quartic_surface_octic() {
  const int n = 3;
  auto x1 = X(n, 0), x2 = X(n, 1), x3 = X(n, 2);
  Polynomial f = (2.0 * x1.pow(4) - 3.0 * x2.pow(2) + 4.0 * x3.pow(4)).pow(2) -
                 5.0 * (x1 * x2 - x2 * x3 + x3 * x1).pow(4) + x1.pow(7) * x2 +
                 x2.pow(7) * x3 + x3.pow(7) * x1;
  Polynomial h = x1.pow(4) + x2.pow(4) + x3.pow(4) - C(n, 1);
  return {f, h};
}

std::pair<Polynomial, std::vector<Polynomial>> two_constraint_quintic() {
  const int n = 3;
  auto x1 = X(n, 0), x2 = X(n, 1), x3 = X(n, 2);
  Polynomial f = x1.pow(5) + x2.pow(5) + x3.pow(5) +
                 (x1 * x2 - x2 * x3 - x3 * x1).pow(2) + (x1 + x2 - x3).pow(3);
  Polynomial h1 = 6.0 * x1.pow(4) - 2.0 * x2.pow(4) - 3.0 * x3.pow(4) - C(n, 1);
  Polynomial h2 = 4.0 * x1.pow(2) + 5.0 * x2.pow(2) - 7.0 * x3.pow(2) - C(n, 2);
  return {f, {h1, h2}};
}

Polynomial gap_stress(double eps) {
  const int n = 1;
  auto x = X(n, 0);
  return x.pow(2) * (x.pow(2) - 2.0 * x + C(n, 1.0 + eps));
}

namespace {

struct Expected {
  struct Level {
    double value;
    std::string cls;  // "", "minimizer", "saddle", "maximizer"
    std::vector<std::vector<double>> points;  // representative points, up to sign symmetry
  };
  std::vector<Level> levels;
  double value_tol = 1e-3;
  double point_tol = 1e-2;
  bool expect_complete = true;
  bool expect_no_minimizers = false;
  int nonexistence_order = 0;
};

std::string class_bucket(Classification c) {
  switch (c) {
    case Classification::StrictLocalMin:
    case Classification::LocalMinVerified:
      return "minimizer";
    case Classification::StrictLocalMax:
      return "maximizer";
    case Classification::Saddle:
    case Classification::NotLocalMin:
      return "saddle";
    default:
      return "degenerate";
  }
}

bool point_matches(const Eigen::VectorXd& got, const std::vector<double>& want, double tol,
                   bool allow_sign_flip) {
  auto close = [&](double sgn) {
    for (int i = 0; i < got.size(); ++i) {
      if (std::abs(sgn * got[i] - want[i]) > tol) return false;
    }
    return true;
  };
  if (close(1.0)) return true;
  return allow_sign_flip && close(-1.0);
}

struct CaseDef {
  ReproCase info;
  std::function<HierarchyProblem()> problem;
  std::function<EngineSettings()> settings;
  Expected expected;
};

const std::vector<CaseDef>& case_table() {
  static const std::vector<CaseDef> cases = [] {
    std::vector<CaseDef> v;

    {
      CaseDef c;
      c.info = {"biquartic-nonexistence", "no local minimizers, certificate at k=3", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = biquartic_no_minimizer();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.k_max = 4;
        return s;
      };
      c.expected.expect_no_minimizers = true;
      c.expected.nonexistence_order = 3;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"octic-nonexistence", "no local minimizers, certificate at k=5", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = octic_no_minimizer();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.k_max = 6;
        return s;
      };
      c.expected.expect_no_minimizers = true;
      c.expected.nonexistence_order = 5;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"motzkin", "dehomogenized Motzkin polynomial, levels {0, 1}", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = motzkin_dehomogenized();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.001;
        s.k_max = 6;
        return s;
      };
      c.expected.levels = {{0.0, "minimizer", {{1, 1}, {-1, -1}, {1, -1}, {-1, 1}}},
                           {1.0, "", {}}};
      c.expected.value_tol = 1e-4;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"robinson", "dehomogenized Robinson polynomial, single level 0", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = robinson_dehomogenized();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.01;
        s.k_max = 6;
        return s;
      };
      c.expected.levels = {{0.0, "minimizer", {{1, 1}}}};
      c.expected.value_tol = 1e-4;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"sextic-4var", "four-variable sextic with five levels", true};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = sextic_four_vars();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 1.0;
        s.k_max = 4;
        return s;
      };
      c.expected.levels = {
          {-1813.2169, "minimizer", {{3.0149, 3.3618, 3.7667, -3.7482}}},
          {-1515.4286, "minimizer", {{-1.1245, -3.0510, 3.6415, -3.6848}}},
          {-140.8532, "minimizer", {{-0.6017, 2.2670, 2.4317, 2.7935}}},
          {-62.7880, "minimizer", {{2.2031, -2.3876, 2.4169, 2.7577}}},
          {-4.3786, "minimizer", {{0.8653, -0.3392, -1.2499, 0.7930}}},
      };
      c.expected.value_tol = 1e-2;  // relative, handled below
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"quintic-3var", "unbounded quintic with minimizer and saddle", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = quintic_three_vars();
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.1;
        s.k_max = 4;
        return s;
      };
      c.expected.levels = {{-549.9848, "minimizer", {{1.9175, 0.0000, 1.7016}}},
                           {0.0, "saddle", {{0, 0, 0}}}};
      c.expected.value_tol = 1e-1;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"motzkin-sphere", "Motzkin form on the unit sphere, four critical values", true};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::Critical;
        auto [f, h] = motzkin_on_sphere();
        p.f = f;
        p.h = {h};
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.01;
        s.k_max = 6;
        return s;
      };
      c.expected.levels = {{0.0, "minimizer", {{0.5774, 0.5774, 0.5774}}},
                           {0.0156, "saddle", {{0.2623, 0.8253, 0.5}}},
                           {0.25, "maximizer", {{0.7071, 0.7071, 0.0}}},
                           {1.0, "maximizer", {{0.0, 0.0, 1.0}}}};
      c.expected.value_tol = 1e-3;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"quartic-surface", "degree-8 objective on a quartic surface, nine values", true};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::Critical;
        auto [f, h] = quartic_surface_octic();
        p.f = f;
        p.h = {h};
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.01;
        s.k_max = 6;
        return s;
      };
      c.expected.levels = {{-45.0451, "minimizer", {}}, {-1.5552, "minimizer", {}},
                           {-1.1143, "minimizer", {}},  {-0.3788, "saddle", {}},
                           {-0.3650, "saddle", {}},     {0.3554, "saddle", {}},
                           {4.0191, "saddle", {}},      {9.1456, "maximizer", {}},
                           {16.1706, "maximizer", {}}};
      c.expected.value_tol = 1e-2;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"two-constraint-quintic", "two quartic/quadric constraints, seven values", true};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::Critical;
        auto [f, h] = two_constraint_quintic();
        p.f = f;
        p.h = h;
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.delta0 = 0.01;
        s.k_max = 7;
        return s;
      };
      c.expected.levels = {{-97.9193, "minimizer", {{-2.3943, -2.3119, 2.6092}}},
                           {-0.6117, "maximizer", {{-0.6494, -0.4021, -0.2660}}},
                           {-0.2008, "minimizer", {{-0.6493, 0.4011, 0.2648}}},
                           {0.1712, "minimizer", {{0.6413, -0.2921, 0.1012}}},
                           {0.6121, "minimizer", {{0.6486, 0.3952, 0.2573}}},
                           {1.0710, "maximizer", {{1.1049, -1.1056, -1.1336}}},
                           {1.0843, "maximizer", {{-1.0948, 1.0956, -1.1210}}}};
      c.expected.value_tol = 1e-2;
      v.push_back(std::move(c));
    }

    {
      CaseDef c;
      c.info = {"gap-stress", "parametric univariate family with a shrinking gap", false};
      c.problem = [] {
        HierarchyProblem p;
        p.mode = HierarchyProblem::Mode::HMin;
        p.f = gap_stress(0.01);
        return p;
      };
      c.settings = [] {
        EngineSettings s;
        s.k_max = 5;
        return s;
      };
      const double eps = 0.01;
      const double gap =
          (1.0 - std::pow(std::sqrt(1.0 - 8 * eps), 3) + 20 * eps - 8 * eps * eps) / 32.0;
      c.expected.levels = {{0.0, "minimizer", {{0.0}}},
                           {gap, "minimizer", {{(3 + std::sqrt(1 - 8 * eps)) / 4}}}};
      c.expected.value_tol = 1e-6;
      c.expected.point_tol = 1e-4;
      v.push_back(std::move(c));
    }

    return v;
  }();
  return cases;
}

std::string check_report(const HierarchyReport& rep, const Expected& exp) {
  std::ostringstream bad;
  if (exp.expect_no_minimizers) {
    if (!rep.no_minimizers) {
      bad << "expected a nonexistence certificate, got " << rep.levels.size() << " levels; ";
    } else if (exp.nonexistence_order > 0 && rep.nonexistence_order != exp.nonexistence_order) {
      bad << "nonexistence certified at k=" << rep.nonexistence_order << ", expected k="
          << exp.nonexistence_order << "; ";
    }
    return bad.str();
  }
  if (rep.levels.size() != exp.levels.size()) {
    bad << "got " << rep.levels.size() << " levels, expected " << exp.levels.size() << "; ";
    for (const auto& lvl : rep.levels) bad << lvl.value << " ";
    return bad.str();
  }
  for (std::size_t i = 0; i < exp.levels.size(); ++i) {
    const auto& want = exp.levels[i];
    const auto& got = rep.levels[i];
    const double tol = exp.value_tol * (1.0 + std::abs(want.value));
    if (std::abs(got.value - want.value) > tol) {
      bad << "level " << (i + 1) << " value " << got.value << " vs " << want.value << "; ";
    }
    if (!want.cls.empty()) {
      bool found = false;
      for (const auto& p : got.points) {
        if (class_bucket(p.classification) == want.cls) found = true;
      }
      if (!found) {
        bad << "level " << (i + 1) << " missing classification '" << want.cls << "'";
        if (!got.points.empty()) {
          bad << " (got";
          for (const auto& p : got.points) bad << " " << class_bucket(p.classification);
          bad << ")";
        }
        bad << "; ";
      }
    }
    for (const auto& want_pt : want.points) {
      bool found = false;
      for (const auto& p : got.points) {
        if (point_matches(p.point, want_pt, exp.point_tol, true)) found = true;
      }
      if (!found) bad << "level " << (i + 1) << " missing an expected point; ";
    }
  }
  if (exp.expect_complete && rep.terminal_status != TerminalStatus::ProvedComplete) {
    bad << "terminal status " << to_string(rep.terminal_status) << ", expected ProvedComplete; ";
  }
  return bad.str();
}

}  // namespace

const std::vector<ReproCase>& reproduction_cases() {
  static const std::vector<ReproCase> list = [] {
    std::vector<ReproCase> out;
    for (const auto& c : case_table()) out.push_back(c.info);
    return out;
  }();
  return list;
}

ReproResult run_reproduction(const std::string& name) {
  for (const auto& c : case_table()) {
    if (c.info.name != name) continue;
    ReproResult res;
    res.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    res.report = full_hierarchy(c.problem(), c.settings());
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.detail = check_report(res.report, c.expected);
    res.pass = res.detail.empty();
    return res;
  }
  ReproResult res;
  res.name = name;
  res.detail = "unknown case";
  return res;
}

std::vector<ReproResult> run_reproduction_suite(const std::string& selector) {
  std::vector<ReproResult> out;
  for (const auto& c : case_table()) {
    if (selector == "all" || selector == c.info.name ||
        (selector == "fast" && !c.info.slow)) {
      out.push_back(run_reproduction(c.info.name));
    }
  }
  return out;
}

}  // namespace hierarchia
