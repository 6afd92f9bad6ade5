#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hierarchia/problem_io.hpp"
#include "hierarchia/reproduction.hpp"
#include "hierarchia/sdpa.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct CommonFlags {
  double delta = -1.0;
  int kmax = -1;
  double rank_tol = -1.0;
  double feas_tol = -1.0;
  double scale = 1.0;
  bool json = false;
  bool verbose = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--delta", delta, "initial delta for the next-level search");
    cmd->add_option("--kmax", kmax, "absolute cap on the relaxation order");
    cmd->add_option("--rank-tol", rank_tol, "numeric rank tolerance");
    cmd->add_option("--feas-tol", feas_tol, "SDP feasibility tolerance");
    cmd->add_option("--scale", scale, "multiply the objective by this constant internally");
    cmd->add_flag("--json", json, "emit the JSON report");
    cmd->add_flag("--verbose", verbose, "per-solve progress output");
  }

  void apply(hierarchia::EngineSettings& s) const {
    if (delta > 0) s.delta0 = delta;
    if (kmax > 0) s.k_max = kmax;
    if (rank_tol > 0) s.rank_tol = rank_tol;
    if (feas_tol > 0) s.solver.feas_tol = feas_tol;
    if (scale != 1.0) s.scale = scale;
    s.verbose = verbose;
    s.solver.verbose = false;
  }
};

int exit_code_for(const hierarchia::HierarchyReport& rep) {
  using hierarchia::TerminalStatus;
  switch (rep.terminal_status) {
    case TerminalStatus::ProvedComplete: return 0;
    case TerminalStatus::MaxOrderReached:
    case TerminalStatus::GapTooSmall: return 3;
    case TerminalStatus::SolverFailure: return 2;
  }
  return 2;
}

int run_hierarchy(const std::string& file, const CommonFlags& flags, bool critical) {
  hierarchia::ProblemSpec spec;
  try {
    spec = hierarchia::parse_problem(slurp(file));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (critical) spec.mode = "critical-hierarchy";
  if (!critical && spec.mode == "critical-hierarchy") spec.mode = "hmin-hierarchy";
  hierarchia::HierarchyProblem problem;
  try {
    problem = hierarchia::to_engine_problem(spec);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  hierarchia::EngineSettings settings = spec.options;
  flags.apply(settings);
  hierarchia::HierarchyReport rep = hierarchia::full_hierarchy(problem, settings);
  // report values in the units of the original objective
  if (settings.scale != 1.0) {
    for (auto& lvl : rep.levels) {
      lvl.value /= settings.scale;
      for (auto& p : lvl.points) p.value /= settings.scale;
    }
  }
  std::cout << (flags.json ? hierarchia::render_report_json(rep)
                           : hierarchia::render_report_table(rep));
  return exit_code_for(rep);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchia: ordered local minimums / critical values of polynomials"};
  app.require_subcommand(1);

  std::string file;
  std::string point_text;
  std::string repro_name = "all";
  int export_order = 0;
  std::string export_path;

  CommonFlags hmin_flags, crit_flags, verify_flags;

  auto* hmin = app.add_subcommand("hmin", "hierarchy of H-minimums over R^n (or an open set)");
  hmin->add_option("file", file, "problem file (text or JSON)")->required();
  hmin_flags.attach(hmin);

  auto* crit = app.add_subcommand("critical", "hierarchy of critical values under h = 0");
  crit->add_option("file", file, "problem file (text or JSON)")->required();
  crit_flags.attach(crit);

  auto* verify = app.add_subcommand("verify", "ball test: is the given point a local minimizer");
  verify->add_option("file", file, "problem file (text or JSON)")->required();
  verify->add_option("--point", point_text, "comma-separated coordinates")->required();
  verify_flags.attach(verify);

  auto* repro = app.add_subcommand("reproduce", "run the built-in example corpus");
  repro->add_option("name", repro_name, "case name, 'fast', or 'all'");

  auto* exp = app.add_subcommand("export-sdpa", "write the first-level relaxation in SDPA format");
  exp->add_option("file", file, "problem file (text or JSON)")->required();
  exp->add_option("-k,--order", export_order, "relaxation order")->required();
  exp->add_option("-o,--output", export_path, "output path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (hmin->parsed()) return run_hierarchy(file, hmin_flags, false);
    if (crit->parsed()) return run_hierarchy(file, crit_flags, true);

    if (verify->parsed()) {
      hierarchia::ProblemSpec spec = hierarchia::parse_problem(slurp(file));
      hierarchia::EngineSettings settings = spec.options;
      verify_flags.apply(settings);
      Eigen::VectorXd u(spec.objective.vars());
      {
        std::stringstream ss(point_text);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',')) {
          if (i >= u.size()) {
            std::cerr << "error: too many coordinates\n";
            return 1;
          }
          u[i++] = std::stod(tok);
        }
        if (i != u.size()) {
          std::cerr << "error: expected " << u.size() << " coordinates\n";
          return 1;
        }
      }
      auto out = hierarchia::verify_local_min_ball(u, spec.objective, spec.equalities, settings);
      switch (out.verdict) {
        case hierarchia::BallVerdict::Verified:
          std::cout << "Verified: local minimizer (rho=" << out.rho_used << ")\n";
          return 0;
        case hierarchia::BallVerdict::Refuted:
          std::cout << "Refuted: smaller value " << out.witness_value << " inside every ball\n";
          return 0;
        case hierarchia::BallVerdict::Inconclusive:
          std::cout << "Inconclusive\n";
          return 3;
      }
    }

    if (repro->parsed()) {
      auto results = hierarchia::run_reproduction_suite(repro_name);
      if (results.empty()) {
        std::cerr << "error: unknown case '" << repro_name << "'\n";
        return 1;
      }
      bool all_pass = true;
      for (const auto& r : results) {
        std::printf("%-26s %s  (%.1fs)%s%s\n", r.name.c_str(), r.pass ? "pass" : "FAIL",
                    r.seconds, r.detail.empty() ? "" : "  ", r.detail.c_str());
        all_pass = all_pass && r.pass;
      }
      return all_pass ? 0 : 2;
    }

    if (exp->parsed()) {
      hierarchia::ProblemSpec spec = hierarchia::parse_problem(slurp(file));
      hierarchia::HierarchyProblem problem = hierarchia::to_engine_problem(spec);
      hierarchia::BuiltRelaxation built;
      if (problem.mode == hierarchia::HierarchyProblem::Mode::Critical) {
        built = hierarchia::build_critical_first(problem.f, problem.h, export_order);
      } else {
        built = hierarchia::build_hmin_first(problem.f, export_order);
      }
      const std::string text = hierarchia::export_sdpa(built.first);
      if (export_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(export_path);
        out << text;
      }
      return 0;
    }
  } catch (const hierarchia::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
