#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hierarchia/hierarchy.hpp"

namespace hierarchia {

struct ParseError : std::runtime_error {
  int line = 0;
  int column = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", column " +
                           std::to_string(col_) + ")"),
        line(line_),
        column(col_) {}
};

struct ProblemSpec {
  std::string mode = "hmin-hierarchy";  // hmin-hierarchy | critical-hierarchy | verify | single-level
  std::vector<std::string> variables;   // declared order; x-names then y-names
  Polynomial objective{1};
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;
  EngineSettings options;
};

// Terms joined by +/-, term = [coeff][*]var^pow[*var^pow...]; variables are
// x1..xn with y1..ym mapped to the indices after the x block.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables);

// Variable collection pass for free-form input: all x<i>/y<j> names used.
std::vector<std::string> collect_variables(const std::vector<std::string>& polys);

// JSON problem document; see README for the schema.
ProblemSpec parse_problem_json(const std::string& json_text);
// Plain-text problem file: "objective: ...", "equality: ...", etc.
ProblemSpec parse_problem_text(const std::string& text);
ProblemSpec parse_problem(const std::string& text);

std::string render_report_table(const HierarchyReport& r);
std::string render_report_json(const HierarchyReport& r);

HierarchyProblem to_engine_problem(const ProblemSpec& spec);

}  // namespace hierarchia
