#include "hierarchia/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

namespace hierarchia {

namespace {

using nlohmann::json;

struct Cursor {
  const std::string& s;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= s.size(); }
  char peek() const { return s[pos]; }
  void advance() {
    if (s[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }
  void skip_ws() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }
};

[[noreturn]] void fail(const Cursor& c, const std::string& msg) {
  throw ParseError(msg, c.line, c.col);
}

double parse_number(Cursor& c) {
  c.skip_ws();
  const std::size_t start = c.pos;
  const int line = c.line, col = c.col;
  while (!c.eof() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.' ||
                      c.peek() == 'e' || c.peek() == 'E' ||
                      ((c.peek() == '+' || c.peek() == '-') && c.pos > start &&
                       (c.s[c.pos - 1] == 'e' || c.s[c.pos - 1] == 'E')))) {
    c.advance();
  }
  if (c.pos == start) throw ParseError("expected a number", line, col);
  try {
    return std::stod(c.s.substr(start, c.pos - start));
  } catch (const std::exception&) {
    throw ParseError("malformed number", line, col);
  }
}

int parse_uint(Cursor& c, const char* what) {
  c.skip_ws();
  const std::size_t start = c.pos;
  const int line = c.line, col = c.col;
  while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) c.advance();
  if (c.pos == start) throw ParseError(std::string("expected ") + what, line, col);
  return std::stoi(c.s.substr(start, c.pos - start));
}

}  // namespace

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& variables) {
  const int n = static_cast<int>(variables.size());
  std::map<std::string, int> index;
  for (int i = 0; i < n; ++i) index[variables[i]] = i;

  Polynomial p(n);
  Cursor c{text};
  c.skip_ws();
  if (c.eof()) fail(c, "empty polynomial");

  bool first_term = true;
  while (true) {
    c.skip_ws();
    if (c.eof()) break;
    double sign = 1.0;
    if (c.peek() == '+' || c.peek() == '-') {
      if (c.peek() == '-') sign = -1.0;
      c.advance();
      c.skip_ws();
    } else if (!first_term) {
      fail(c, "expected '+' or '-' between terms");
    }
    first_term = false;
    if (c.eof()) fail(c, "dangling sign");

    double coeff = 1.0;
    bool saw_factor = false;
    if (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.') {
      coeff = parse_number(c);
      saw_factor = true;
      c.skip_ws();
      if (!c.eof() && c.peek() == '*') {
        c.advance();
        c.skip_ws();
      }
    }
    Exponent exps(n, 0);
    while (!c.eof() && (c.peek() == 'x' || c.peek() == 'y')) {
      const int line = c.line, col = c.col;
      const char kind = c.peek();
      c.advance();
      const int id = parse_uint(c, "variable index");
      std::string name = std::string(1, kind) + std::to_string(id);
      auto it = index.find(name);
      if (it == index.end()) throw ParseError("unknown variable '" + name + "'", line, col);
      int pow = 1;
      c.skip_ws();
      if (!c.eof() && c.peek() == '^') {
        c.advance();
        c.skip_ws();
        if (!c.eof() && c.peek() == '^') fail(c, "malformed exponent");
        pow = parse_uint(c, "exponent");
      }
      exps[it->second] += pow;
      saw_factor = true;
      c.skip_ws();
      // factors after the first must be joined by '*'
      if (c.eof() || c.peek() != '*') break;
      c.advance();
      c.skip_ws();
      if (c.eof() || (c.peek() != 'x' && c.peek() != 'y' &&
                      !std::isdigit(static_cast<unsigned char>(c.peek())) && c.peek() != '.')) {
        fail(c, "expected a factor after '*'");
      }
      while (!c.eof() && (std::isdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '.')) {
        coeff *= parse_number(c);
        c.skip_ws();
        if (!c.eof() && c.peek() == '*') {
          c.advance();
          c.skip_ws();
        } else {
          break;
        }
      }
    }
    if (!saw_factor) fail(c, "expected a term");
    p.add_term(exps, sign * coeff);
    c.skip_ws();
    if (!c.eof() && c.peek() != '+' && c.peek() != '-') fail(c, "unexpected character");
  }
  return p;
}

std::vector<std::string> collect_variables(const std::vector<std::string>& polys) {
  int max_x = 0, max_y = 0;
  for (const auto& text : polys) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      if ((text[i] == 'x' || text[i] == 'y') && i + 1 < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        std::size_t j = i + 1;
        int id = 0;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
          id = id * 10 + (text[j] - '0');
          ++j;
        }
        if (text[i] == 'x') max_x = std::max(max_x, id);
        if (text[i] == 'y') max_y = std::max(max_y, id);
        i = j - 1;
      }
    }
  }
  std::vector<std::string> vars;
  for (int i = 1; i <= max_x; ++i) vars.push_back("x" + std::to_string(i));
  for (int i = 1; i <= max_y; ++i) vars.push_back("y" + std::to_string(i));
  return vars;
}

namespace {

void apply_options(EngineSettings& st, const json& opts) {
  if (opts.contains("delta")) st.delta0 = opts["delta"].get<double>();
  if (opts.contains("delta_floor")) st.delta_floor = opts["delta_floor"].get<double>();
  if (opts.contains("kmax")) st.k_max = opts["kmax"].get<int>();
  if (opts.contains("k_scan_extra")) st.k_scan_extra = opts["k_scan_extra"].get<int>();
  if (opts.contains("rank_tol")) st.rank_tol = opts["rank_tol"].get<double>();
  if (opts.contains("feas_tol")) st.solver.feas_tol = opts["feas_tol"].get<double>();
  if (opts.contains("gap_tol")) st.solver.gap_tol = opts["gap_tol"].get<double>();
  if (opts.contains("value_tol")) st.value_tol = opts["value_tol"].get<double>();
  if (opts.contains("scale")) st.scale = opts["scale"].get<double>();
  if (opts.contains("verbose")) st.verbose = opts["verbose"].get<bool>();
}

}  // namespace

ProblemSpec parse_problem_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 1, static_cast<int>(e.byte));
  }
  ProblemSpec spec;
  if (doc.contains("variables")) {
    for (const auto& v : doc["variables"]) spec.variables.push_back(v.get<std::string>());
  }
  if (!doc.contains("objective")) throw ParseError("missing \"objective\"", 1, 1);
  std::vector<std::string> texts{doc["objective"].get<std::string>()};
  std::vector<std::string> eqs, ineqs;
  if (doc.contains("equalities")) {
    for (const auto& v : doc["equalities"]) {
      eqs.push_back(v.get<std::string>());
      texts.push_back(eqs.back());
    }
  }
  if (doc.contains("inequalities")) {
    for (const auto& v : doc["inequalities"]) {
      ineqs.push_back(v.get<std::string>());
      texts.push_back(ineqs.back());
    }
  }
  if (doc.contains("mode")) spec.mode = doc["mode"].get<std::string>();
  if (doc.contains("options")) apply_options(spec.options, doc["options"]);
  if (spec.variables.empty()) spec.variables = collect_variables(texts);
  if (spec.variables.empty()) throw ParseError("no variables found in problem", 1, 1);
  spec.objective = parse_polynomial(texts[0], spec.variables);
  for (const auto& t : eqs) spec.equalities.push_back(parse_polynomial(t, spec.variables));
  for (const auto& t : ineqs) spec.inequalities.push_back(parse_polynomial(t, spec.variables));

  static const std::vector<std::string> known_modes = {"hmin-hierarchy", "critical-hierarchy",
                                                       "verify", "single-level"};
  if (std::find(known_modes.begin(), known_modes.end(), spec.mode) == known_modes.end()) {
    throw ParseError("unknown mode '" + spec.mode + "'", 1, 1);
  }
  if (spec.mode == "critical-hierarchy" && spec.equalities.empty()) {
    // m = 0 degeneration is allowed; nothing to check.
  }
  return spec;
}

ProblemSpec parse_problem_text(const std::string& text) {
  ProblemSpec spec;
  std::istringstream in(text);
  std::string line;
  std::string objective_text;
  std::vector<std::string> eq_texts, ineq_texts, all_texts;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto colon = line.find(':');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (colon == std::string::npos) throw ParseError("expected 'key: value'", lineno, 1);
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    if (key == "objective") {
      objective_text = value;
    } else if (key == "equality") {
      eq_texts.push_back(value);
    } else if (key == "inequality") {
      ineq_texts.push_back(value);
    } else if (key == "mode") {
      value.erase(std::remove_if(value.begin(), value.end(), ::isspace), value.end());
      spec.mode = value;
    } else if (key == "delta") {
      spec.options.delta0 = std::stod(value);
    } else if (key == "kmax") {
      spec.options.k_max = std::stoi(value);
    } else if (key == "scale") {
      spec.options.scale = std::stod(value);
    } else {
      throw ParseError("unknown key '" + key + "'", lineno, 1);
    }
  }
  if (objective_text.empty()) throw ParseError("missing 'objective:' line", lineno, 1);
  all_texts.push_back(objective_text);
  for (const auto& t : eq_texts) all_texts.push_back(t);
  for (const auto& t : ineq_texts) all_texts.push_back(t);
  spec.variables = collect_variables(all_texts);
  if (spec.variables.empty()) throw ParseError("no variables found in problem", 1, 1);
  spec.objective = parse_polynomial(objective_text, spec.variables);
  for (const auto& t : eq_texts) spec.equalities.push_back(parse_polynomial(t, spec.variables));
  for (const auto& t : ineq_texts) spec.inequalities.push_back(parse_polynomial(t, spec.variables));
  return spec;
}

ProblemSpec parse_problem(const std::string& text) {
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    if (ch == '{') return parse_problem_json(text);
    break;
  }
  return parse_problem_text(text);
}

HierarchyProblem to_engine_problem(const ProblemSpec& spec) {
  HierarchyProblem pr;
  pr.f = spec.objective;
  if (spec.mode == "critical-hierarchy") {
    if (!spec.inequalities.empty() && spec.equalities.empty() && spec.inequalities.size() == 1) {
      pr.mode = HierarchyProblem::Mode::ClosedSet;
      pr.g_closed = spec.inequalities[0];
    } else {
      pr.mode = HierarchyProblem::Mode::Critical;
      pr.h = spec.equalities;
      if (!spec.inequalities.empty()) {
        throw ParseError("critical-hierarchy accepts either equalities or one inequality", 1, 1);
      }
    }
  } else {
    pr.mode = HierarchyProblem::Mode::HMin;
    if (!spec.equalities.empty()) {
      throw ParseError("hmin mode takes no equality constraints; use critical-hierarchy", 1, 1);
    }
    pr.g_open = spec.inequalities;
  }
  return pr;
}

namespace {

std::string format_point(const Eigen::VectorXd& u) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < u.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", u[i]);
    os << buf << (i + 1 < u.size() ? ", " : "");
  }
  os << ")";
  return os.str();
}

std::string short_class(Classification c) {
  switch (c) {
    case Classification::StrictLocalMin: return "minimizer";
    case Classification::LocalMinVerified: return "minimizer (ball-verified)";
    case Classification::Saddle: return "saddle point";
    case Classification::StrictLocalMax: return "maximizer";
    case Classification::Degenerate: return "degenerate";
    case Classification::NotLocalMin: return "not a local minimizer";
  }
  return "?";
}

}  // namespace

std::string render_report_table(const HierarchyReport& r) {
  std::ostringstream os;
  if (r.no_minimizers) {
    os << "no H-minimizers; certificate at k=" << r.nonexistence_order << "\n";
    return os.str();
  }
  os << "  r |          value | points (classification)\n";
  os << "----+----------------+------------------------\n";
  for (const auto& lvl : r.levels) {
    char vb[32];
    std::snprintf(vb, sizeof(vb), "%14.6f", lvl.value);
    os << std::setw(3) << lvl.index << " | " << vb << " | ";
    if (lvl.points.empty()) {
      os << "(no isolated points extracted)";
    } else {
      bool first = true;
      for (const auto& p : lvl.points) {
        if (!first) os << "; ";
        first = false;
        os << format_point(p.point) << " " << short_class(p.classification);
      }
    }
    os << "\n";
  }
  os << "status: " << to_string(r.terminal_status);
  if (r.completeness) {
    os << " (delta=" << r.completeness->delta
       << ", infeasibility at k=" << r.completeness->infeasibility_order << ")";
  }
  os << "\n";
  return os.str();
}

std::string render_report_json(const HierarchyReport& r) {
  json doc;
  doc["status"] = to_string(r.terminal_status);
  doc["hypotheses_note"] = r.hypotheses_note;
  if (r.no_minimizers) {
    doc["no_minimizers"] = true;
    doc["nonexistence_order"] = r.nonexistence_order;
  }
  doc["levels"] = json::array();
  for (const auto& lvl : r.levels) {
    json jl;
    jl["r"] = lvl.index;
    jl["value"] = lvl.value;
    jl["k"] = lvl.order_used;
    jl["delta"] = lvl.delta_used;
    jl["points"] = json::array();
    for (const auto& p : lvl.points) {
      json jp;
      jp["coords"] = std::vector<double>(p.point.data(), p.point.data() + p.point.size());
      jp["class"] = to_string(p.classification);
      if (p.multipliers) {
        jp["multipliers"] =
            std::vector<double>(p.multipliers->data(), p.multipliers->data() + p.multipliers->size());
      }
      jl["points"].push_back(std::move(jp));
    }
    doc["levels"].push_back(std::move(jl));
  }
  if (r.completeness) {
    doc["completeness"] = {{"delta", r.completeness->delta},
                           {"infeasibility_order", r.completeness->infeasibility_order},
                           {"certificate_verified", r.completeness->certificate_verified},
                           {"below_value", r.completeness->below_value}};
  }
  return doc.dump(2);
}

}  // namespace hierarchia
