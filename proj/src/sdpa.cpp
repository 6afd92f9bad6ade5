#include "hierarchia/sdpa.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace hierarchia {

namespace {

void append_value(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

struct ExportBlock {
  int size = 0;  // negative marks a diagonal block
};

}  // namespace

std::string export_sdpa(const LinearMatrixProgram& p, SdpaEqualityMode mode) {
  const LinearMatrixProgram* prog = &p;
  LinearMatrixProgram reduced;
  if (mode == SdpaEqualityMode::Eliminated && !p.equalities.empty()) {
    Presolve pre = presolve_equalities(p);
    if (!pre.consistent) throw std::invalid_argument("export_sdpa: inconsistent equalities");
    reduced.num_vars = static_cast<int>(pre.Z.cols());
    reduced.objective = pre.Z.transpose() * p.objective;
    for (const auto& blk : p.blocks) {
      LmiBlock rb;
      rb.name = blk.name;
      rb.size = blk.size;
      rb.F0 = blk.evaluate(pre.y0);
      rb.vars.resize(reduced.num_vars);
      // Dense reduction: column t_j mixes every original F_a.
      std::vector<Eigen::MatrixXd> cols(reduced.num_vars,
                                        Eigen::MatrixXd::Zero(blk.size, blk.size));
      for (int a = 0; a < p.num_vars; ++a) {
        for (const auto& en : blk.vars[a]) {
          for (int j = 0; j < reduced.num_vars; ++j) {
            const double w = pre.Z(a, j) * en.value;
            if (w == 0.0) continue;
            cols[j](en.row, en.col) += w;
          }
        }
      }
      for (int j = 0; j < reduced.num_vars; ++j) {
        for (int r = 0; r < blk.size; ++r) {
          for (int c = r; c < blk.size; ++c) {
            if (cols[j](r, c) != 0.0) rb.vars[j].push_back({r, c, cols[j](r, c)});
          }
        }
      }
      reduced.blocks.push_back(std::move(rb));
    }
    prog = &reduced;
  }

  const int neq = (mode == SdpaEqualityMode::PairedRows)
                      ? static_cast<int>(prog->equalities.size())
                      : 0;
  std::string out;
  out += "\"generated by hierarchia\"\n";
  out += std::to_string(prog->num_vars) + " = mDIM\n";
  const int nblock = static_cast<int>(prog->blocks.size()) + (neq > 0 ? 1 : 0);
  out += std::to_string(nblock) + " = nBLOCK\n";
  for (std::size_t b = 0; b < prog->blocks.size(); ++b) {
    out += std::to_string(prog->blocks[b].size);
    out += (b + 1 < prog->blocks.size() || neq > 0) ? " " : "";
  }
  if (neq > 0) out += std::to_string(-2 * neq);
  out += "\n";
  for (int a = 0; a < prog->num_vars; ++a) {
    append_value(out, prog->objective.size() == prog->num_vars ? prog->objective[a] : 0.0);
    out += a + 1 < prog->num_vars ? " " : "";
  }
  out += "\n";

  auto emit = [&](int matno, int blkno, int i, int j, double v) {
    if (v == 0.0) return;
    out += std::to_string(matno) + " " + std::to_string(blkno) + " " + std::to_string(i) +
           " " + std::to_string(j) + " ";
    append_value(out, v);
    out += "\n";
  };

  for (std::size_t b = 0; b < prog->blocks.size(); ++b) {
    const auto& blk = prog->blocks[b];
    // Constraint is F0 + sum y_a F_a >= 0; the file stores sum y_a F_a - C >= 0.
    for (int r = 0; r < blk.size; ++r) {
      for (int c = r; c < blk.size; ++c) emit(0, static_cast<int>(b) + 1, r + 1, c + 1, -blk.F0(r, c));
    }
    for (int a = 0; a < prog->num_vars; ++a) {
      for (const auto& en : blk.vars[a]) {
        emit(a + 1, static_cast<int>(b) + 1, en.row + 1, en.col + 1, en.value);
      }
    }
  }
  if (neq > 0) {
    const int blkno = static_cast<int>(prog->blocks.size()) + 1;
    for (int i = 0; i < neq; ++i) {
      const auto& row = prog->equalities[i];
      emit(0, blkno, 2 * i + 1, 2 * i + 1, row.rhs);
      emit(0, blkno, 2 * i + 2, 2 * i + 2, -row.rhs);
      for (const auto& [a, v] : row.coeffs) {
        emit(a + 1, blkno, 2 * i + 1, 2 * i + 1, v);
        emit(a + 1, blkno, 2 * i + 2, 2 * i + 2, -v);
      }
    }
  }
  return out;
}

LinearMatrixProgram parse_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_data_line = [&]() -> std::string {
    while (std::getline(in, line)) {
      std::size_t pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos) continue;
      if (line[pos] == '"' || line[pos] == '*') continue;
      return line;
    }
    throw std::invalid_argument("parse_sdpa: truncated header");
  };

  auto read_int_prefix = [](const std::string& s) {
    std::istringstream ls(s);
    long v;
    if (!(ls >> v)) throw std::invalid_argument("parse_sdpa: expected integer");
    return static_cast<int>(v);
  };

  LinearMatrixProgram p;
  p.num_vars = read_int_prefix(next_data_line());
  const int nblock = read_int_prefix(next_data_line());
  std::vector<int> sizes(nblock);
  {
    std::string sline = next_data_line();
    for (auto& ch : sline) {
      if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
    }
    std::istringstream ls(sline);
    for (int b = 0; b < nblock; ++b) {
      if (!(ls >> sizes[b])) throw std::invalid_argument("parse_sdpa: bad block sizes");
    }
  }
  p.objective = Eigen::VectorXd::Zero(p.num_vars);
  {
    std::string oline = next_data_line();
    for (auto& ch : oline) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(oline);
    for (int a = 0; a < p.num_vars; ++a) {
      if (!(ls >> p.objective[a])) throw std::invalid_argument("parse_sdpa: bad objective row");
    }
  }
  for (int b = 0; b < nblock; ++b) {
    LmiBlock blk;
    blk.size = std::abs(sizes[b]);
    blk.name = sizes[b] < 0 ? "diag" : "block";
    blk.F0 = Eigen::MatrixXd::Zero(blk.size, blk.size);
    blk.vars.resize(p.num_vars);
    p.blocks.push_back(std::move(blk));
  }
  int matno, blkno, i, j;
  double v;
  while (in >> matno >> blkno >> i >> j >> v) {
    if (blkno < 1 || blkno > nblock) throw std::invalid_argument("parse_sdpa: bad block number");
    auto& blk = p.blocks[blkno - 1];
    if (i > j) std::swap(i, j);
    if (matno == 0) {
      blk.F0(i - 1, j - 1) = -v;
      blk.F0(j - 1, i - 1) = -v;
    } else {
      blk.vars[matno - 1].push_back({i - 1, j - 1, v});
    }
  }
  return p;
}

}  // namespace hierarchia
