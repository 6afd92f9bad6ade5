#pragma once

#include <string>

#include "hierarchia/program.hpp"

namespace hierarchia {

enum class SdpaEqualityMode {
  PairedRows,  // each equality becomes a +/- pair in one diagonal block
  Eliminated,  // nullspace reduction applied before export
};

// SDPA sparse format (.dat-s): mDIM, nBLOCK, block sizes (negative = diagonal),
// objective row, then "matno blkno i j value" quintuples, 1-indexed, upper
// triangle, with matno 0 holding the constant matrix.
std::string export_sdpa(const LinearMatrixProgram& p,
                        SdpaEqualityMode mode = SdpaEqualityMode::PairedRows);

// Independent reader for round-trip checks; parses into the same model with
// equalities folded into the exported form (a diagonal block).
LinearMatrixProgram parse_sdpa(const std::string& text);

}  // namespace hierarchia
