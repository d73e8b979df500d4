#pragma once

#include <string>
#include <vector>

#include "odd/mecanum_kinematics.hpp"

namespace odd {

/// One entry of the typeset closed-form inverse matrices (wheel rates to
/// group velocities, and wheel rates to body twist), evaluated and compared
/// with the numerically inverted system.
struct PrintedEntryCheck {
  enum class Status { kAgree, kDiscrepancy, kUnparseable };
  enum class Matrix { kWheelsToGroup, kWheelsToBody };

  Matrix matrix = Matrix::kWheelsToGroup;
  int row = 0;       // 1-based
  int col = 0;       // 1-based
  std::string printed;
  bool repaired = false;  // evaluated after closing an unbalanced parenthesis
  Status status = Status::kUnparseable;
  double printed_value = 0.0;
  double numeric_value = 0.0;
};

struct DerivationReport {
  GeometryParams geometry;
  double d = 0.0;
  double sigma1 = 0.0;
  std::vector<PrintedEntryCheck> entries;

  int count(PrintedEntryCheck::Status s) const;
  /// 32 entries (two 4x4 matrices), every one classified.
  bool complete() const;
  std::string to_text() const;
};

/// Evaluates every entry of the typeset matrices at `d` against the numeric
/// inverse. Agreement is reported, never assumed.
DerivationReport cross_check_printed_matrices(const Geometry& geom, double d);

}  // namespace odd
