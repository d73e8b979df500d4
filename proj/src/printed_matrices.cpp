#include "odd/printed_matrices.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <optional>

#include <fmt/format.h>

namespace odd {

namespace {

struct Symbols {
  double T1, T2, T3, T4, d, w;
  double s2() const { return 2 * d + w; }
  double s3() const { return 2 * d - w; }
  double s4() const { return d - w; }
  double s5() const { return d + w; }
};

struct PrintedEntry {
  const char* text;
  std::function<std::optional<double>(const Symbols&)> eval;
  bool repaired = false;
};

using PrintedMatrix = std::array<std::array<PrintedEntry, 4>, 4>;

// Entries inside the common factor r / (2 sigma1), transcribed exactly as
// typeset. Row 2 column 1 of the group matrix is missing its closing
// parenthesis; it is evaluated as 2(T3 d - T4 sigma4) and flagged.
PrintedMatrix group_matrix() {
  using S = const Symbols&;
  return {{
      {{{"-T2T3s2 + T2T4s3", [](S s) { return -s.T2 * s.T3 * s.s2() + s.T2 * s.T4 * s.s3(); }},
        {"T1T3s2 - T1T4s3", [](S s) { return s.T1 * s.T3 * s.s2() - s.T1 * s.T4 * s.s3(); }},
        {"T4T1w + T4T2w", [](S s) { return s.T4 * s.T1 * s.w + s.T4 * s.T2 * s.w; }},
        {"-T3T1w - T3T2w", [](S s) { return -s.T3 * s.T1 * s.w - s.T3 * s.T2 * s.w; }}}},
      {{{"2(T3d - T4s4", [](S s) { return 2 * (s.T3 * s.d - s.T4 * s.s4()); }, true},
        {"-2(T3s5 - T4d)", [](S s) { return -2 * (s.T3 * s.s5() - s.T4 * s.d); }},
        {"-2T4w", [](S s) { return -2 * s.T4 * s.w; }},
        {"2T3w", [](S s) { return 2 * s.T3 * s.w; }}}},
      {{{"-T2T3w - T2T4w", [](S s) { return -s.T2 * s.T3 * s.w - s.T2 * s.T4 * s.w; }},
        {"T1T3w + T1T4w", [](S s) { return s.T1 * s.T3 * s.w + s.T1 * s.T4 * s.w; }},
        {"-T4T1s3 + T4T2s2", [](S s) { return -s.T4 * s.T1 * s.s3() + s.T4 * s.T2 * s.s2(); }},
        {"T3T1s3 - T3T2s2", [](S s) { return s.T3 * s.T1 * s.s3() - s.T3 * s.T2 * s.s2(); }}}},
      {{{"2T2w", [](S s) { return 2 * s.T2 * s.w; }},
        {"-2T1w", [](S s) { return -2 * s.T1 * s.w; }},
        {"2(T1d - T2s5)", [](S s) { return 2 * (s.T1 * s.d - s.T2 * s.s5()); }},
        {"-2(T1s4 - T2d)", [](S s) { return -2 * (s.T1 * s.s4() - s.T2 * s.d); }}}},
  }};
}

PrintedMatrix body_matrix() {
  using S = const Symbols&;
  return {{
      {{{"-T2T3s5 + T2T4s4", [](S s) { return -s.T2 * s.T3 * s.s5() + s.T2 * s.T4 * s.s4(); }},
        {"T1T3s4 - T1T4s4", [](S s) { return s.T1 * s.T3 * s.s4() - s.T1 * s.T4 * s.s4(); }},
        {"-T4T1s4 + T4T2s4", [](S s) { return -s.T4 * s.T1 * s.s4() + s.T4 * s.T2 * s.s4(); }},
        {"T3T1s4 - T3T2s4", [](S s) { return s.T3 * s.T1 * s.s4() - s.T3 * s.T2 * s.s4(); }}}},
      {{{"T2w + T3d - T4s4", [](S s) { return s.T2 * s.w + s.T3 * s.d - s.T4 * s.s4(); }},
        {"-T1w - T3s4 + T4d", [](S s) { return -s.T1 * s.w - s.T3 * s.s4() + s.T4 * s.d; }},
        {"T1d - T2s4 - T4w", [](S s) { return s.T1 * s.d - s.T2 * s.s4() - s.T4 * s.w; }},
        {"-T1s4 + T2d + T3w", [](S s) { return -s.T1 * s.s4() + s.T2 * s.d + s.T3 * s.w; }}}},
      {{{"2T2(T3 - T4)", [](S s) { return 2 * s.T2 * (s.T3 - s.T4); }},
        {"2T1(-T3 + T4)", [](S s) { return 2 * s.T1 * (-s.T3 + s.T4); }},
        {"2T4(-T1 + T2)", [](S s) { return 2 * s.T4 * (-s.T1 + s.T2); }},
        {"2T3(T1 - T2)", [](S s) { return 2 * s.T3 * (s.T1 - s.T2); }}}},
      {{{"2(-T2w + T3d - T4s4)",
         [](S s) { return 2 * (-s.T2 * s.w + s.T3 * s.d - s.T4 * s.s4()); }},
        {"2(T1w - T3s5 + T4d)", [](S s) { return 2 * (s.T1 * s.w - s.T3 * s.s5() + s.T4 * s.d); }},
        {"2(-T1d + T2s4 - T4w)",
         [](S s) { return 2 * (-s.T1 * s.d + s.T2 * s.s4() - s.T4 * s.w); }},
        {"2(T1s4 - T2d + T3w)", [](S s) { return 2 * (s.T1 * s.s4() - s.T2 * s.d + s.T3 * s.w); }}}},
  }};
}

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

void check_matrix(PrintedEntryCheck::Matrix which, const PrintedMatrix& printed, const Matrix4& numeric,
                  const Symbols& sym, double scale, std::vector<PrintedEntryCheck>& out) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const PrintedEntry& p = printed[i][j];
      PrintedEntryCheck c;
      c.matrix = which;
      c.row = i + 1;
      c.col = j + 1;
      c.printed = p.text;
      c.repaired = p.repaired;
      c.numeric_value = numeric(i, j);
      if (const auto v = p.eval(sym); v && std::isfinite(*v)) {
        c.printed_value = scale * *v;
        c.status = close(c.printed_value, c.numeric_value) ? PrintedEntryCheck::Status::kAgree
                                                           : PrintedEntryCheck::Status::kDiscrepancy;
      }
      out.push_back(std::move(c));
    }
  }
}

const char* status_name(PrintedEntryCheck::Status s) {
  switch (s) {
    case PrintedEntryCheck::Status::kAgree: return "agree";
    case PrintedEntryCheck::Status::kDiscrepancy: return "DISCREPANCY";
    case PrintedEntryCheck::Status::kUnparseable: return "unparseable";
  }
  return "?";
}

}  // namespace

int DerivationReport::count(PrintedEntryCheck::Status s) const {
  int n = 0;
  for (const auto& e : entries) n += e.status == s ? 1 : 0;
  return n;
}

bool DerivationReport::complete() const { return entries.size() == 32; }

std::string DerivationReport::to_text() const {
  std::string out;
  const auto& g = geometry;
  out += fmt::format(
      "derivation log: printed inverse matrices vs numeric inversion\n"
      "geometry: r={:.9g} w={:.9g} d={:.9g} alpha=[{:.9g}, {:.9g}, {:.9g}, {:.9g}] rad\n"
      "sigma1={:.9g}\n",
      g.r, g.w, d, g.alpha[0], g.alpha[1], g.alpha[2], g.alpha[3], sigma1);
  std::optional<PrintedEntryCheck::Matrix> last;
  for (const auto& e : entries) {
    if (e.matrix != last) {
      last = e.matrix;
      out += e.matrix == PrintedEntryCheck::Matrix::kWheelsToGroup ? "[wheels -> group velocities]\n" : "[wheels -> body twist]\n";
    }
    out += fmt::format("  ({},{}) {:<24} printed={:>16.9g} numeric={:>16.9g} {}{}\n", e.row, e.col,
                       e.printed, e.printed_value, e.numeric_value, status_name(e.status),
                       e.repaired ? " (repaired: closing parenthesis added)" : "");
  }
  out += fmt::format("summary: {} agree, {} discrepancies, {} unparseable, {} of 32 entries\n",
                     count(PrintedEntryCheck::Status::kAgree),
                     count(PrintedEntryCheck::Status::kDiscrepancy),
                     count(PrintedEntryCheck::Status::kUnparseable), entries.size());
  return out;
}

DerivationReport cross_check_printed_matrices(const Geometry& geom, double d) {
  geom.require_in_range(d);
  const auto& T = geom.tan_alpha();
  DerivationReport report;
  report.geometry = geom.params();
  report.d = d;
  report.sigma1 = odd::sigma1(geom, d);

  const Matrix4 to_group = detail::wheels_to_group_matrix(geom.r(), geom.w(), T, d);
  Matrix4 odd_forward_matrix;
  // clang-format off
  odd_forward_matrix << 0.5,      0.0, 0.5,     0.0,
                        0.0,      0.5, 0.0,     0.5,
                        -1.0 / d, 0.0, 1.0 / d, 0.0,
                        0.0,      1.0, 0.0,    -1.0;
  // clang-format on
  const Matrix4 to_body = odd_forward_matrix * to_group;

  const Symbols sym{T[0], T[1], T[2], T[3], d, geom.w()};
  const double scale = geom.r() / (2.0 * report.sigma1);
  check_matrix(PrintedEntryCheck::Matrix::kWheelsToGroup, group_matrix(), to_group, sym, scale, report.entries);
  check_matrix(PrintedEntryCheck::Matrix::kWheelsToBody, body_matrix(), to_body, sym, scale, report.entries);
  return report;
}

}  // namespace odd
