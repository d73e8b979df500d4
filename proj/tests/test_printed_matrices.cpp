#include <gtest/gtest.h>

#include "odd/printed_matrices.hpp"

using namespace odd;

TEST(PrintedMatrices, ReportIsComplete) {
  const auto rep = cross_check_printed_matrices(Geometry::defaults(), 0.4);
  EXPECT_TRUE(rep.complete());
  EXPECT_EQ(rep.entries.size(), 32u);
  EXPECT_EQ(rep.count(PrintedEntryCheck::Status::kAgree) +
                rep.count(PrintedEntryCheck::Status::kDiscrepancy) +
                rep.count(PrintedEntryCheck::Status::kUnparseable),
            32);
}

TEST(PrintedMatrices, WheelToGroupInverseAgrees) {
  const auto rep = cross_check_printed_matrices(Geometry::defaults(), 0.55);
  for (const auto& e : rep.entries) {
    if (e.matrix == PrintedEntryCheck::Matrix::kWheelsToGroup) {
      EXPECT_EQ(e.status, PrintedEntryCheck::Status::kAgree) << e.printed;
    }
  }
}

TEST(PrintedMatrices, KnownBodyMatrixTypos) {
  const auto rep = cross_check_printed_matrices(Geometry::defaults(), 0.4);
  std::vector<std::pair<int, int>> bad;
  for (const auto& e : rep.entries) {
    if (e.matrix == PrintedEntryCheck::Matrix::kWheelsToBody && e.status == PrintedEntryCheck::Status::kDiscrepancy) {
      bad.emplace_back(e.row, e.col);
    }
  }
  const std::vector<std::pair<int, int>> expected{{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}, {4, 3}};
  EXPECT_EQ(bad, expected);
}

TEST(PrintedMatrices, TextListsEveryEntry) {
  const auto rep = cross_check_printed_matrices(Geometry::defaults(), 0.4);
  const std::string text = rep.to_text();
  EXPECT_NE(text.find("32 of 32"), std::string::npos);
  EXPECT_NE(text.find("DISCREPANCY"), std::string::npos);
  EXPECT_NE(text.find("repaired"), std::string::npos);
}
