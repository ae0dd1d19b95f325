#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "distkern/csv.hpp"
#include "distkern/error.hpp"

using namespace distkern;

namespace {

std::string parse_error(const std::string& text, csv::ReadOptions opts = {}) {
  std::istringstream in(text);
  try {
    csv::read_table(in, opts, "t.csv");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Parse);
    return e.what();
  }
  ADD_FAILURE() << "no error for: " << text;
  return {};
}

}  // namespace

TEST(Csv, ReadsTableWithHeader) {
  std::istringstream in("a,b\n1,2.5\n-3e2, +4\n");
  csv::ReadOptions opts;
  opts.header = true;
  const auto t = csv::read_table(in, opts);
  ASSERT_EQ(t.rows(), 2);
  ASSERT_EQ(t.cols(), 2);
  EXPECT_EQ(t(0, 1), 2.5);
  EXPECT_EQ(t(1, 0), -300.0);
  EXPECT_EQ(t(1, 1), 4.0);
}

TEST(Csv, ErrorsCarryRowAndColumn) {
  EXPECT_NE(parse_error("1,2\n3,x\n").find("row 2, column 2"), std::string::npos);
  EXPECT_NE(parse_error("1,2\n3\n").find("row 2"), std::string::npos);
  EXPECT_NE(parse_error("1,,2\n").find("row 1, column 2"), std::string::npos);
  EXPECT_NE(parse_error("1,nan\n").find("column 2"), std::string::npos);
  csv::ReadOptions h;
  h.header = true;
  EXPECT_NE(parse_error("h\n1\nfoo\n", h).find("row 3"), std::string::npos);
}

TEST(Csv, MissingFile) {
  EXPECT_THROW(csv::read_table(std::filesystem::path("/nonexistent/file.csv")), Error);
}

TEST(Csv, FormatNumberRoundTrips) {
  EXPECT_EQ(csv::format_number(1.0), "1.0");
  EXPECT_EQ(csv::format_number(0.01), "0.01");
  EXPECT_EQ(csv::format_number(0.0001), "0.0001");
  EXPECT_EQ(csv::format_number(-2.5), "-2.5");
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -7.25e-7, 123456.789}) {
    EXPECT_EQ(std::stod(csv::format_number(v)), v);
  }
}

TEST(Csv, WriteThenReadIsLossless) {
  Eigen::MatrixXd m(2, 3);
  m << 1.0 / 3.0, 2.0, -1e-9, 0.1, 1e20, 7.0;
  std::stringstream s;
  csv::write_table(s, m);
  EXPECT_EQ(csv::read_table(s), m);
}

TEST(Csv, ReadPairwiseValidates) {
  const auto path = std::filesystem::temp_directory_path() / "distkern_csv_test.csv";
  {
    std::ofstream f(path);
    f << "0,1\n2,0\n";
  }
  EXPECT_THROW(csv::read_pairwise(path, MatrixKind::Distance), Error);
  {
    std::ofstream f(path);
    f << "0,1\n1,0\n";
  }
  EXPECT_EQ(csv::read_pairwise(path, MatrixKind::Distance).max_element(), 1.0);
  std::filesystem::remove(path);
}
