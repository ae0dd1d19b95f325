#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "distkern/matrices.hpp"

namespace distkern::csv {

struct ReadOptions {
  bool header = false;
  char delimiter = ',';
};

/// Parses a rectangular table of decimal reals. Failures throw ErrorCode::Parse
/// with the 1-based line and column of the offending cell.
Eigen::MatrixXd read_table(std::istream& in, const ReadOptions& options = {},
                           const std::string& source = "<stream>");
Eigen::MatrixXd read_table(const std::filesystem::path& path, const ReadOptions& options = {});

DataMatrix read_data(const std::filesystem::path& path, const ReadOptions& options = {});
PairwiseMatrix read_pairwise(const std::filesystem::path& path, MatrixKind kind,
                             const ReadOptions& options = {});

/// Shortest round-trip decimal form, fixed notation for magnitudes in
/// [1e-6, 1e15); integral values keep a trailing ".0".
std::string format_number(double value);

void write_table(std::ostream& out, const Eigen::MatrixXd& table);
void write_table(const std::filesystem::path& path, const Eigen::MatrixXd& table);

}  // namespace distkern::csv
