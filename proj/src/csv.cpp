#include "distkern/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "distkern/error.hpp"

namespace distkern::csv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, std::size_t column,
                             const std::string& why) {
  std::ostringstream msg;
  msg << source << ": row " << line << ", column " << column << ": " << why;
  throw Error(ErrorCode::Parse, msg.str());
}

}  // namespace

Eigen::MatrixXd read_table(std::istream& in, const ReadOptions& options, const std::string& source) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    std::vector<double> row;
    std::string_view rest(line);
    std::size_t column = 0;
    while (true) {
      ++column;
      const std::size_t cut = rest.find(options.delimiter);
      const std::string_view cell = trim(rest.substr(0, cut));
      if (cell.empty()) parse_fail(source, line_no, column, "empty cell");
      double value = 0.0;
      const char* first = cell.data();
      if (*first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        parse_fail(source, line_no, column, "not a number: '" + std::string(cell) + "'");
      }
      if (!std::isfinite(value)) parse_fail(source, line_no, column, "non-finite value");
      row.push_back(value);
      if (cut == std::string_view::npos) break;
      rest.remove_prefix(cut + 1);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream why;
      why << "expected " << rows.front().size() << " columns, found " << row.size();
      parse_fail(source, line_no, std::min(row.size(), rows.front().size()) + 1, why.str());
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidInput, source + ": no data rows");

  Eigen::MatrixXd table(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    }
  }
  return table;
}

Eigen::MatrixXd read_table(const std::filesystem::path& path, const ReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path.string());
  return read_table(in, options, path.string());
}

DataMatrix read_data(const std::filesystem::path& path, const ReadOptions& options) {
  return DataMatrix(read_table(path, options));
}

PairwiseMatrix read_pairwise(const std::filesystem::path& path, MatrixKind kind,
                             const ReadOptions& options) {
  return PairwiseMatrix(read_table(path, options), kind,
                        std::string(to_string(kind)) + " matrix from " + path.filename().string());
}

std::string format_number(double value) {
  char buf[64];
  // Fixed notation for everyday magnitudes, so 1e-4 prints as 0.0001.
  const double mag = std::abs(value);
  const bool fixed = mag == 0.0 || (mag >= 1e-6 && mag < 1e15);
  const auto [ptr, ec] = fixed ? std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed)
                               : std::to_chars(buf, buf + sizeof(buf), value);
  std::string out(buf, ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

void write_table(std::ostream& out, const Eigen::MatrixXd& table) {
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_number(table(i, c));
    }
    out << '\n';
  }
}

void write_table(const std::filesystem::path& path, const Eigen::MatrixXd& table) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  write_table(out, table);
}

}  // namespace distkern::csv
