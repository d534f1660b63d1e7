#pragma once

#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace canneal {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Formats with 17 significant digits so a round-trip parse is exact.
std::string format_double(double v);

using CsvValue = std::variant<long, double, std::string>;

// RFC-4180-style writer: header row, comma separated, LF line endings.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, std::span<const std::string> header);
  void row(std::span<const CsvValue> values);
  void close();
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
  std::size_t columns_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::string& path);

}  // namespace canneal
