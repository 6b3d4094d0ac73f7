#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qubus {

/// %.12g
std::string format_number(double x);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  /// Cells are written verbatim; the count must match the header.
  void row(const std::vector<std::string>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace qubus
