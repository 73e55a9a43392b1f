#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace perdyn {

// 17 significant digits, ',' separator, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(const std::vector<std::string>& columns);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(bool v);
  CsvWriter& field(const std::string& v);
  void end_row();

 private:
  void sep();
  std::ostream& out_;
  bool row_started_ = false;
};

std::string format_number(double v);

}  // namespace perdyn
