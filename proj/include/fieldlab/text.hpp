#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace fieldlab {

// shortest form preserving the value exactly
std::string fmt_double(double v, int sig = 17);

// CSV with a '#'-prefixed schema comment, header row, '.' decimal. Cell
// formatting is byte-stable for identical doubles.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& schema,
            const std::vector<std::string>& header);

  void row(const std::vector<std::string>& cells);
  static std::string num(double v);
  static std::string num(long long v);
  const std::string& path() const { return path_; }

 private:
  std::ofstream out_;
  std::string path_;
  std::size_t width_;
};

}  // namespace fieldlab
