#include "fieldlab/text.hpp"

#include <cstdio>
#include <stdexcept>

namespace fieldlab {

std::string fmt_double(double v, int sig) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", sig, v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& schema,
                     const std::vector<std::string>& header)
    : out_(path), path_(path), width_(header.size()) {
  if (!out_) throw std::runtime_error("cannot open csv file: " + path);
  out_ << "# " << schema << "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out_ << ',';
    out_ << header[i];
  }
  out_ << "\n";
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != width_)
    throw std::runtime_error("csv row width mismatch in " + path_);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << "\n";
}

std::string CsvWriter::num(double v) { return fmt_double(v, 12); }

std::string CsvWriter::num(long long v) { return std::to_string(v); }

}  // namespace fieldlab
