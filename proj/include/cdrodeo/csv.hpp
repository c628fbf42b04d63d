#pragma once

#include "cdrodeo/errors.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace cdrodeo {

//! Deterministic CSV writer. The first line is a version comment: header
//! columns are never reordered without bumping it.
class CsvWriter
{
public:
  CsvWriter(const std::string& path, const std::string& version_comment,
            const std::string& header)
  {
    if (path.empty() || path == "-") {
      out_ = &std::cout;
    } else {
      file_.open(path);
      if (!file_)
        throw InvalidInput("cannot open output file: " + path);
      out_ = &file_;
    }
    *out_ << "# " << version_comment << '\n' << header << '\n';
  }

  void row(const std::vector<std::string>& cells)
  {
    for (std::size_t i = 0; i < cells.size(); ++i)
      *out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
    *out_ << '\n';
  }

  static std::string num(double v)
  {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
  }

  static std::string num(long long v) { return std::to_string(v); }
  static std::string num(int v) { return std::to_string(v); }

private:
  std::ofstream file_;
  std::ostream* out_ = nullptr;
};

} // namespace cdrodeo
