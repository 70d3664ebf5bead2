#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace driftwave::io {

// Shortest round-trip decimal form; reruns with the same inputs produce
// byte-identical files.
std::string format_double(double v);

// RFC-4180-style quoting: fields containing commas, quotes or newlines are
// wrapped in double quotes with embedded quotes doubled.
std::string csv_escape(const std::string& field);

class CsvWriter {
  public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void row(const std::vector<std::string>& fields);

  private:
    std::ostream& out_;
};

}  // namespace driftwave::io
