#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "orbitlab/loops.hpp"

namespace orbitlab::harness {

// CSV with one '#' comment line (tool, command, timestamp) before the header.
// Numbers use %.17g so bodies are byte-identical across reruns.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& comment,
            const std::vector<std::string>& columns);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(int x) { return cell(static_cast<long long>(x)); }
  CsvWriter& cell(const std::string& x);
  void end_row();

 private:
  std::ofstream out_;
  std::size_t columns_ = 0, filled_ = 0;
};

std::string format_double(double x);
std::string timestamp_utc();

// Loop CSV: columns t, x1..xn.
void write_loop_csv(const std::string& path, const loops::Loop& h, const std::string& comment);
loops::Loop read_loop_csv(const std::string& path);

}  // namespace orbitlab::harness
