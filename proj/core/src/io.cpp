#include "orbitlab/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include "orbitlab/spectral.hpp"

namespace orbitlab::harness {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string timestamp_utc() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::string& comment,
                     const std::vector<std::string>& columns)
    : out_(path), columns_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot write " + path);
  out_ << "# " << comment << " " << timestamp_utc() << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

CsvWriter& CsvWriter::cell(double x) {
  out_ << (filled_++ ? "," : "") << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::cell(long long x) {
  out_ << (filled_++ ? "," : "") << x;
  return *this;
}

CsvWriter& CsvWriter::cell(const std::string& x) {
  const bool quote = x.find_first_of(",\"\n") != std::string::npos;
  out_ << (filled_++ ? "," : "");
  if (!quote) {
    out_ << x;
  } else {
    out_ << '"';
    for (char c : x) out_ << (c == '"' ? "\"\"" : std::string(1, c));
    out_ << '"';
  }
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) throw std::logic_error("CsvWriter: row width does not match header");
  out_ << "\n";
  filled_ = 0;
}

void write_loop_csv(const std::string& path, const loops::Loop& h, const std::string& comment) {
  std::vector<std::string> cols = {"t"};
  for (int i = 0; i < h.dim(); ++i) cols.push_back("x" + std::to_string(i + 1));
  CsvWriter w(path, comment, cols);
  const Vec t = spectral::grid(h.N());
  for (int j = 0; j < h.N(); ++j) {
    w.cell(t[j]);
    for (int i = 0; i < h.dim(); ++i) w.cell(h.X(j, i));
    w.end_row();
  }
}

loops::Loop read_loop_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  int width = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 't') continue;
    std::vector<double> r;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) r.push_back(std::stod(item));
    if (width < 0) width = static_cast<int>(r.size());
    if (static_cast<int>(r.size()) != width || width < 2)
      throw std::runtime_error(path + ": ragged loop CSV");
    rows.push_back(std::move(r));
  }
  loops::Loop h;
  h.X.resize(static_cast<int>(rows.size()), width - 1);
  for (int j = 0; j < h.X.rows(); ++j)
    for (int i = 0; i + 1 < width; ++i) h.X(j, i) = rows[j][i + 1];
  h.on_manifold = false;
  return h;
}

}  // namespace orbitlab::harness
