#pragma once

#include <fstream>
#include <iomanip>
#include <stdexcept>
#include <string>
#include <vector>

// Delimited-text emission for scan tables and field grids: comma-separated,
// header row, full-precision scientific notation, byte-identical across runs
// on the same platform for identical inputs.

namespace zaremba::io {

struct GridSample {
  double x, y;
  double re, im;
  bool interior;  // mask: false rows carry zeros for the field columns
};

namespace detail {

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << std::scientific << std::setprecision(16);
  return out;
}

inline void check_write(const std::ofstream& out, const std::string& path) {
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

// Writes rows of equal length under the given column names.  An empty
// record list produces a header-only file.
inline void emit_table(const std::vector<std::string>& columns,
                       const std::vector<std::vector<double>>& rows,
                       const std::string& path) {
  auto out = detail::open_for_write(path);
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("row width does not match header: " + path);
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  detail::check_write(out, path);
}

// Writes (x, y, re, im, mask) samples of a field on a rectangular grid;
// exterior points are masked with 0 and carry zero field values.
inline void emit_grid(const std::vector<GridSample>& samples,
                      const std::string& path) {
  auto out = detail::open_for_write(path);
  out << "x,y,re_z,im_z,mask\n";
  for (const auto& s : samples) {
    out << s.x << ',' << s.y << ',' << (s.interior ? s.re : 0.0) << ','
        << (s.interior ? s.im : 0.0) << ',' << (s.interior ? 1 : 0) << '\n';
  }
  detail::check_write(out, path);
}

}  // namespace zaremba::io
