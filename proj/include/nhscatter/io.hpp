#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nhscatter/error.hpp"
#include "nhscatter/matrix.hpp"

namespace nhscatter {

/// %.17g, which round-trips every double.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {
inline std::vector<std::vector<double>> read_rows(const nlohmann::json& j, const char* key,
                                                  std::size_t rows, std::size_t cols) {
  if (!j.contains(key)) {
    return std::vector<std::vector<double>>(rows, std::vector<double>(cols, 0.0));
  }
  const auto& arr = j.at(key);
  if (!arr.is_array() || arr.size() != rows) {
    throw ParseError(std::string("matrix JSON: '") + key + "' must have " +
                     std::to_string(rows) + " rows");
  }
  std::vector<std::vector<double>> out;
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = arr[r];
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(std::string("matrix JSON: ragged row ") + std::to_string(r) + " in '" +
                       key + "'");
    }
    std::vector<double> vals;
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError("matrix JSON: non-numeric entry");
      vals.push_back(v.get<double>());
    }
    out.push_back(std::move(vals));
  }
  return out;
}
} // namespace detail

/// Shared matrix format {"n": N, "re": [[...]], "im": [[...]]}. Rectangular
/// matrices (CMT couplings) use {"rows": R, "cols": C, ...} instead of "n".
/// A missing "im" means a real matrix.
inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("matrix JSON: expected an object");
  std::size_t rows = 0;
  std::size_t cols = 0;
  try {
    if (j.contains("n")) {
      rows = cols = j.at("n").get<std::size_t>();
    } else if (j.contains("rows") && j.contains("cols")) {
      rows = j.at("rows").get<std::size_t>();
      cols = j.at("cols").get<std::size_t>();
    } else {
      throw ParseError("matrix JSON: missing \"n\" (or \"rows\"/\"cols\")");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix JSON: bad dimension: ") + e.what());
  }
  if (rows == 0 || cols == 0) throw ParseError("matrix JSON: dimensions must be positive");
  if (!j.contains("re")) throw ParseError("matrix JSON: missing \"re\"");
  const auto re = detail::read_rows(j, "re", rows, cols);
  const auto im = detail::read_rows(j, "im", rows, cols);
  std::vector<cplx> entries;
  entries.reserve(rows * cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) entries.emplace_back(re[r][c], im[r][c]);
  try {
    return {rows, cols, std::move(entries)};
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
}

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json j;
  if (m.is_square()) {
    j["n"] = m.rows();
  } else {
    j["rows"] = m.rows();
    j["cols"] = m.cols();
  }
  auto re = nlohmann::json::array();
  auto im = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto rr = nlohmann::json::array();
    auto ii = nlohmann::json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ii.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline ComplexMatrix read_matrix_file(const std::string& path) {
  try {
    return matrix_from_json(read_json_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline nlohmann::json complex_to_json(cplx z) { return {{"re", z.real()}, {"im", z.imag()}}; }

/// Builds one CSV line from already-formatted fields.
class CsvRow {
public:
  CsvRow& operator<<(double x) { return add(format_double(x)); }
  CsvRow& operator<<(const std::string& s) { return add(s); }
  CsvRow& operator<<(std::size_t n) { return add(std::to_string(n)); }
  std::string str() const { return line_ + "\n"; }

private:
  CsvRow& add(const std::string& field) {
    if (!first_) line_ += ',';
    line_ += field;
    first_ = false;
    return *this;
  }
  std::string line_;
  bool first_ = true;
};

} // namespace nhscatter
