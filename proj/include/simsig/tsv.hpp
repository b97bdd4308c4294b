#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <string>
#include <string_view>

#include "simsig/errors.hpp"
#include "simsig/pairs.hpp"

// TSV input: two numeric columns t1 <TAB> t2, one row per feature, optional
// header detected by a non-numeric first row. Missing or malformed values
// are errors, never dropped; silent dropping would break the pairing.

namespace simsig {

enum class Transform {
  none,
  neglog10,  // q -> -log10(q); input must lie in (0, 1]
};

namespace detail {

inline bool parse_double(std::string_view field, double& out) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

[[noreturn]] inline void bad_row(std::size_t line_number, const std::string& why) {
  throw_error(ErrorKind::malformed_input,
              "line " + std::to_string(line_number) + ": " + why);
}

}  // namespace detail

inline PairedStats read_pairs_tsv(std::istream& in, Transform transform = Transform::none) {
  PairedStats pairs;
  std::string line;
  std::size_t line_number = 0;
  bool first_row = true;

  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;  // trailing newline
      detail::bad_row(line_number, "empty line");
    }

    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      if (first_row) detail::bad_row(line_number, "expected two tab-separated columns");
      detail::bad_row(line_number, "expected two tab-separated columns");
    }
    if (line.find('\t', tab + 1) != std::string::npos) {
      detail::bad_row(line_number, "expected exactly two columns");
    }
    const std::string_view f1(line.data(), tab);
    const std::string_view f2(line.data() + tab + 1, line.size() - tab - 1);

    double v1 = 0.0, v2 = 0.0;
    const bool ok = detail::parse_double(f1, v1) && detail::parse_double(f2, v2);
    if (!ok) {
      if (first_row) {  // header row
        first_row = false;
        continue;
      }
      detail::bad_row(line_number, "non-numeric field");
    }
    first_row = false;

    if (transform == Transform::neglog10) {
      if (!(v1 > 0.0 && v1 <= 1.0) || !(v2 > 0.0 && v2 <= 1.0)) {
        detail::bad_row(line_number, "value outside (0, 1] under --transform neglog10");
      }
      v1 = -std::log10(v1);
      v2 = -std::log10(v2);
    }
    pairs.t1.push_back(v1);
    pairs.t2.push_back(v2);
  }

  validate_pairs(pairs);
  return pairs;
}

inline PairedStats read_pairs_tsv_file(const std::string& path,
                                       Transform transform = Transform::none) {
  std::ifstream in(path);
  if (!in) {
    throw_error(ErrorKind::file_not_found, "cannot open input file: " + path);
  }
  return read_pairs_tsv(in, transform);
}

}  // namespace simsig
