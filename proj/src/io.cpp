#include "tron/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace tron {

namespace {

const char* skip_ws(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t')) ++p;
  return p;
}

double parse_double(const char*& p, const char* end, std::size_t line, const char* what) {
  // from_chars rejects an explicit plus sign, which LIBSVM labels carry
  const char* start = (p < end && *p == '+') ? p + 1 : p;
  double value;
  auto [next, ec] = std::from_chars(start, end, value);
  if (ec == std::errc::invalid_argument) {
    throw ParseError(std::string("expected ") + what + " near '" +
                         std::string(p, std::min<std::ptrdiff_t>(end - p, 12)) + "'",
                     line);
  }
  if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
    throw ParseError(std::string(what) + " is outside the finite double range", line);
  }
  p = next;
  return value;
}

double map_label(double raw, std::size_t line) {
  if (raw == 1.0) return 1.0;
  if (raw == -1.0) return -1.0;
  if (raw == 0.0) return -1.0;
  throw UnsupportedLabelError("label " + std::to_string(raw) + " not in {-1, 0, +1}", line);
}

void append_value(std::string& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Problem parse_libsvm(std::istream& in, std::size_t n_override) {
  Problem p;
  std::vector<std::int64_t> offsets{0};
  std::vector<std::int32_t> cols;
  std::vector<double> values;
  std::size_t max_index = 0;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    ptr = skip_ws(ptr, end);
    if (ptr == end) continue;

    double raw = parse_double(ptr, end, line_no, "label");
    if (ptr < end && *ptr != ' ' && *ptr != '\t') {
      throw ParseError("trailing characters after the label", line_no);
    }
    p.y.push_back(map_label(raw, line_no));

    std::int64_t prev_index = 0;
    for (;;) {
      ptr = skip_ws(ptr, end);
      if (ptr == end) break;
      std::int64_t index;
      const char* index_start = (*ptr == '+') ? ptr + 1 : ptr;
      auto [next, ec] = std::from_chars(index_start, end, index);
      if (ec != std::errc()) {
        throw ParseError("expected a feature index near '" +
                             std::string(ptr, std::min<std::ptrdiff_t>(end - ptr, 12)) + "'",
                         line_no);
      }
      ptr = next;
      if (ptr == end || *ptr != ':') {
        throw ParseError("expected ':' after feature index " + std::to_string(index), line_no);
      }
      ++ptr;
      if (index < 1) {
        throw ParseError("feature index " + std::to_string(index) + " is not 1-based", line_no);
      }
      if (index <= prev_index) {
        throw ParseError("feature index " + std::to_string(index) +
                             " not strictly ascending (previous " + std::to_string(prev_index) +
                             ")",
                         line_no);
      }
      if (index > std::numeric_limits<std::int32_t>::max()) {
        throw ParseError("feature index " + std::to_string(index) + " too large", line_no);
      }
      double value = parse_double(ptr, end, line_no, "feature value");
      if (ptr < end && *ptr != ' ' && *ptr != '\t') {
        throw ParseError("trailing characters after a feature value", line_no);
      }
      prev_index = index;
      cols.push_back(static_cast<std::int32_t>(index - 1));
      values.push_back(value);
      if (static_cast<std::size_t>(index) > max_index) {
        max_index = static_cast<std::size_t>(index);
      }
    }
    offsets.push_back(static_cast<std::int64_t>(values.size()));
  }

  std::size_t n = max_index;
  if (n_override > 0) {
    if (max_index > n_override) {
      throw ParseError("feature index " + std::to_string(max_index) +
                           " exceeds the requested dimension " + std::to_string(n_override),
                       0);
    }
    n = n_override;
  }
  p.X = FeatureMatrix::csr(p.y.size(), n, std::move(offsets), std::move(cols),
                           std::move(values));
  return p;
}

void write_libsvm(const Problem& p, std::ostream& out) {
  std::string buf;
  for (std::size_t i = 0; i < p.instances(); ++i) {
    buf.clear();
    buf += p.y[i] > 0 ? "+1" : "-1";
    if (p.X.layout() == Layout::SparseCsr) {
      auto offsets = p.X.row_offsets();
      auto cols = p.X.col_indices();
      auto values = p.X.values();
      for (std::int64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        buf += ' ';
        buf += std::to_string(cols[static_cast<std::size_t>(k)] + 1);
        buf += ':';
        append_value(buf, values[static_cast<std::size_t>(k)]);
      }
    } else {
      const double* row = p.X.values().data() + i * p.X.cols();
      for (std::size_t j = 0; j < p.X.cols(); ++j) {
        if (row[j] == 0.0) continue;
        buf += ' ';
        buf += std::to_string(j + 1);
        buf += ':';
        append_value(buf, row[j]);
      }
    }
    buf += '\n';
    out << buf;
  }
}

Problem load_dense(std::istream& in, std::size_t n) {
  Problem p;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    ptr = skip_ws(ptr, end);
    if (ptr == end) continue;

    double raw = parse_double(ptr, end, line_no, "label");
    p.y.push_back(map_label(raw, line_no));
    std::size_t fields = 0;
    for (;;) {
      ptr = skip_ws(ptr, end);
      if (ptr == end) break;
      if (fields == n) {
        throw ParseError("more than " + std::to_string(n) + " values", line_no);
      }
      values.push_back(parse_double(ptr, end, line_no, "feature value"));
      ++fields;
    }
    if (fields != n) {
      throw ParseError("expected " + std::to_string(n) + " values, got " +
                           std::to_string(fields),
                       line_no);
    }
  }
  p.X = FeatureMatrix::dense(p.y.size(), n, std::move(values));
  return p;
}

DatasetStats dataset_stats(const Problem& p) {
  DatasetStats s;
  s.instances = p.instances();
  s.features = p.features();
  if (p.X.layout() == Layout::SparseCsr) {
    s.nonzeros = p.X.stored();
  } else {
    for (double v : p.X.values()) {
      if (v != 0.0) ++s.nonzeros;
    }
  }
  for (double label : p.y) {
    if (label > 0) {
      ++s.positives;
    } else {
      ++s.negatives;
    }
  }
  return s;
}

}  // namespace tron
