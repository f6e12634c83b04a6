#include "tron/model.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace tron {

namespace {

std::string format_value(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

void save_model(const Model& m, std::ostream& out) {
  out << "loss " << (m.loss == LossKind::Logistic ? "lr" : "l2svm") << '\n';
  out << "n " << m.n << '\n';
  out << "C " << format_value(m.C) << '\n';
  out << "eps " << format_value(m.eps) << '\n';
  out << "backend " << m.backend_tag << '\n';
  out << "w\n";
  for (double v : m.w) out << format_value(v) << '\n';
}

Model load_model(std::istream& in) {
  Model m;
  std::string key;
  bool saw_loss = false, saw_n = false;
  std::size_t line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    if (!(fields >> key)) continue;
    if (key == "w") break;
    std::string value;
    if (!(fields >> value)) throw ParseError("model field '" + key + "' has no value", line_no);
    if (key == "loss") {
      if (value == "lr") {
        m.loss = LossKind::Logistic;
      } else if (value == "l2svm") {
        m.loss = LossKind::L2Svm;
      } else {
        throw ParseError("unknown loss tag '" + value + "'", line_no);
      }
      saw_loss = true;
    } else if (key == "n") {
      m.n = std::stoull(value);
      saw_n = true;
    } else if (key == "C") {
      m.C = std::stod(value);
    } else if (key == "eps") {
      m.eps = std::stod(value);
    } else if (key == "backend") {
      m.backend_tag = value;
    } else {
      throw ParseError("unknown model field '" + key + "'", line_no);
    }
  }
  if (!saw_loss || !saw_n || key != "w") {
    throw ParseError("model file is missing the loss/n header or the w section", line_no);
  }
  m.w.reserve(m.n);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double v;
    auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), v);
    if (ec != std::errc()) throw ParseError("bad weight '" + line + "'", line_no);
    m.w.push_back(v);
  }
  if (m.w.size() != m.n) {
    throw ParseError("model holds " + std::to_string(m.w.size()) + " weights, header says " +
                         std::to_string(m.n),
                     line_no);
  }
  return m;
}

PredictOutcome predict(const Model& m, const Problem& data) {
  PredictOutcome out;
  out.labels.resize(data.instances());
  const FeatureMatrix& X = data.X;
  for (std::size_t i = 0; i < data.instances(); ++i) {
    double score = 0.0;
    if (X.layout() == Layout::SparseCsr) {
      auto offsets = X.row_offsets();
      auto cols = X.col_indices();
      auto values = X.values();
      for (std::int64_t k = offsets[i]; k < offsets[i + 1]; ++k) {
        auto j = static_cast<std::size_t>(cols[static_cast<std::size_t>(k)]);
        if (j < m.n) {
          score += values[static_cast<std::size_t>(k)] * m.w[j];
        } else {
          ++out.ignored_features;
        }
      }
    } else {
      const double* row = X.values().data() + i * X.cols();
      std::size_t limit = X.cols() < m.n ? X.cols() : m.n;
      for (std::size_t j = 0; j < limit; ++j) score += row[j] * m.w[j];
      if (X.cols() > m.n) out.ignored_features += X.cols() - m.n;
    }
    double label = score < 0.0 ? -1.0 : 1.0;  // ties go to +1
    out.labels[i] = label;
    if (i < data.y.size() && data.y[i] == label) ++out.correct;
  }
  return out;
}

}  // namespace tron
