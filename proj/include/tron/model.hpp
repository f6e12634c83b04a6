#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>

#include "tron/loss.hpp"

namespace tron {

/// Trained classifier plus the solver metadata that produced it.
struct Model {
  LossKind loss = LossKind::Logistic;
  std::size_t n = 0;
  double C = 1.0;
  double eps = 0.1;
  std::string backend_tag = "seq";
  RealVector w;
};

void save_model(const Model& m, std::ostream& out);
Model load_model(std::istream& in);

struct PredictOutcome {
  RealVector labels;              // sign(x_i . w), ties to +1
  std::size_t correct = 0;        // against the data file's labels
  std::size_t ignored_features = 0;  // entries beyond the model dimension
};

/// Score every instance against the model. Feature indices beyond the
/// model's dimension are ignored (counted for the caller to warn about).
PredictOutcome predict(const Model& m, const Problem& data);

}  // namespace tron
