// Produces the frozen reference objectives in golden.hpp. Runs an
// independent long-double gradient-descent minimizer over the fixed
// fixtures; it shares nothing with the library's evaluation paths
// except the fixture generator. Build with `cmake --build build
// --target golden_gen` and run once; paste the printed values.

#include <cmath>
#include <cstdio>
#include <vector>

#include "support/testgen.hpp"

namespace {

using std::size_t;

struct DenseProblem {
  size_t l = 0;
  size_t n = 0;
  std::vector<long double> X;  // row-major
  std::vector<long double> y;
  long double C = 1.0;
};

DenseProblem densify(const tron::Problem& p) {
  DenseProblem d;
  d.l = p.instances();
  d.n = p.features();
  d.C = p.C;
  d.X.assign(p.X.values().begin(), p.X.values().end());  // fixtures are dense
  d.y.assign(p.y.begin(), p.y.end());
  return d;
}

long double objective(const DenseProblem& p, bool logistic, const std::vector<long double>& w) {
  long double f = 0.0L;
  for (long double v : w) f += v * v;
  f *= 0.5L;
  for (size_t i = 0; i < p.l; ++i) {
    long double z = 0.0L;
    for (size_t j = 0; j < p.n; ++j) z += p.X[i * p.n + j] * w[j];
    long double t = p.y[i] * z;
    if (logistic) {
      f += p.C * (t >= 0.0L ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t)));
    } else {
      long double margin = 1.0L - t;
      if (margin > 0.0L) f += p.C * margin * margin;
    }
  }
  return f;
}

std::vector<long double> gradient(const DenseProblem& p, bool logistic,
                                  const std::vector<long double>& w) {
  std::vector<long double> g(w);
  for (size_t i = 0; i < p.l; ++i) {
    long double z = 0.0L;
    for (size_t j = 0; j < p.n; ++j) z += p.X[i * p.n + j] * w[j];
    long double coeff = 0.0L;
    if (logistic) {
      long double t = p.y[i] * z;
      long double h = 1.0L / (1.0L + std::exp(-t));
      coeff = p.C * (h - 1.0L) * p.y[i];
    } else {
      long double margin = 1.0L - p.y[i] * z;
      if (margin > 0.0L) coeff = 2.0L * p.C * (z - p.y[i]);
    }
    if (coeff != 0.0L) {
      for (size_t j = 0; j < p.n; ++j) g[j] += coeff * p.X[i * p.n + j];
    }
  }
  return g;
}

long double spectral_bound(const DenseProblem& p) {
  // Power iteration on X'X.
  std::vector<long double> v(p.n, 1.0L);
  long double lambda = 0.0L;
  for (int it = 0; it < 200; ++it) {
    std::vector<long double> u(p.l, 0.0L);
    for (size_t i = 0; i < p.l; ++i) {
      for (size_t j = 0; j < p.n; ++j) u[i] += p.X[i * p.n + j] * v[j];
    }
    std::vector<long double> next(p.n, 0.0L);
    for (size_t i = 0; i < p.l; ++i) {
      for (size_t j = 0; j < p.n; ++j) next[j] += p.X[i * p.n + j] * u[i];
    }
    long double norm = 0.0L;
    for (long double x : next) norm += x * x;
    norm = std::sqrt(norm);
    lambda = norm;
    for (size_t j = 0; j < p.n; ++j) v[j] = next[j] / norm;
  }
  return lambda;
}

void minimize(const char* name, const tron::Problem& src, bool logistic, long iters) {
  DenseProblem p = densify(src);
  long double curvature_scale = logistic ? 0.25L : 2.0L;
  long double lipschitz = 1.0L + curvature_scale * p.C * spectral_bound(p) * 1.1L;
  long double step = 1.0L / lipschitz;
  std::vector<long double> w(p.n, 0.0L);
  for (long k = 0; k < iters; ++k) {
    auto g = gradient(p, logistic, w);
    for (size_t j = 0; j < p.n; ++j) w[j] -= step * g[j];
  }
  auto g = gradient(p, logistic, w);
  long double gmax = 0.0L;
  for (long double x : g) gmax = std::max(gmax, std::fabs(x));
  std::printf("%s = %.21Lg   (final grad inf-norm %.3Le, step %.3Le)\n", name,
              objective(p, logistic, w), gmax, step);
}

}  // namespace

int main() {
  minimize("golden_lr_50x5", testgen::dense_problem(1001, 50, 5, 1.0), true, 400000);
  minimize("golden_lr_200x20", testgen::dense_problem(2001, 200, 20, 1.0), true, 2000000);
  minimize("golden_svm_200x20", testgen::dense_problem(3001, 200, 20, 1.0), false, 2000000);
  return 0;
}
