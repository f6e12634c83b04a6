#pragma once

#include <cmath>
#include <cstddef>

#include "tron/linalg.hpp"

namespace tron {

enum class LossKind { Logistic, L2Svm };

/// How the L2-SVM Hessian-vector product walks the active rows:
/// Gathered uses a materialized submatrix X_{I,:} (fast, memory-heavy),
/// Indirect traverses rows through the index set (memory-light).
enum class SvmStrategy { Gathered, Indirect };

/// Training problem: feature matrix X, labels y in {-1,+1}, loss weight C.
struct Problem {
  FeatureMatrix X;
  RealVector y;
  double C = 1.0;

  void validate() const;
  std::size_t instances() const { return X.rows(); }
  std::size_t features() const { return X.cols(); }
};

// =============================================================================
// Loss states are immutable snapshots keyed to the weight vector that
// produced them; the solver recomputes after every accepted step.
// Passing a state built from a different w is a contract violation.
// =============================================================================

/// Per-instance quantities of the logistic loss at w, produced by one
/// fused traversal: margins z = Xw, zhat_i = (h(y_i z_i) - 1) y_i,
/// dvec_i = h(y_i z_i)(1 - h(y_i z_i)), alpha_i = log(1 + exp(-y_i z_i)),
/// and the objective f = w'w/2 + C sum alpha.
struct LogisticState {
  RealVector z;
  RealVector zhat;
  RealVector dvec;
  RealVector alpha;
  double f = 0.0;
};

/// L2-SVM margins and strict active set I = { i : 1 - y_i z_i > 0 },
/// with f = w'w/2 + C sum_{i in I} (1 - y_i z_i)^2.
struct SvmState {
  RealVector z;
  IndexSet active;
  double f = 0.0;
};

LogisticState logistic_fused_pass(const Problem& p, const RealVector& w,
                                  const Executor& exec = {}, KernelScratch* scratch = nullptr);

double logistic_objective(const Problem& p, const RealVector& w,
                          const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// grad = w + C X' zhat
RealVector logistic_gradient(const Problem& p, const LogisticState& state, const RealVector& w,
                             const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// out = v + C X'(D (X v)), staged as a0 = Xv, a1 = D a0, a2 = C X' a1.
void logistic_hessian_vec(const Problem& p, const LogisticState& state, const RealVector& v,
                          RealVector& out, const Executor& exec = {},
                          KernelScratch* scratch = nullptr);

SvmState svm_fused_pass(const Problem& p, const RealVector& w,
                        const Executor& exec = {}, KernelScratch* scratch = nullptr);

double svm_objective(const Problem& p, const RealVector& w,
                     const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// grad = w + 2C sum_{i in I} (z_i - y_i) x_i
RealVector svm_gradient(const Problem& p, const SvmState& state, const RealVector& w,
                        const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// out = v + 2C sum_{i in I} (x_i' v) x_i. Gathered evaluates through the
/// caller-supplied materialized submatrix (throws StrategyPreconditionError
/// when absent); Indirect walks the index set. The two routes agree.
void svm_hessian_vec(const Problem& p, const SvmState& state, const RealVector& v,
                     RealVector& out, SvmStrategy strategy,
                     const FeatureMatrix* gathered = nullptr,
                     const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// Diagonal of the (generalized) Hessian: M_j = 1 + C s sum_i d_i X_ij^2
/// with d = dvec, s = 1 for the logistic loss.
RealVector hessian_precond_diag(const Problem& p, const LogisticState& state,
                                const Executor& exec = {}, KernelScratch* scratch = nullptr);

/// d_i = 1_{i in I}, s = 2 for the L2-SVM loss.
RealVector hessian_precond_diag(const Problem& p, const SvmState& state,
                                const Executor& exec = {}, KernelScratch* scratch = nullptr);

namespace detail {

/// log(1 + exp(-t)) without overflow for any t.
inline double log1p_exp_neg(double t) {
  if (t >= 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

}  // namespace detail

}  // namespace tron
