#include "tron/loss.hpp"

#include <array>
#include <cmath>
#include <string>

namespace tron {

namespace {

void check_w(const Problem& p, const RealVector& w, const char* what) {
  if (w.size() != p.features()) {
    throw DimensionError(std::string(what) + ": w has length " + std::to_string(w.size()) +
                         ", expected " + std::to_string(p.features()));
  }
}

}  // namespace

void Problem::validate() const {
  if (y.size() != X.rows()) {
    throw DimensionError("problem: " + std::to_string(y.size()) + " labels for " +
                         std::to_string(X.rows()) + " instances");
  }
  for (double v : y) {
    if (v != 1.0 && v != -1.0) {
      throw DimensionError("problem: label " + std::to_string(v) + " not in {-1,+1}");
    }
  }
  if (!(C > 0.0)) {
    throw DimensionError("problem: C must be positive");
  }
}

LogisticState logistic_fused_pass(const Problem& p, const RealVector& w,
                                  const Executor& exec, KernelScratch* scratch) {
  (void)scratch;
  check_w(p, w, "logistic_fused_pass");
  const std::size_t l = p.instances();
  LogisticState s;
  matvec(p.X, w, s.z, exec);
  s.zhat.resize(l);
  s.dvec.resize(l);
  s.alpha.resize(l);
  // One traversal of the instances produces all per-instance quantities.
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(l, b);
    for (std::size_t i = begin; i < end; ++i) {
      double t = p.y[i] * s.z[i];
      double sig = 1.0 / (1.0 + std::exp(t));  // 1 - h(t); exp overflow -> inf -> 0
      s.zhat[i] = -p.y[i] * sig;
      s.dvec[i] = (1.0 - sig) * sig;
      s.alpha[i] = detail::log1p_exp_neg(t);
    }
  });
  s.f = 0.5 * dot(w, w) + p.C * reduce_sum(s.alpha, exec);
  return s;
}

double logistic_objective(const Problem& p, const RealVector& w,
                          const Executor& exec, KernelScratch* scratch) {
  check_w(p, w, "logistic_objective");
  const std::size_t l = p.instances();
  RealVector z = matvec(p.X, w, exec);
  RealVector alpha(l);
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(l, b);
    for (std::size_t i = begin; i < end; ++i) alpha[i] = detail::log1p_exp_neg(p.y[i] * z[i]);
  });
  (void)scratch;
  return 0.5 * dot(w, w) + p.C * reduce_sum(alpha, exec);
}

RealVector logistic_gradient(const Problem& p, const LogisticState& state, const RealVector& w,
                             const Executor& exec, KernelScratch* scratch) {
  check_w(p, w, "logistic_gradient");
  RealVector g = matvec_transpose(p.X, state.zhat, exec, scratch);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = w[j] + p.C * g[j];
  return g;
}

void logistic_hessian_vec(const Problem& p, const LogisticState& state, const RealVector& v,
                          RealVector& out, const Executor& exec, KernelScratch* scratch) {
  check_w(p, v, "logistic_hessian_vec");
  RealVector a0 = matvec(p.X, v, exec);
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(a0.size(), b);
    for (std::size_t i = begin; i < end; ++i) a0[i] *= state.dvec[i];
  });
  out = matvec_transpose(p.X, a0, exec, scratch);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = v[j] + p.C * out[j];
}

SvmState svm_fused_pass(const Problem& p, const RealVector& w,
                        const Executor& exec, KernelScratch* scratch) {
  check_w(p, w, "svm_fused_pass");
  const std::size_t l = p.instances();
  SvmState s;
  matvec(p.X, w, s.z, exec);
  // Single traversal: per-block active indices plus squared hinge terms.
  std::array<std::vector<std::int64_t>, kReductionBlocks> block_active;
  RealVector hinge_sq(l);
  exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
    auto [begin, end] = reduction_block(l, b);
    auto& act = block_active[b];
    for (std::size_t i = begin; i < end; ++i) {
      double margin = 1.0 - p.y[i] * s.z[i];
      if (margin > 0.0) {
        act.push_back(static_cast<std::int64_t>(i));
        hinge_sq[i] = margin * margin;
      } else {
        hinge_sq[i] = 0.0;
      }
    }
  });
  std::vector<std::int64_t> active;
  for (auto& blk : block_active) active.insert(active.end(), blk.begin(), blk.end());
  s.active = IndexSet::from_sorted_unchecked(std::move(active));
  s.f = 0.5 * dot(w, w) + p.C * reduce_sum(hinge_sq, exec);
  (void)scratch;
  return s;
}

double svm_objective(const Problem& p, const RealVector& w,
                     const Executor& exec, KernelScratch* scratch) {
  return svm_fused_pass(p, w, exec, scratch).f;
}

RealVector svm_gradient(const Problem& p, const SvmState& state, const RealVector& w,
                        const Executor& exec, KernelScratch* scratch) {
  check_w(p, w, "svm_gradient");
  RealVector residual(p.instances());
  for (std::size_t i = 0; i < residual.size(); ++i) residual[i] = state.z[i] - p.y[i];
  RealVector g = masked_matvec_transpose(p.X, state.active, residual, exec, scratch);
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = w[j] + 2.0 * p.C * g[j];
  return g;
}

void svm_hessian_vec(const Problem& p, const SvmState& state, const RealVector& v,
                     RealVector& out, SvmStrategy strategy, const FeatureMatrix* gathered,
                     const Executor& exec, KernelScratch* scratch) {
  check_w(p, v, "svm_hessian_vec");
  if (strategy == SvmStrategy::Gathered) {
    if (gathered == nullptr) {
      throw StrategyPreconditionError(
          "gathered Hessian product requested without a materialized submatrix");
    }
    if (gathered->rows() != state.active.size() || gathered->cols() != p.features()) {
      throw StrategyPreconditionError("materialized submatrix does not match the active set");
    }
    RealVector a = matvec(*gathered, v, exec);
    out = matvec_transpose(*gathered, a, exec, scratch);
  } else {
    // Index-indirect traversal; arithmetic order matches the gathered
    // route element for element, so the two strategies agree exactly.
    const FeatureMatrix& X = p.X;
    const IndexSet& I = state.active;
    std::span<const double> vs(v);
    KernelScratch local;
    KernelScratch& ws = scratch ? *scratch : local;
    double* partials = ws.acquire_zeroed(kReductionBlocks * X.cols());
    exec.for_tasks(kReductionBlocks, [&](std::size_t b) {
      auto [begin, end] = reduction_block(I.size(), b);
      double* buf = partials + b * X.cols();
      for (std::size_t k = begin; k < end; ++k) {
        auto i = static_cast<std::size_t>(I[k]);
        X.row_axpy(i, X.row_dot(i, vs), buf);
      }
    });
    detail::merge_vector_tree(partials, X.cols());
    out.assign(partials, partials + X.cols());
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = v[j] + 2.0 * p.C * out[j];
}

RealVector hessian_precond_diag(const Problem& p, const LogisticState& state,
                                const Executor& exec, KernelScratch* scratch) {
  RealVector m = weighted_sq_col_sums(p.X, state.dvec, exec, scratch);
  for (double& v : m) v = 1.0 + p.C * v;
  return m;
}

RealVector hessian_precond_diag(const Problem& p, const SvmState& state,
                                const Executor& exec, KernelScratch* scratch) {
  RealVector m = masked_sq_col_sums(p.X, state.active, exec, scratch);
  for (double& v : m) v = 1.0 + 2.0 * p.C * v;
  return m;
}

}  // namespace tron
