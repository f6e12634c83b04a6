#include "tron/backend.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <thread>
#include <utility>

namespace tron {

void TransferLedger::record(LedgerEvent::Kind kind) { events.push_back({kind}); }

ExecutionPlan ExecutionPlan::sequential() { return {}; }

ExecutionPlan ExecutionPlan::parallel(unsigned workers) {
  ExecutionPlan plan;
  plan.backend = BackendKind::Parallel;
  plan.workers = workers;
  return plan;
}

ExecutionPlan ExecutionPlan::staged_decoupled() {
  ExecutionPlan plan;
  plan.backend = BackendKind::StagedDecoupled;
  plan.svm_strategy = SvmStrategy::Gathered;
  return plan;
}

ExecutionPlan ExecutionPlan::mixed_active_set(unsigned workers) {
  ExecutionPlan plan;
  plan.backend = BackendKind::MixedActiveSet;
  plan.workers = workers;
  plan.svm_strategy = SvmStrategy::Indirect;
  return plan;
}

void ExecutionPlan::validate() const {
  if (workers < 1) throw DimensionError("plan: workers must be >= 1");
  if (backend == BackendKind::StagedDecoupled && svm_strategy != SvmStrategy::Gathered) {
    throw DimensionError("plan: the staged backend requires the Gathered strategy");
  }
  if (backend == BackendKind::MixedActiveSet && svm_strategy != SvmStrategy::Indirect) {
    throw DimensionError("plan: the mixed backend requires the Indirect strategy");
  }
}

std::size_t projected_gather_bytes(const FeatureMatrix& X, const IndexSet& I) {
  if (X.layout() == Layout::DenseRowMajor) {
    return I.size() * X.cols() * sizeof(double);
  }
  std::size_t nnz = 0;
  for (std::int64_t i : I.indices()) nnz += X.row_size(static_cast<std::size_t>(i));
  return nnz * (sizeof(double) + sizeof(std::int32_t)) + (I.size() + 1) * sizeof(std::int64_t);
}

namespace {

const char* backend_tag(BackendKind k) {
  switch (k) {
    case BackendKind::Sequential: return "seq";
    case BackendKind::Parallel: return "par";
    case BackendKind::StagedDecoupled: return "staged";
    case BackendKind::MixedActiveSet: return "mix";
  }
  return "?";
}

unsigned staging_pool_size() {
  unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(hw, 1u, 8u);
}

}  // namespace

std::string ledger_report(const ExecutionPlan& plan) {
  const TransferLedger& lg = plan.ledger;
  char buf[128];
  std::string out;
  auto put = [&](const char* key, std::size_t value) {
    std::snprintf(buf, sizeof(buf), "%s=%zu\n", key, value);
    out += buf;
  };
  out += std::string("backend=") + backend_tag(plan.backend) + "\n";
  std::snprintf(buf, sizeof(buf), "workers=%u\n", plan.workers);
  out += buf;
  out += std::string("svm_strategy=") +
         (plan.svm_strategy == SvmStrategy::Gathered ? "gathered" : "indirect") + "\n";
  put("margin_passes", lg.margin_passes);
  put("bulk_handoffs", lg.bulk_handoffs);
  put("scalar_returns", lg.scalar_returns);
  put("gradient_materializations", lg.gradient_materializations);
  put("concealed_vector_returns", lg.concealed_vector_returns);
  put("gathered_submatrix_bytes_peak", lg.gathered_submatrix_bytes);
  put("index_set_bytes_peak", lg.index_set_bytes);
  put("peak_auxiliary_bytes", lg.gathered_submatrix_bytes + lg.index_set_bytes);
  std::size_t outer = lg.margin_passes > 1 ? lg.margin_passes - 1 : 1;
  std::snprintf(buf, sizeof(buf), "handoffs_per_outer_iteration=%.6g\n",
                static_cast<double>(lg.bulk_handoffs) / static_cast<double>(outer));
  out += buf;
  return out;
}

namespace backenddetail {

DomainContext::DomainContext(const ExecutionPlan& plan) {
  switch (plan.backend) {
    case BackendKind::Sequential:
      break;
    case BackendKind::Parallel:
      if (plan.workers > 1) host_pool_ = std::make_unique<WorkerPool>(plan.workers);
      margin_exec_ = Executor(host_pool_.get());
      host_exec_ = Executor(host_pool_.get());
      break;
    case BackendKind::StagedDecoupled:
      staging_pool_ = std::make_unique<WorkerPool>(staging_pool_size());
      margin_exec_ = Executor(staging_pool_.get());
      staged_exec_ = Executor(staging_pool_.get());
      staging_ = true;
      break;
    case BackendKind::MixedActiveSet:
      staging_pool_ = std::make_unique<WorkerPool>(staging_pool_size());
      margin_exec_ = Executor(staging_pool_.get());
      if (plan.workers > 1) host_pool_ = std::make_unique<WorkerPool>(plan.workers);
      host_exec_ = Executor(host_pool_.get());
      staging_ = true;
      break;
  }
}

}  // namespace backenddetail

// =============================================================================
// Logistic evaluator
// =============================================================================

LogisticEvaluator::LogisticEvaluator(const Problem& p, ExecutionPlan& plan)
    : p_(p), plan_(plan), domains_(plan) {
  p_.validate();
  plan_.validate();
}

double LogisticEvaluator::eval_candidate(const RealVector& w) {
  candidate_.state = logistic_fused_pass(p_, w, domains_.margin_exec(), &scratch_);
  candidate_.w = w;
  candidate_.valid = true;
  TransferLedger& lg = plan_.ledger;
  lg.margin_passes++;
  lg.record(LedgerEvent::Kind::MarginPass);
  if (domains_.has_staging_domain()) {
    // The objective leaves the staging domain as a scalar, before any
    // buffer does.
    lg.scalar_returns++;
    lg.record(LedgerEvent::Kind::ScalarReturn);
    if (plan_.backend == BackendKind::MixedActiveSet) {
      // zhat and dvec move to the coordinating flow eagerly, overlapping
      // the objective reduction; gradient and Hessian work then stay
      // host-side.
      lg.bulk_handoffs += 2;
      lg.record(LedgerEvent::Kind::BulkHandoff);
      lg.record(LedgerEvent::Kind::BulkHandoff);
    }
  }
  return candidate_.state.f;
}

void LogisticEvaluator::commit() {
  if (!candidate_.valid) throw std::logic_error("commit() without a pending candidate");
  committed_ = std::move(candidate_);
  candidate_.valid = false;
  precond_valid_ = false;

  const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                             ? domains_.staged_exec()
                             : domains_.host_exec();
  gradient_ = logistic_gradient(p_, committed_.state, committed_.w, exec, &scratch_);
  TransferLedger& lg = plan_.ledger;
  lg.gradient_materializations++;
  lg.record(LedgerEvent::Kind::GradientMaterialized);
  if (plan_.backend == BackendKind::StagedDecoupled) {
    // The length-n gradient is the one bulk buffer an accepted step moves.
    lg.bulk_handoffs++;
    lg.record(LedgerEvent::Kind::BulkHandoff);
  }
}

void LogisticEvaluator::hessian_vec(const RealVector& v, RealVector& out) {
  if (!committed_.valid) throw std::logic_error("hessian_vec() before the first commit()");
  const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                             ? domains_.staged_exec()
                             : domains_.host_exec();
  logistic_hessian_vec(p_, committed_.state, v, out, exec, &scratch_);
  if (plan_.backend == BackendKind::StagedDecoupled) {
    // Returned on the CG stream; the curvature scalar gates the
    // recurrence so the buffer's latency is concealable.
    plan_.ledger.concealed_vector_returns++;
    plan_.ledger.record(LedgerEvent::Kind::VectorReturn);
  }
}

const RealVector& LogisticEvaluator::precond_diagonal() {
  if (!committed_.valid) throw std::logic_error("precond_diagonal() before the first commit()");
  if (!precond_valid_) {
    const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                               ? domains_.staged_exec()
                               : domains_.host_exec();
    precond_ = hessian_precond_diag(p_, committed_.state, exec, &scratch_);
    precond_valid_ = true;
    if (plan_.backend == BackendKind::StagedDecoupled) {
      plan_.ledger.bulk_handoffs++;
      plan_.ledger.record(LedgerEvent::Kind::BulkHandoff);
    }
  }
  return precond_;
}

// =============================================================================
// L2-SVM evaluator
// =============================================================================

SvmEvaluator::SvmEvaluator(const Problem& p, ExecutionPlan& plan)
    : p_(p), plan_(plan), domains_(plan) {
  p_.validate();
  plan_.validate();
}

double SvmEvaluator::eval_candidate(const RealVector& w) {
  candidate_.state = svm_fused_pass(p_, w, domains_.margin_exec(), &scratch_);
  candidate_.w = w;
  candidate_.valid = true;
  TransferLedger& lg = plan_.ledger;
  lg.margin_passes++;
  lg.record(LedgerEvent::Kind::MarginPass);
  lg.index_set_bytes = std::max(lg.index_set_bytes, candidate_.state.active.footprint_bytes());
  if (domains_.has_staging_domain()) {
    lg.scalar_returns++;
    lg.record(LedgerEvent::Kind::ScalarReturn);
    if (plan_.backend == BackendKind::MixedActiveSet) {
      // z and I move to the coordinating flow, overlapping the objective
      // reduction; gradient and Hessian work then run host-side through
      // the index set.
      lg.bulk_handoffs += 2;
      lg.record(LedgerEvent::Kind::BulkHandoff);
      lg.record(LedgerEvent::Kind::BulkHandoff);
    }
  }
  return candidate_.state.f;
}

void SvmEvaluator::commit() {
  if (!candidate_.valid) throw std::logic_error("commit() without a pending candidate");
  committed_ = std::move(candidate_);
  candidate_.valid = false;
  precond_valid_ = false;
  TransferLedger& lg = plan_.ledger;

  gathered_.reset();  // the active set changed; the old submatrix is stale
  if (plan_.svm_strategy == SvmStrategy::Gathered) {
    std::size_t projected = projected_gather_bytes(p_.X, committed_.state.active);
    if (projected > plan_.gathered_budget_bytes) {
      throw BudgetExceededError(projected, plan_.gathered_budget_bytes);
    }
    gathered_ = gather_rows(p_.X, committed_.state.active);
    lg.gathered_submatrix_bytes = std::max(lg.gathered_submatrix_bytes,
                                           gathered_->payload_bytes());
  }

  const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                             ? domains_.staged_exec()
                             : domains_.host_exec();
  gradient_ = svm_gradient(p_, committed_.state, committed_.w, exec, &scratch_);
  lg.gradient_materializations++;
  lg.record(LedgerEvent::Kind::GradientMaterialized);
  if (plan_.backend == BackendKind::StagedDecoupled) {
    lg.bulk_handoffs++;
    lg.record(LedgerEvent::Kind::BulkHandoff);
  }
}

void SvmEvaluator::hessian_vec(const RealVector& v, RealVector& out) {
  if (!committed_.valid) throw std::logic_error("hessian_vec() before the first commit()");
  const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                             ? domains_.staged_exec()
                             : domains_.host_exec();
  svm_hessian_vec(p_, committed_.state, v, out, plan_.svm_strategy,
                  gathered_ ? &*gathered_ : nullptr, exec, &scratch_);
  if (plan_.backend == BackendKind::StagedDecoupled) {
    plan_.ledger.concealed_vector_returns++;
    plan_.ledger.record(LedgerEvent::Kind::VectorReturn);
  }
}

const RealVector& SvmEvaluator::precond_diagonal() {
  if (!committed_.valid) throw std::logic_error("precond_diagonal() before the first commit()");
  if (!precond_valid_) {
    const Executor& exec = plan_.backend == BackendKind::StagedDecoupled
                               ? domains_.staged_exec()
                               : domains_.host_exec();
    precond_ = hessian_precond_diag(p_, committed_.state, exec, &scratch_);
    precond_valid_ = true;
    if (plan_.backend == BackendKind::StagedDecoupled) {
      plan_.ledger.bulk_handoffs++;
      plan_.ledger.record(LedgerEvent::Kind::BulkHandoff);
    }
  }
  return precond_;
}

std::unique_ptr<LossEvaluator> make_evaluator(const Problem& p, LossKind loss,
                                              ExecutionPlan& plan) {
  if (loss == LossKind::Logistic) return std::make_unique<LogisticEvaluator>(p, plan);
  return std::make_unique<SvmEvaluator>(p, plan);
}

SolveResult solve(const Problem& p, LossKind loss, const TrustRegionConfig& cfg,
                  ExecutionPlan& plan, const RealVector* warm_start) {
  auto evaluator = make_evaluator(p, loss, plan);
  return solve(*evaluator, cfg, warm_start);
}

}  // namespace tron
