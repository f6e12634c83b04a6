#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tron/loss.hpp"
#include "tron/parallel.hpp"
#include "tron/tron.hpp"

namespace tron {

enum class BackendKind { Sequential, Parallel, StagedDecoupled, MixedActiveSet };

/// Movement/visibility events between the staging domain (the modeled
/// device) and the coordinating flow, in program order.
struct LedgerEvent {
  enum class Kind {
    MarginPass,           // a fused pass ran (any domain)
    ScalarReturn,         // objective scalar handed to the coordinating flow
    BulkHandoff,          // a buffer crossed domains (latency-revealing)
    VectorReturn,         // CG Hessian product returned on a concealed stream
    GradientMaterialized, // a gradient came into existence
  };
  Kind kind;
};

/// Counts of cross-domain traffic and auxiliary memory for one solve.
/// Counters are monotone; byte fields record peaks.
struct TransferLedger {
  std::size_t bulk_handoffs = 0;
  std::size_t scalar_returns = 0;
  std::size_t gradient_materializations = 0;
  std::size_t concealed_vector_returns = 0;
  std::size_t margin_passes = 0;
  std::size_t gathered_submatrix_bytes = 0;  // peak bytes of X_{I,:}
  std::size_t index_set_bytes = 0;           // peak bytes of I
  std::vector<LedgerEvent> events;

  void record(LedgerEvent::Kind kind);
};

/// Backend selection plus the transfer ledger it fills in.
struct ExecutionPlan {
  BackendKind backend = BackendKind::Sequential;
  unsigned workers = 1;
  SvmStrategy svm_strategy = SvmStrategy::Indirect;
  std::size_t gathered_budget_bytes = std::size_t{2} << 30;  // 2 GiB
  TransferLedger ledger;

  static ExecutionPlan sequential();
  static ExecutionPlan parallel(unsigned workers);
  static ExecutionPlan staged_decoupled();
  static ExecutionPlan mixed_active_set(unsigned workers);

  /// workers >= 1; StagedDecoupled implies Gathered, MixedActiveSet Indirect.
  void validate() const;
};

/// Bytes a materialized X_{I,:} would occupy, computed without building it.
std::size_t projected_gather_bytes(const FeatureMatrix& X, const IndexSet& I);

/// Flat key=value summary of the ledger plus derived ratios.
std::string ledger_report(const ExecutionPlan& plan);

std::unique_ptr<LossEvaluator> make_evaluator(const Problem& p, LossKind loss,
                                              ExecutionPlan& plan);

/// Train on p under the plan's backend starting from zero (or warm_start).
SolveResult solve(const Problem& p, LossKind loss, const TrustRegionConfig& cfg,
                  ExecutionPlan& plan, const RealVector* warm_start = nullptr);

namespace backenddetail {

/// Thread pools and role executors for one evaluator. The staging
/// executor stands in for the device; host executors run on the
/// coordinating side with the plan's worker count.
class DomainContext {
 public:
  explicit DomainContext(const ExecutionPlan& plan);

  const Executor& margin_exec() const { return margin_exec_; }
  const Executor& host_exec() const { return host_exec_; }
  const Executor& staged_exec() const { return staged_exec_; }
  bool has_staging_domain() const { return staging_; }

 private:
  std::unique_ptr<WorkerPool> host_pool_;
  std::unique_ptr<WorkerPool> staging_pool_;
  Executor margin_exec_;   // fused passes
  Executor host_exec_;     // coordinating-side gradient/Hessian work
  Executor staged_exec_;   // staging-side gradient/Hessian work
  bool staging_ = false;
};

}  // namespace backenddetail

/// Logistic-loss evaluator; candidate/committed state slots plus the
/// schedule-aware ledger accounting for the plan's backend.
class LogisticEvaluator final : public LossEvaluator {
 public:
  LogisticEvaluator(const Problem& p, ExecutionPlan& plan);

  std::size_t dimension() const override { return p_.features(); }
  double eval_candidate(const RealVector& w) override;
  void commit() override;
  const RealVector& gradient() const override { return gradient_; }
  void hessian_vec(const RealVector& v, RealVector& out) override;
  const RealVector& precond_diagonal() override;

  const LogisticState& candidate_state() const { return candidate_.state; }
  const LogisticState& committed_state() const { return committed_.state; }

 private:
  struct Slot {
    LogisticState state;
    RealVector w;
    bool valid = false;
  };

  const Problem& p_;
  ExecutionPlan& plan_;
  backenddetail::DomainContext domains_;
  Slot candidate_;
  Slot committed_;
  RealVector gradient_;
  RealVector precond_;
  bool precond_valid_ = false;
  KernelScratch scratch_;
};

/// L2-SVM evaluator; owns the per-commit gathered submatrix under the
/// Gathered strategy and enforces the memory budget.
class SvmEvaluator final : public LossEvaluator {
 public:
  SvmEvaluator(const Problem& p, ExecutionPlan& plan);

  std::size_t dimension() const override { return p_.features(); }
  double eval_candidate(const RealVector& w) override;
  void commit() override;
  const RealVector& gradient() const override { return gradient_; }
  void hessian_vec(const RealVector& v, RealVector& out) override;
  const RealVector& precond_diagonal() override;

  const SvmState& candidate_state() const { return candidate_.state; }
  const SvmState& committed_state() const { return committed_.state; }
  const FeatureMatrix* gathered_submatrix() const {
    return gathered_ ? &*gathered_ : nullptr;
  }

 private:
  struct Slot {
    SvmState state;
    RealVector w;
    bool valid = false;
  };

  const Problem& p_;
  ExecutionPlan& plan_;
  backenddetail::DomainContext domains_;
  Slot candidate_;
  Slot committed_;
  RealVector gradient_;
  RealVector precond_;
  bool precond_valid_ = false;
  std::optional<FeatureMatrix> gathered_;
  KernelScratch scratch_;
};

}  // namespace tron
