#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tron/linalg.hpp"

namespace tron {

/// Outer/inner loop controls. Defaults follow the classic trust-region
/// constants of the reference lineage; eps matches the -e 0.1 CLI default.
struct TrustRegionConfig {
  double eps = 0.1;                 // relative gradient-norm stopping tolerance
  std::size_t max_outer_iters = 1000;
  std::size_t max_cg_iters = 0;     // 0 = min(n, 1000)
  double sigma0 = 1e-4;             // acceptance threshold on the reduction ratio
  double eta1 = 0.25;               // below: accepted step still shrinks the region
  double eta2 = 0.75;               // above: region grows
  double gamma1 = 0.25;             // shrink factor on rejection
  double gamma2 = 0.5;              // shrink factor on weak acceptance
  double gamma3 = 4.0;              // growth factor
  double cg_tol = 0.1;              // inner residual reduction
  bool use_preconditioner = false;

  void validate() const;
};

enum class CgExit { Converged, Boundary, MaxIters };

struct CgResult {
  RealVector d;
  CgExit exit = CgExit::Converged;
  std::size_t iters = 0;
  double model_value = 0.0;  // q(d) from the residual identity
};

struct IterationRecord {
  double f_candidate = 0.0;
  double gradient_norm = 0.0;  // at the iterate the step was computed from
  double delta = 0.0;          // radius used for this CG solve
  double sigma = 0.0;
  bool accepted = false;
  std::size_t cg_iters = 0;
  CgExit cg_exit = CgExit::Converged;

  bool operator==(const IterationRecord&) const = default;
};

struct SolverTrace {
  double f_initial = 0.0;
  double gradient_norm_initial = 0.0;
  std::vector<IterationRecord> iterations;
  std::size_t accepted_steps = 0;
  std::size_t gradient_materializations = 0;
  std::size_t objective_evaluations = 0;

  bool operator==(const SolverTrace&) const = default;
};

struct SolveResult {
  RealVector w;
  SolverTrace trace;
  double objective = 0.0;  // f at the returned w
  bool converged = false;
};

/// Raised when the objective or gradient turns non-finite, or CG meets
/// non-positive curvature; carries the trace accumulated so far.
class NumericalFailureError : public Error {
 public:
  NumericalFailureError(const std::string& what, SolverTrace trace)
      : Error(what), trace_(std::move(trace)) {}
  const SolverTrace& trace() const { return trace_; }

 private:
  SolverTrace trace_;
};

using HessianApply = std::function<void(const RealVector&, RealVector&)>;

/// q(d) = g'd + d'(H d)/2 evaluated with one Hessian application.
double quadratic_model(const RealVector& g, const HessianApply& hv, const RealVector& d);

/// Conjugate gradients on H d = -g from d = 0, stopped at relative
/// residual cg_tol, at the ball ||d|| <= delta (the final iterate is
/// pulled back to the boundary along the last direction), or at the
/// iteration cap. precond, when given, is the diagonal of M.
CgResult truncated_cg(const RealVector& g, const HessianApply& hv, double delta,
                      const RealVector* precond, const TrustRegionConfig& cfg);

struct TrustRegionDecision {
  bool accept = false;
  double next_delta = 0.0;
};

/// Classic radius update: accept iff sigma > sigma0; growth/shrink per
/// the eta/gamma thresholds against the step norm actually taken.
TrustRegionDecision trust_region_update(double sigma, double delta, double step_norm,
                                        const TrustRegionConfig& cfg);

/// Loss evaluation surface the solver drives. Candidate evaluations are
/// cheap scalar probes; commit() adopts the last candidate and is the
/// only point where a gradient is materialized (lazy-gradient contract).
class LossEvaluator {
 public:
  virtual ~LossEvaluator() = default;

  virtual std::size_t dimension() const = 0;

  /// Fused margin pass + objective at w; retained as the pending candidate.
  virtual double eval_candidate(const RealVector& w) = 0;

  /// Promote the pending candidate to current and materialize its gradient.
  virtual void commit() = 0;

  /// Gradient of the committed iterate. Valid until the next commit().
  virtual const RealVector& gradient() const = 0;

  /// Hessian of the committed iterate applied to v.
  virtual void hessian_vec(const RealVector& v, RealVector& out) = 0;

  /// Diagonal preconditioner of the committed iterate (cached per commit).
  virtual const RealVector& precond_diagonal() = 0;
};

/// Algorithm: evaluate f(w0) and its gradient; repeat CG step within
/// ||d|| <= delta, probe f(w+d), accept when the reduction ratio beats
/// sigma0 (materializing the new gradient), and rescale delta; stop when
/// ||grad|| <= eps * ||grad(w0)|| or the iteration cap is reached.
SolveResult solve(LossEvaluator& evaluator, const TrustRegionConfig& cfg,
                  const RealVector* warm_start = nullptr);

}  // namespace tron
