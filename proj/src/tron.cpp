#include "tron/tron.hpp"

#include <cmath>
#include <string>

namespace tron {

namespace {

bool all_finite(const RealVector& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void TrustRegionConfig::validate() const {
  if (!(eps > 0.0)) throw DimensionError("config: eps must be positive");
  if (!(sigma0 > 0.0 && sigma0 < 1.0)) throw DimensionError("config: sigma0 must be in (0,1)");
  if (!(0.0 < eta1 && eta1 < eta2 && eta2 < 1.0)) {
    throw DimensionError("config: need 0 < eta1 < eta2 < 1");
  }
  if (!(0.0 < gamma1 && gamma1 < gamma2 && gamma2 < 1.0 && gamma3 > 1.0)) {
    throw DimensionError("config: need 0 < gamma1 < gamma2 < 1 < gamma3");
  }
  if (!(cg_tol > 0.0 && cg_tol < 1.0)) throw DimensionError("config: cg_tol must be in (0,1)");
}

double quadratic_model(const RealVector& g, const HessianApply& hv, const RealVector& d) {
  RealVector hd;
  hv(d, hd);
  return dot(g, d) + 0.5 * dot(d, hd);
}

CgResult truncated_cg(const RealVector& g, const HessianApply& hv, double delta,
                      const RealVector* precond, const TrustRegionConfig& cfg) {
  const std::size_t n = g.size();
  std::size_t max_iters = cfg.max_cg_iters;
  if (max_iters == 0) max_iters = n < 1000 ? n : 1000;

  CgResult result;
  result.d.assign(n, 0.0);
  RealVector r(n);
  for (std::size_t j = 0; j < n; ++j) r[j] = -g[j];

  auto apply_precond = [&](const RealVector& x, RealVector& y) {
    y.resize(n);
    if (precond) {
      for (std::size_t j = 0; j < n; ++j) y[j] = x[j] / (*precond)[j];
    } else {
      y = x;
    }
  };

  RealVector z;
  apply_precond(r, z);
  RealVector p = z;
  double rz = dot(r, z);
  const double stop = cfg.cg_tol * norm2(g);
  RealVector hp;

  while (result.iters < max_iters) {
    if (norm2(r) <= stop) {
      result.exit = CgExit::Converged;
      break;
    }
    ++result.iters;
    hv(p, hp);
    double php = dot(p, hp);
    if (!(php > 0.0)) {
      throw NumericalFailureError(
          "conjugate gradients met non-positive curvature (" + std::to_string(php) + ")", {});
    }
    double alpha = rz / php;
    axpy_inplace(alpha, p, result.d);
    if (norm2(result.d) > delta) {
      // Retreat and advance to the trust-region boundary along p.
      axpy_inplace(-alpha, p, result.d);
      double dp = dot(result.d, p);
      double dd = dot(result.d, result.d);
      double pp = dot(p, p);
      double rad = std::sqrt(dp * dp + pp * (delta * delta - dd));
      double tau = dp >= 0.0 ? (delta * delta - dd) / (dp + rad) : (rad - dp) / pp;
      axpy_inplace(tau, p, result.d);
      axpy_inplace(-tau, hp, r);
      result.exit = CgExit::Boundary;
      break;
    }
    axpy_inplace(-alpha, hp, r);
    apply_precond(r, z);
    double rz_next = dot(r, z);
    double beta = rz_next / rz;
    for (std::size_t j = 0; j < n; ++j) p[j] = z[j] + beta * p[j];
    rz = rz_next;
    result.exit = CgExit::MaxIters;
  }
  if (result.iters >= max_iters && result.exit != CgExit::Boundary && norm2(r) > stop) {
    result.exit = CgExit::MaxIters;
  } else if (result.exit != CgExit::Boundary) {
    result.exit = CgExit::Converged;
  }

  // q(d) = (d'g - d'r)/2 since r = -g - Hd throughout.
  result.model_value = 0.5 * (dot(result.d, g) - dot(result.d, r));
  return result;
}

TrustRegionDecision trust_region_update(double sigma, double delta, double step_norm,
                                        const TrustRegionConfig& cfg) {
  TrustRegionDecision decision;
  decision.accept = sigma > cfg.sigma0;
  if (!decision.accept) {
    decision.next_delta = cfg.gamma1 * step_norm;
  } else if (sigma < cfg.eta1) {
    decision.next_delta = cfg.gamma2 * step_norm;
  } else if (sigma < cfg.eta2) {
    decision.next_delta = delta;
  } else {
    double grown = cfg.gamma3 * step_norm;
    decision.next_delta = grown > delta ? grown : delta;
  }
  return decision;
}

SolveResult solve(LossEvaluator& evaluator, const TrustRegionConfig& cfg,
                  const RealVector* warm_start) {
  cfg.validate();
  const std::size_t n = evaluator.dimension();

  SolveResult result;
  result.w = warm_start ? *warm_start : RealVector(n, 0.0);
  if (result.w.size() != n) {
    throw DimensionError("solve: warm start has length " + std::to_string(result.w.size()) +
                         ", expected " + std::to_string(n));
  }
  SolverTrace& trace = result.trace;

  double f = evaluator.eval_candidate(result.w);
  trace.objective_evaluations = 1;
  if (!std::isfinite(f)) {
    throw NumericalFailureError("objective is not finite at the starting point", trace);
  }
  evaluator.commit();
  trace.gradient_materializations = 1;
  RealVector g = evaluator.gradient();
  if (!all_finite(g)) {
    throw NumericalFailureError("gradient is not finite at the starting point", trace);
  }
  trace.f_initial = f;
  const double gnorm0 = norm2(g);
  trace.gradient_norm_initial = gnorm0;
  double gnorm = gnorm0;

  result.objective = f;
  if (gnorm <= cfg.eps * gnorm0) {
    result.converged = true;
    return result;
  }

  double delta = gnorm0;
  HessianApply hv = [&](const RealVector& v, RealVector& out) { evaluator.hessian_vec(v, out); };

  while (trace.iterations.size() < cfg.max_outer_iters) {
    const RealVector* precond = nullptr;
    if (cfg.use_preconditioner) precond = &evaluator.precond_diagonal();
    CgResult cg;
    try {
      cg = truncated_cg(g, hv, delta, precond, cfg);
    } catch (const NumericalFailureError& e) {
      throw NumericalFailureError(e.what(), trace);
    }
    double step_norm = norm2(cg.d);

    RealVector w_candidate = result.w;
    axpy_inplace(1.0, cg.d, w_candidate);
    double f_candidate = evaluator.eval_candidate(w_candidate);
    trace.objective_evaluations++;
    if (!std::isfinite(f_candidate)) {
      throw NumericalFailureError("objective is not finite at a candidate step", trace);
    }

    double sigma = (f_candidate - f) / cg.model_value;
    TrustRegionDecision decision = trust_region_update(sigma, delta, step_norm, cfg);

    IterationRecord rec;
    rec.f_candidate = f_candidate;
    rec.gradient_norm = gnorm;
    rec.delta = delta;
    rec.sigma = sigma;
    rec.accepted = decision.accept;
    rec.cg_iters = cg.iters;
    rec.cg_exit = cg.exit;
    trace.iterations.push_back(rec);

    delta = decision.next_delta;
    if (decision.accept) {
      result.w = std::move(w_candidate);
      f = f_candidate;
      result.objective = f;
      evaluator.commit();
      trace.accepted_steps++;
      trace.gradient_materializations++;
      g = evaluator.gradient();
      if (!all_finite(g)) {
        throw NumericalFailureError("gradient is not finite after an accepted step", trace);
      }
      gnorm = norm2(g);
      if (gnorm <= cfg.eps * gnorm0) {
        result.converged = true;
        break;
      }
    }
  }
  return result;
}

}  // namespace tron
