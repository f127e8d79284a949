#include "teamdec/learners.hpp"

#include <cmath>

#include "teamdec/errors.hpp"
#include "teamdec/linalg.hpp"
#include "teamdec/rng.hpp"

namespace teamdec {

double step_size(Schedule schedule, long t, const ScheduleParams& params) {
  if (t < 1) fail(ErrorCode::NonPositiveParam, "step index must be at least 1");
  switch (schedule) {
    case Schedule::strongly_convex:
      if (!(params.lambda > 0.0)) fail(ErrorCode::NonPositiveParam, "lambda must be positive");
      return 1.0 / (params.lambda * static_cast<double>(t));
    case Schedule::convex_sqrt: {
      if (!(params.b_G > 0.0)) fail(ErrorCode::NonPositiveParam, "b_G must be positive");
      const double dim = static_cast<double>(std::max(params.m, params.p));
      if (!(dim > 0.0)) fail(ErrorCode::NonPositiveParam, "dimensions must be positive");
      return 2.0 * std::sqrt(dim) / (params.b_G * std::sqrt(static_cast<double>(t)));
    }
    case Schedule::convex_two_thirds: {
      if (!(params.b_K > 0.0)) fail(ErrorCode::NonPositiveParam, "b_K must be positive");
      if (!(params.sum_m2p2 > 0.0)) fail(ErrorCode::NonPositiveParam, "block sizes must be positive");
      const double dim = static_cast<double>(std::min(params.m, params.p));
      const double num = std::pow(4.0 * dim * params.b_K * params.b_K, 2.0 / 3.0);
      return num / (std::cbrt(params.sum_m2p2) * std::cbrt(static_cast<double>(t)));
    }
  }
  fail(ErrorCode::UnknownSchedule, "unhandled schedule");
}

double exploration(Schedule schedule, long t, const BlockStructure& structure, double b_K) {
  if (t < 1) fail(ErrorCode::NonPositiveParam, "step index must be at least 1");
  const double sum = structure.sum_squared_block_sizes();
  switch (schedule) {
    case Schedule::strongly_convex:
      return std::pow(static_cast<double>(t), -0.25) * std::pow(sum, -0.25);
    case Schedule::convex_two_thirds: {
      if (!(b_K > 0.0)) fail(ErrorCode::NonPositiveBudget, "b_K must be positive");
      const double dim =
          static_cast<double>(std::min(structure.total_outputs(), structure.total_measurements()));
      return std::pow(4.0 * dim * b_K * b_K, 1.0 / 6.0) * std::pow(sum, 1.0 / 6.0) *
             std::pow(static_cast<double>(t), -1.0 / 6.0);
    }
    case Schedule::convex_sqrt:
      break;
  }
  fail(ErrorCode::UnknownSchedule, "no exploration schedule for convex_sqrt");
}

Policy ogd_step(const Policy& k, const Policy& estimate, double eta, double b_K,
                ProjectionMode mode) {
  Policy next = k;
  next.add_scaled(estimate, -eta);
  return project_policy(next, b_K, mode);
}

namespace {

// Fallback b_G for the convex_sqrt schedule, from the noise-free bound
// 4 ||D||^2 (||H|| + b_K ||D|| ||C||)^2 ||C||^2 kappa_x.
double default_convex_b_G(const ProblemInstance& p, double b_K) {
  const double h = operator_norm(p.H);
  const double d = operator_norm(p.D);
  const double c = operator_norm(p.C);
  const double kappa_x = gaussian_fourth_moment(p.Vxx);
  const double g = h + b_K * d * c;
  return std::sqrt(4.0 * d * d * g * g * c * c * kappa_x);
}

struct ResolvedConfig {
  ScheduleParams params;
  Policy initial;
};

ResolvedConfig resolve(const ProblemInstance& p, const LearnerConfig& cfg) {
  if (!p.validated()) fail(ErrorCode::InvalidConfig, "instance has not been validated");
  if (cfg.horizon < 1) fail(ErrorCode::InvalidConfig, "horizon must be at least 1");
  if (!(cfg.b_K > 0.0)) fail(ErrorCode::NonPositiveBudget, "policy budget must be positive");

  if (cfg.lambda < 0.0) fail(ErrorCode::NonPositiveParam, "lambda must be positive (or 0 for auto)");

  ResolvedConfig rc;
  rc.params.b_K = cfg.b_K;
  rc.params.m = p.structure.total_outputs();
  rc.params.p = p.structure.total_measurements();
  rc.params.sum_m2p2 = p.structure.sum_squared_block_sizes();

  if (cfg.schedule == Schedule::strongly_convex) {
    const double alpha = strong_convexity_alpha(p);
    if (!(alpha > 0.0)) {
      fail(ErrorCode::AssumptionViolated,
           "strongly_convex schedule needs positive curvature; use a convex schedule");
    }
    rc.params.lambda = cfg.lambda > 0.0 ? cfg.lambda : alpha;
    if (rc.params.lambda > alpha * (1.0 + 1e-12)) {
      fail(ErrorCode::AssumptionViolated, "lambda exceeds the strong-convexity coefficient");
    }
  } else if (cfg.schedule == Schedule::convex_sqrt) {
    rc.params.b_G = cfg.b_G > 0.0 ? cfg.b_G : default_convex_b_G(p, cfg.b_K);
    if (!(rc.params.b_G > 0.0)) fail(ErrorCode::NonPositiveParam, "b_G must be positive");
  }

  if (cfg.initial_policy) {
    if (!(cfg.initial_policy->structure() == p.structure)) {
      fail(ErrorCode::DimensionMismatch, "initial policy structure mismatch");
    }
    rc.initial = *cfg.initial_policy;
  } else {
    rc.initial = Policy::zero(p.structure);
  }
  return rc;
}

void record_step(RegretTrace& trace, long t, double loss, double norm, const Policy& k,
                 long snapshot_interval) {
  trace.losses.push_back(loss);
  trace.played_norms.push_back(norm);
  const double prev = trace.cumulative_loss.empty() ? 0.0 : trace.cumulative_loss.back();
  trace.cumulative_loss.push_back(prev + loss);
  if (snapshot_interval > 0 && t % snapshot_interval == 0) trace.snapshots.emplace_back(t, k);
}

}  // namespace

RegretTrace run_gradient_feedback(const ProblemInstance& p, const LearnerConfig& cfg,
                                  std::mt19937_64& rng, SamplePath* path) {
  ResolvedConfig rc = resolve(p, cfg);
  Policy k = std::move(rc.initial);
  RegretTrace trace;
  trace.losses.reserve(cfg.horizon);
  trace.played_norms.reserve(cfg.horizon);
  trace.cumulative_loss.reserve(cfg.horizon);

  for (long t = 1; t <= cfg.horizon; ++t) {
    const EnvironmentSample s = sample_environment(p, rng);
    const Eigen::VectorXd z = realized_output(p, k, s);
    record_step(trace, t, z.squaredNorm(), k.operator_norm(), k, cfg.snapshot_interval);
    if (path) path->samples.push_back(s);

    const Policy estimate = partial_gradient_observation(p, z, s.y);
    const double eta = step_size(cfg.schedule, t, rc.params);
    k = ogd_step(k, estimate, eta, cfg.b_K, cfg.projection);
  }
  trace.final_policy = std::move(k);
  return trace;
}

RegretTrace run_gradient_feedback(const ProblemInstance& p, const LearnerConfig& cfg) {
  auto rng = make_stream(cfg.seed);
  return run_gradient_feedback(p, cfg, rng);
}

RegretTrace run_bandit_feedback(const ProblemInstance& p, const LearnerConfig& cfg,
                                std::mt19937_64& rng, SamplePath* path) {
  if (cfg.schedule == Schedule::convex_sqrt) {
    fail(ErrorCode::UnknownSchedule, "bandit feedback needs an exploration schedule");
  }
  ResolvedConfig rc = resolve(p, cfg);
  Policy k = std::move(rc.initial);
  RegretTrace trace;
  trace.losses.reserve(cfg.horizon);
  trace.played_norms.reserve(cfg.horizon);
  trace.cumulative_loss.reserve(cfg.horizon);

  for (long t = 1; t <= cfg.horizon; ++t) {
    const double eps = exploration(cfg.schedule, t, p.structure, cfg.b_K);
    const PerturbationDraw draw = rademacher_draw(p.structure, eps, rng);
    const EnvironmentSample s = sample_environment(p, rng);

    const Policy played = perturb(k, draw);
    const double loss = realized_loss(p, played, s);
    record_step(trace, t, loss, played.operator_norm(), k, cfg.snapshot_interval);
    if (path) path->samples.push_back(s);

    const Policy estimate = bandit_gradient_estimate(loss, p.structure, draw);
    const double eta = step_size(cfg.schedule, t, rc.params);
    k = ogd_step(k, estimate, eta, cfg.b_K, cfg.projection);
  }
  trace.final_policy = std::move(k);
  return trace;
}

RegretTrace run_bandit_feedback(const ProblemInstance& p, const LearnerConfig& cfg) {
  auto rng = make_stream(cfg.seed);
  return run_bandit_feedback(p, cfg, rng);
}

double regret_bound_gradient(double b_G_sq, double lambda, double horizon) {
  if (!(b_G_sq > 0.0) || !(lambda > 0.0) || !(horizon > 0.0)) {
    fail(ErrorCode::NonPositiveParam, "bound inputs must be positive");
  }
  return b_G_sq / (2.0 * lambda) * (1.0 + std::log(horizon));
}

BanditRegretConstants bandit_regret_constants(const ProblemInstance& p, double b_K) {
  const double h = operator_norm(p.H);
  const double d = operator_norm(p.D);
  const double c = operator_norm(p.C);
  const double tr_xx = p.Vxx.trace();
  const double tr_vv = p.Vvv.trace();
  BanditRegretConstants out;
  out.M1 = d * d * (c * c * tr_xx + tr_vv);
  const double fourth = gaussian_fourth_moment(p.Vxx) + 2.0 * tr_xx * tr_vv +
                        gaussian_fourth_moment(p.Vvv);
  out.M2 = std::pow(h + d * (b_K + 1.0) * (c + 1.0), 4) * fourth;
  return out;
}

double regret_bound_bandit(const ProblemInstance& p, double b_K, double lambda, double horizon) {
  if (!(b_K > 0.0) || !(lambda > 0.0) || !(horizon > 0.0)) {
    fail(ErrorCode::NonPositiveParam, "bound inputs must be positive");
  }
  const BanditRegretConstants c = bandit_regret_constants(p, b_K);
  return 2.0 * (c.M1 + c.M2 / lambda) * std::sqrt(p.structure.sum_squared_block_sizes()) *
         std::sqrt(horizon);
}

std::vector<double> regret_against(const RegretTrace& trace,
                                   const std::vector<double>& comparator_losses) {
  if (trace.losses.size() != comparator_losses.size()) {
    fail(ErrorCode::LengthMismatch, "trace and comparator lengths differ");
  }
  std::vector<double> regret(trace.losses.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < trace.losses.size(); ++t) {
    acc += trace.losses[t] - comparator_losses[t];
    regret[t] = acc;
  }
  return regret;
}

}  // namespace teamdec
