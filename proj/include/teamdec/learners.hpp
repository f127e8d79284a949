#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "teamdec/policy.hpp"
#include "teamdec/problem.hpp"

namespace teamdec {

enum class Feedback { gradient, bandit };

enum class Schedule {
  strongly_convex,    // eta_t = 1/(lambda t)
  convex_sqrt,        // eta_t = 2 sqrt(max{m,p}) / (b_G sqrt(t))
  convex_two_thirds,  // eta_t = (4 min{m,p} b_K^2)^{2/3} / ((sum m_i^2 p_i^2)^{1/3} t^{1/3})
};

struct ScheduleParams {
  double lambda = 0.0;
  double b_G = 0.0;
  double b_K = 0.0;
  Eigen::Index m = 0;
  Eigen::Index p = 0;
  double sum_m2p2 = 0.0;
};

struct LearnerConfig {
  Feedback feedback = Feedback::gradient;
  Schedule schedule = Schedule::strongly_convex;
  ProjectionMode projection = ProjectionMode::sv_clip;
  double lambda = 0.0;  // 0: use the instance's strong-convexity coefficient
  double b_K = 1.0;
  double b_G = 0.0;  // convex_sqrt only; 0: derived from the instance data
  long horizon = 1;
  std::optional<Policy> initial_policy;  // default: zero
  std::uint64_t seed = 0;                // used by the engine-less overloads
  long snapshot_interval = 0;            // 0: no snapshots
};

struct RegretTrace {
  std::vector<double> losses;           // realized loss of the played policy
  std::vector<double> played_norms;     // operator norm of the played policy
  std::vector<double> cumulative_loss;  // prefix sums of losses
  std::vector<std::pair<long, Policy>> snapshots;
  Policy final_policy;
};

/// Optional per-step recording of the environment path, e.g. to compute the
/// hindsight comparator on the same realizations.
struct SamplePath {
  std::vector<EnvironmentSample> samples;
};

double step_size(Schedule schedule, long t, const ScheduleParams& params);

/// Exploration radius of the bandit learner. Defined for the strongly_convex
/// and convex_two_thirds schedules.
double exploration(Schedule schedule, long t, const BlockStructure& structure, double b_K);

/// One projected online-gradient update: project(K - eta * estimate).
Policy ogd_step(const Policy& k, const Policy& estimate, double eta, double b_K,
                ProjectionMode mode);

/// Plays K_t, observes per-player blocks of 2 D^T z y^T, updates with the
/// scheduled step and projects. One loss is recorded per step, t = 1..T.
RegretTrace run_gradient_feedback(const ProblemInstance& p, const LearnerConfig& cfg,
                                  std::mt19937_64& rng, SamplePath* path = nullptr);
RegretTrace run_gradient_feedback(const ProblemInstance& p, const LearnerConfig& cfg);

/// Plays the perturbed policy K_t + R_t E_t, observes only the scalar loss,
/// and forms each player's estimate loss * R_i * sqrt(m_i p_i) / eps_t.
/// Recorded losses are those of the played (perturbed) policy. The update is
/// applied to the unperturbed K_t; the perturbed policy is not re-projected.
RegretTrace run_bandit_feedback(const ProblemInstance& p, const LearnerConfig& cfg,
                                std::mt19937_64& rng, SamplePath* path = nullptr);
RegretTrace run_bandit_feedback(const ProblemInstance& p, const LearnerConfig& cfg);

/// (b_G^2 / (2 lambda)) (1 + ln T).
double regret_bound_gradient(double b_G_sq, double lambda, double horizon);

struct BanditRegretConstants {
  double M1 = 0.0;  // ||D||^2 (||C||^2 Tr Vxx + Tr Vvv)
  double M2 = 0.0;  // (||H|| + ||D||(b_K+1)(||C||+1))^4 (kappa_x + 2 Tr Tr + kappa_v)
};
BanditRegretConstants bandit_regret_constants(const ProblemInstance& p, double b_K);

/// 2 (M1 + M2/lambda) sqrt(sum m_i^2 p_i^2) sqrt(T).
double regret_bound_bandit(const ProblemInstance& p, double b_K, double lambda, double horizon);

/// Prefix sums of (loss_t - comparator_t); may be negative early.
std::vector<double> regret_against(const RegretTrace& trace,
                                   const std::vector<double>& comparator_losses);

}  // namespace teamdec
