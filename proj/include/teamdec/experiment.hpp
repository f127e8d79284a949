#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "teamdec/learners.hpp"
#include "teamdec/numerics.hpp"
#include "teamdec/problem.hpp"

namespace teamdec {

/// Batch study: R replications per feedback type, each replication scored
/// against its own best-in-hindsight comparator on the realized path.
struct ExperimentConfig {
  ProblemInstance instance;
  std::string instance_name = "custom";
  bool run_gradient = true;
  bool run_bandit = true;
  long replications = 1;
  long horizon = 1;
  std::uint64_t base_seed = 0;
  double lambda = 0.0;  // 0: instance strong-convexity coefficient
  double b_K = 0.0;     // 0: certified budget from the instance data
  ProjectionMode projection = ProjectionMode::sv_clip;
  Schedule schedule = Schedule::strongly_convex;
  long snapshot_interval = 0;
  int workers = 0;  // 0: TEAMDEC_WORKERS environment variable, then hardware
};

/// Per-step mean and Bessel-corrected standard deviation of cumulative regret
/// across replications, per feedback type. Missing feedbacks have empty rows.
struct AggregateStats {
  long horizon = 0;
  std::vector<double> avg_gradient;
  std::vector<double> std_gradient;
  std::vector<double> avg_bandit;
  std::vector<double> std_bandit;
};

/// Order-sensitive aggregator: replications must be merged in replication
/// order for byte-stable output. Means use compensated sums.
class RegretAggregator {
 public:
  explicit RegretAggregator(long horizon);
  void add(const std::vector<double>& cumulative_regret);
  long count() const { return count_; }
  std::vector<double> mean() const;
  std::vector<double> sample_stddev() const;

 private:
  long horizon_;
  long count_ = 0;
  std::vector<KahanSum> sums_;
  std::vector<double> welford_mean_;
  std::vector<double> welford_m2_;
};

/// Cumulative-regret vector of one replication: the learner runs on the
/// stream (base_seed + replication, feedback id) and is scored against the
/// best-in-hindsight policy of its own realized path.
std::vector<double> replication_regret(const ProblemInstance& instance, Feedback feedback,
                                       const LearnerConfig& cfg, std::uint64_t base_seed,
                                       long replication, RegretTrace* trace_out = nullptr);

AggregateStats run_experiment(const ExperimentConfig& cfg);

/// Header `t,avg_gradient,std_gradient,avg_bandit,std_bandit`, LF endings,
/// floats with up to 17 significant digits; absent feedbacks leave fields empty.
void write_stats_csv(const AggregateStats& stats, const std::string& path);
AggregateStats read_stats_csv(const std::string& path);

/// Per-replication trace rows (t, loss, norm).
void write_trace_csv(const RegretTrace& trace, const std::string& path);

struct BoundsReport {
  std::string instance_name;
  double b_K = 0.0;
  double lambda = 0.0;
  double horizon = 0.0;
  MomentBounds moments;
  double epsilon1 = 0.0;  // exploration at t = 1
  double M1 = 0.0;
  double M2 = 0.0;
  double gradient_bound = 0.0;
  double bandit_bound = 0.0;
  bool has_reference = false;  // example41 ships reference coefficients
};

BoundsReport bounds_report(const ExperimentConfig& cfg);
std::string to_text(const BoundsReport& report);

/// Builtin benchmark instance (name "example41"): two scalar players,
/// H = [1,0,0]^T, D = [[1,1],[1,0],[0,1]], C_1 = C_2 = 1, Vxx = 1, Vvv = I2.
ProblemInstance example41_instance();
ProblemInstance builtin_instance(const std::string& name);

/// Reference regret coefficients shipped with the example41 benchmark.
double example41_reference_gradient_bound(double t);  // 46000 (1 + log t)
double example41_reference_bandit_bound(double t);    // 1.42e6 sqrt(t)

/// Certified default policy budget for an instance's data:
/// max_i 2 ||H|| / (sigma_min>0(D) sigma_min>0(C_i)).
double default_policy_budget(const ProblemInstance& p);

int resolve_workers(int requested);

}  // namespace teamdec
