#include "teamdec/experiment.hpp"

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "teamdec/errors.hpp"
#include "teamdec/linalg.hpp"
#include "teamdec/oracle.hpp"
#include "teamdec/rng.hpp"
#include "teamdec/robust.hpp"

namespace teamdec {

RegretAggregator::RegretAggregator(long horizon)
    : horizon_(horizon),
      sums_(horizon),
      welford_mean_(horizon, 0.0),
      welford_m2_(horizon, 0.0) {}

void RegretAggregator::add(const std::vector<double>& cumulative_regret) {
  if (static_cast<long>(cumulative_regret.size()) != horizon_) {
    fail(ErrorCode::LengthMismatch, "regret vector length does not match horizon");
  }
  ++count_;
  const double n = static_cast<double>(count_);
  for (long t = 0; t < horizon_; ++t) {
    const double x = cumulative_regret[t];
    sums_[t].add(x);
    const double delta = x - welford_mean_[t];
    welford_mean_[t] += delta / n;
    welford_m2_[t] += delta * (x - welford_mean_[t]);
  }
}

std::vector<double> RegretAggregator::mean() const {
  std::vector<double> out(horizon_, 0.0);
  if (count_ == 0) return out;
  for (long t = 0; t < horizon_; ++t) out[t] = sums_[t].value() / static_cast<double>(count_);
  return out;
}

std::vector<double> RegretAggregator::sample_stddev() const {
  std::vector<double> out(horizon_, 0.0);
  if (count_ < 2) return out;
  for (long t = 0; t < horizon_; ++t) {
    const double var = welford_m2_[t] / static_cast<double>(count_ - 1);
    out[t] = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  return out;
}

std::vector<double> replication_regret(const ProblemInstance& instance, Feedback feedback,
                                       const LearnerConfig& cfg, std::uint64_t base_seed,
                                       long replication, RegretTrace* trace_out) {
  auto rng = make_stream(base_seed + static_cast<std::uint64_t>(replication),
                         feedback == Feedback::gradient ? 0 : 1);
  SamplePath path;
  path.samples.reserve(cfg.horizon);
  RegretTrace trace = feedback == Feedback::gradient
                          ? run_gradient_feedback(instance, cfg, rng, &path)
                          : run_bandit_feedback(instance, cfg, rng, &path);

  const Policy comparator = best_in_hindsight(instance, path.samples, cfg.b_K);
  std::vector<double> comparator_losses(path.samples.size());
  for (std::size_t t = 0; t < path.samples.size(); ++t) {
    comparator_losses[t] = realized_loss(instance, comparator, path.samples[t]);
  }
  std::vector<double> regret = regret_against(trace, comparator_losses);
  if (trace_out) *trace_out = std::move(trace);
  return regret;
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TEAMDEC_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

struct RepResult {
  std::vector<double> gradient;
  std::vector<double> bandit;
};

LearnerConfig learner_config(const ExperimentConfig& cfg, Feedback feedback, double b_K,
                             double lambda) {
  LearnerConfig lc;
  lc.feedback = feedback;
  lc.schedule = cfg.schedule;
  lc.projection = cfg.projection;
  lc.lambda = lambda;
  lc.b_K = b_K;
  lc.horizon = cfg.horizon;
  lc.snapshot_interval = cfg.snapshot_interval;
  return lc;
}

}  // namespace

double default_policy_budget(const ProblemInstance& p) {
  RobustInstance r{p.H, p.D, p.C, p.structure};
  const auto budgets = robust_policy_budget(r);
  double b = 0.0;
  for (double v : budgets) b = std::max(b, v);
  return b;
}

AggregateStats run_experiment(const ExperimentConfig& cfg) {
  if (cfg.replications < 1 || cfg.horizon < 1) {
    fail(ErrorCode::InvalidConfig, "replications and horizon must be at least 1");
  }
  if (!cfg.run_gradient && !cfg.run_bandit) {
    fail(ErrorCode::InvalidConfig, "at least one feedback type must be enabled");
  }
  if (!cfg.instance.validated()) fail(ErrorCode::InvalidConfig, "instance must be validated");

  const double b_K = cfg.b_K > 0.0 ? cfg.b_K : default_policy_budget(cfg.instance);
  if (!(b_K > 0.0)) fail(ErrorCode::NonPositiveBudget, "resolved policy budget is zero");
  const LearnerConfig grad_cfg = learner_config(cfg, Feedback::gradient, b_K, cfg.lambda);
  const LearnerConfig bandit_cfg = learner_config(cfg, Feedback::bandit, b_K, cfg.lambda);

  RegretAggregator grad_agg(cfg.horizon);
  RegretAggregator bandit_agg(cfg.horizon);

  const int workers = static_cast<int>(
      std::max<long>(1, std::min<long>(resolve_workers(cfg.workers), cfg.replications)));

  std::mutex mu;
  std::condition_variable cv;
  std::map<long, RepResult> pending;
  long expected = 0;  // next replication the merger will consume; guarded by mu
  std::atomic<long> next_rep{0};
  const std::size_t backlog_cap = static_cast<std::size_t>(2 * workers + 8);

  auto work = [&]() {
    for (;;) {
      const long rep = next_rep.fetch_add(1);
      if (rep >= cfg.replications) return;
      RepResult result;
      if (cfg.run_gradient) {
        result.gradient =
            replication_regret(cfg.instance, Feedback::gradient, grad_cfg, cfg.base_seed, rep);
      }
      if (cfg.run_bandit) {
        result.bandit =
            replication_regret(cfg.instance, Feedback::bandit, bandit_cfg, cfg.base_seed, rep);
      }
      std::unique_lock<std::mutex> lock(mu);
      // The merger's next replication may always enter, or the backlog could
      // fill with later results and stall everyone.
      cv.wait(lock, [&] { return pending.size() < backlog_cap || rep == expected; });
      pending.emplace(rep, std::move(result));
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);

  // Merge strictly in replication order so output is identical for any pool size.
  for (long rep = 0; rep < cfg.replications; ++rep) {
    RepResult result;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return pending.count(rep) > 0; });
      result = std::move(pending.at(rep));
      pending.erase(rep);
      expected = rep + 1;
      cv.notify_all();
    }
    if (cfg.run_gradient) grad_agg.add(result.gradient);
    if (cfg.run_bandit) bandit_agg.add(result.bandit);
  }
  for (auto& th : pool) th.join();

  AggregateStats stats;
  stats.horizon = cfg.horizon;
  if (cfg.run_gradient) {
    stats.avg_gradient = grad_agg.mean();
    stats.std_gradient = grad_agg.sample_stddev();
  }
  if (cfg.run_bandit) {
    stats.avg_bandit = bandit_agg.mean();
    stats.std_bandit = bandit_agg.sample_stddev();
  }
  return stats;
}

namespace {

// Shortest representation that round-trips doubles (up to 17 significant digits).
std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, buf + len);
}

double parse_double(const std::string& field) {
  double v = 0.0;
  const auto* begin = field.data();
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    fail(ErrorCode::IoError, "bad numeric field: " + field);
  }
  return v;
}

}  // namespace

void write_stats_csv(const AggregateStats& stats, const std::string& path) {
  if (stats.horizon <= 0) fail(ErrorCode::InvalidConfig, "stats are empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "t,avg_gradient,std_gradient,avg_bandit,std_bandit\n";
  const bool has_grad = !stats.avg_gradient.empty();
  const bool has_bandit = !stats.avg_bandit.empty();
  for (long t = 0; t < stats.horizon; ++t) {
    out << (t + 1) << ',';
    if (has_grad) out << format_double(stats.avg_gradient[t]) << ',' << format_double(stats.std_gradient[t]);
    else out << ',';
    out << ',';
    if (has_bandit) out << format_double(stats.avg_bandit[t]) << ',' << format_double(stats.std_bandit[t]);
    else out << ',';
    out << '\n';
  }
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

AggregateStats read_stats_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != "t,avg_gradient,std_gradient,avg_bandit,std_bandit") {
    fail(ErrorCode::IoError, "unexpected header in " + path);
  }
  AggregateStats stats;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t pos = line.find(',', start);
      if (pos == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
    if (fields.size() != 5) fail(ErrorCode::IoError, "expected 5 fields per row");
    ++stats.horizon;
    if (!fields[1].empty()) {
      stats.avg_gradient.push_back(parse_double(fields[1]));
      stats.std_gradient.push_back(parse_double(fields[2]));
    }
    if (!fields[3].empty()) {
      stats.avg_bandit.push_back(parse_double(fields[3]));
      stats.std_bandit.push_back(parse_double(fields[4]));
    }
  }
  return stats;
}

void write_trace_csv(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write " + path);
  out << "t,loss,norm\n";
  for (std::size_t t = 0; t < trace.losses.size(); ++t) {
    out << (t + 1) << ',' << format_double(trace.losses[t]) << ','
        << format_double(trace.played_norms[t]) << '\n';
  }
}

BoundsReport bounds_report(const ExperimentConfig& cfg) {
  if (!cfg.instance.validated()) fail(ErrorCode::InvalidConfig, "instance must be validated");
  BoundsReport report;
  report.instance_name = cfg.instance_name;
  report.b_K = cfg.b_K > 0.0 ? cfg.b_K : default_policy_budget(cfg.instance);
  report.horizon = static_cast<double>(cfg.horizon);
  report.epsilon1 = exploration(Schedule::strongly_convex, 1, cfg.instance.structure, report.b_K);
  report.moments = moment_bounds(cfg.instance, report.b_K, report.epsilon1);
  report.lambda = cfg.lambda > 0.0 ? cfg.lambda : report.moments.alpha;

  const auto constants = bandit_regret_constants(cfg.instance, report.b_K);
  report.M1 = constants.M1;
  report.M2 = constants.M2;
  if (report.moments.b_G_sq > 0.0 && report.lambda > 0.0) {
    report.gradient_bound = regret_bound_gradient(report.moments.b_G_sq, report.lambda, report.horizon);
    report.bandit_bound = regret_bound_bandit(cfg.instance, report.b_K, report.lambda, report.horizon);
  }
  report.has_reference = cfg.instance_name == "example41";
  return report;
}

std::string to_text(const BoundsReport& r) {
  std::ostringstream out;
  out.precision(12);
  out << "instance: " << r.instance_name << "\n";
  out << "b_K: " << r.b_K << "\n";
  out << "lambda: " << r.lambda << "\n";
  out << "T: " << r.horizon << "\n";
  out << "alpha: " << r.moments.alpha << "\n";
  out << "kappa_x: " << r.moments.kappa_x << "\n";
  out << "kappa_v: " << r.moments.kappa_v << "\n";
  out << "b_l: " << r.moments.b_l << "\n";
  out << "kappa_z: " << r.moments.kappa_z << "\n";
  out << "b_G_sq: " << r.moments.b_G_sq << "\n";
  out << "epsilon_1: " << r.epsilon1 << "\n";
  if (r.moments.bandit_b_G_sq) out << "bandit_b_G_sq(epsilon_1): " << *r.moments.bandit_b_G_sq << "\n";
  out << "M1: " << r.M1 << "\n";
  out << "M2: " << r.M2 << "\n";
  out << "gradient_regret_bound(T): " << r.gradient_bound << "\n";
  out << "bandit_regret_bound(T): " << r.bandit_bound << "\n";
  if (r.has_reference) {
    out << "reference_gradient_bound: 46000(1+log T) = "
        << example41_reference_gradient_bound(r.horizon) << "\n";
    out << "reference_bandit_bound: 1.42e6·sqrt(T) = "
        << example41_reference_bandit_bound(r.horizon) << "\n";
  }
  return out.str();
}

ProblemInstance example41_instance() {
  ProblemInstance p;
  p.H = Eigen::MatrixXd(3, 1);
  p.H << 1.0, 0.0, 0.0;
  p.D = Eigen::MatrixXd(3, 2);
  p.D << 1.0, 1.0, 1.0, 0.0, 0.0, 1.0;
  p.C = Eigen::MatrixXd(2, 1);
  p.C << 1.0, 1.0;
  p.Vxx = Eigen::MatrixXd::Identity(1, 1);
  p.Vvv = Eigen::MatrixXd::Identity(2, 2);
  p.structure = BlockStructure({1, 1}, {1, 1});
  validate_instance(p);
  return p;
}

ProblemInstance builtin_instance(const std::string& name) {
  if (name == "example41") return example41_instance();
  fail(ErrorCode::InvalidConfig, "unknown builtin instance: " + name);
}

double example41_reference_gradient_bound(double t) { return 46000.0 * (1.0 + std::log(t)); }

double example41_reference_bandit_bound(double t) { return 1.42e6 * std::sqrt(t); }

}  // namespace teamdec
