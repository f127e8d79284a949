#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>

#include "teamdec/experiment.hpp"
#include "teamdec/oracle.hpp"
#include "teamdec/rng.hpp"
#include "teamdec/robust.hpp"
#include "teamdec/serialization.hpp"

namespace {

using teamdec::Error;
using teamdec::ErrorCode;

void print_error_line(const std::string& code, const std::string& message) {
  nlohmann::json j;
  j["code"] = code;
  j["message"] = message;
  std::cerr << "error: " << j.dump() << "\n";
}

struct InstanceFlags {
  std::string config_path;
  std::string builtin;

  void attach(CLI::App* cmd) {
    auto* cfg = cmd->add_option("--config", config_path, "Instance document (JSON)");
    auto* blt = cmd->add_option("--builtin", builtin, "Builtin instance name (example41)");
    cfg->excludes(blt);
  }

  teamdec::ProblemInstance resolve(std::string* name_out = nullptr) const {
    if (!builtin.empty()) {
      if (name_out) *name_out = builtin;
      return teamdec::builtin_instance(builtin);
    }
    if (config_path.empty()) {
      teamdec::fail(ErrorCode::InvalidConfig, "need --config or --builtin");
    }
    if (name_out) *name_out = config_path;
    return teamdec::load_instance(config_path);
  }
};

teamdec::ProjectionMode parse_projection(const std::string& name) {
  if (name == "sv_clip") return teamdec::ProjectionMode::sv_clip;
  if (name == "radial") return teamdec::ProjectionMode::radial;
  if (name == "paper_literal") return teamdec::ProjectionMode::paper_literal;
  teamdec::fail(ErrorCode::InvalidConfig, "unknown projection mode: " + name);
}

teamdec::Schedule parse_schedule(const std::string& name) {
  if (name == "strongly_convex") return teamdec::Schedule::strongly_convex;
  if (name == "convex_sqrt") return teamdec::Schedule::convex_sqrt;
  if (name == "convex_two_thirds") return teamdec::Schedule::convex_two_thirds;
  teamdec::fail(ErrorCode::InvalidConfig, "unknown schedule: " + name);
}

void print_policy(const std::string& label, const teamdec::Policy& k) {
  std::cout << label << ":\n";
  for (Eigen::Index i = 0; i < k.block_count(); ++i) {
    std::cout << "  block " << i << ":\n";
    const auto& b = k.block(i);
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      std::cout << "    ";
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        std::printf("% .12g%s", b(r, c), c + 1 == b.cols() ? "" : " ");
      }
      std::cout << "\n";
    }
  }
}

int run_simulate(const InstanceFlags& inst, const std::string& feedback, long replications,
                 long horizon, std::uint64_t seed, double lambda, double b_K,
                 const std::string& projection, const std::string& schedule,
                 const std::string& out_path, long snapshot_interval, int workers,
                 const std::string& trace_dir) {
  teamdec::ExperimentConfig cfg;
  cfg.instance = inst.resolve(&cfg.instance_name);
  cfg.run_gradient = feedback == "gradient" || feedback == "both";
  cfg.run_bandit = feedback == "bandit" || feedback == "both";
  if (!cfg.run_gradient && !cfg.run_bandit) {
    teamdec::fail(ErrorCode::InvalidConfig, "feedback must be gradient, bandit or both");
  }
  cfg.replications = replications;
  cfg.horizon = horizon;
  cfg.base_seed = seed;
  cfg.lambda = lambda;
  cfg.b_K = b_K;
  cfg.projection = parse_projection(projection);
  cfg.schedule = parse_schedule(schedule);
  cfg.snapshot_interval = snapshot_interval;
  cfg.workers = workers;

  const teamdec::AggregateStats stats = teamdec::run_experiment(cfg);
  teamdec::write_stats_csv(stats, out_path);
  std::cout << "wrote " << out_path << " (" << stats.horizon << " rows, " << replications
            << " replications)\n";

  if (!trace_dir.empty()) {
    const double budget = cfg.b_K > 0.0 ? cfg.b_K : teamdec::default_policy_budget(cfg.instance);
    for (long rep = 0; rep < replications; ++rep) {
      for (const auto feedback_kind :
           {teamdec::Feedback::gradient, teamdec::Feedback::bandit}) {
        const bool enabled = feedback_kind == teamdec::Feedback::gradient ? cfg.run_gradient
                                                                          : cfg.run_bandit;
        if (!enabled) continue;
        teamdec::LearnerConfig lc;
        lc.feedback = feedback_kind;
        lc.schedule = cfg.schedule;
        lc.projection = cfg.projection;
        lc.lambda = cfg.lambda;
        lc.b_K = budget;
        lc.horizon = cfg.horizon;
        teamdec::RegretTrace trace;
        teamdec::replication_regret(cfg.instance, feedback_kind, lc, cfg.base_seed, rep, &trace);
        const char* tag = feedback_kind == teamdec::Feedback::gradient ? "gradient" : "bandit";
        teamdec::write_trace_csv(trace,
                                 trace_dir + "/rep_" + std::to_string(rep) + "_" + tag + ".csv");
      }
    }
    std::cout << "wrote per-replication traces to " << trace_dir << "\n";
  }
  return 0;
}

int run_bounds(const InstanceFlags& inst, double b_K, double lambda, long horizon) {
  teamdec::ExperimentConfig cfg;
  cfg.instance = inst.resolve(&cfg.instance_name);
  cfg.b_K = b_K;
  cfg.lambda = lambda;
  cfg.horizon = horizon;
  std::cout << teamdec::to_text(teamdec::bounds_report(cfg));
  return 0;
}

int run_oracle(const InstanceFlags& inst, long samples, std::uint64_t seed, double b_K) {
  std::string name;
  teamdec::ProblemInstance p = inst.resolve(&name);
  const double budget = b_K > 0.0 ? b_K : teamdec::default_policy_budget(p);

  const teamdec::Policy expected_opt = teamdec::optimal_policy_expected(p);
  print_policy("expected-loss optimum", expected_opt);
  std::cout << "expected loss at optimum: " << teamdec::expected_loss(p, expected_opt) << "\n";

  auto rng = teamdec::make_stream(seed);
  std::vector<teamdec::EnvironmentSample> path;
  path.reserve(samples);
  for (long t = 0; t < samples; ++t) path.push_back(teamdec::sample_environment(p, rng));
  const teamdec::Policy hindsight = teamdec::best_in_hindsight(p, path, budget);
  print_policy("best in hindsight (" + std::to_string(samples) + " samples, b_K=" +
                   std::to_string(budget) + ")",
               hindsight);
  std::cout << "expected loss at hindsight policy: " << teamdec::expected_loss(p, hindsight)
            << "\n";
  return 0;
}

int run_robust(const std::string& config_path, const std::string& builtin, double tol,
               long max_iter) {
  teamdec::RobustInstance r;
  if (!builtin.empty()) {
    const teamdec::ProblemInstance p = teamdec::builtin_instance(builtin);
    r = teamdec::RobustInstance{p.H, p.D, p.C, p.structure};
  } else if (!config_path.empty()) {
    r = teamdec::load_robust_instance(config_path);
  } else {
    teamdec::fail(ErrorCode::InvalidConfig, "need --config or --builtin");
  }

  const teamdec::SaddleState s = teamdec::saddle_solve(r, tol, max_iter);
  std::cout << "gamma: " << s.gamma << "\n";
  std::cout << "payoff: " << s.payoff << "\n";
  std::cout << "gap: " << s.gap << "\n";
  std::cout << "iterations: " << s.iterations << "\n";
  std::cout << "converged: " << (s.converged ? "true" : "false") << "\n";
  print_policy("K", s.K);
  std::cout << "X:\n";
  for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
    std::cout << "  ";
    for (Eigen::Index j = 0; j < s.X.cols(); ++j) {
      std::printf("% .12g%s", s.X(i, j), j + 1 == s.X.cols() ? "" : " ");
    }
    std::cout << "\n";
  }
  if (!s.converged) {
    print_error_line("NotConverged", "saddle solver stopped at max-iter with gap " +
                                         std::to_string(s.gap));
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized linear-quadratic team decision learning"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run replicated learning and write aggregate CSV");
  InstanceFlags sim_inst;
  sim_inst.attach(sim);
  std::string feedback = "both";
  long replications = 1;
  long horizon = 10000;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  double b_K = 0.0;
  std::string projection = "sv_clip";
  std::string schedule = "strongly_convex";
  std::string out_path = "stats.csv";
  std::string trace_dir;
  long snapshot_interval = 0;
  int workers = 0;
  sim->add_option("--feedback", feedback, "gradient|bandit|both")->capture_default_str();
  sim->add_option("--replications", replications)->capture_default_str();
  sim->add_option("--horizon", horizon)->capture_default_str();
  sim->add_option("--seed", seed)->capture_default_str();
  sim->add_option("--lambda", lambda, "Step-size curvature parameter (0: instance alpha)");
  sim->add_option("--bk", b_K, "Policy norm budget (0: certified default)");
  sim->add_option("--projection", projection, "sv_clip|radial|paper_literal")
      ->capture_default_str();
  sim->add_option("--schedule", schedule, "strongly_convex|convex_sqrt|convex_two_thirds")
      ->capture_default_str();
  sim->add_option("--out", out_path, "Output CSV path")->capture_default_str();
  sim->add_option("--snapshot-interval", snapshot_interval);
  sim->add_option("--workers", workers, "Worker threads (0: TEAMDEC_WORKERS or hardware)");
  sim->add_option("--trace-dir", trace_dir, "Also write per-replication trace CSVs here");

  // bounds
  auto* bnd = app.add_subcommand("bounds", "Print closed-form constants and regret bounds");
  InstanceFlags bnd_inst;
  bnd_inst.attach(bnd);
  double bnd_bk = 0.0;
  double bnd_lambda = 0.0;
  long bnd_horizon = 10000;
  bnd->add_option("--bk", bnd_bk, "Policy norm budget (0: certified default)");
  bnd->add_option("--lambda", bnd_lambda, "Curvature parameter (0: instance alpha)");
  bnd->add_option("--horizon", bnd_horizon)->capture_default_str();

  // oracle
  auto* orc = app.add_subcommand("oracle", "Print the expected-loss and hindsight optima");
  InstanceFlags orc_inst;
  orc_inst.attach(orc);
  long orc_samples = 100000;
  std::uint64_t orc_seed = 0;
  double orc_bk = 0.0;
  orc->add_option("--samples", orc_samples)->capture_default_str();
  orc->add_option("--seed", orc_seed)->capture_default_str();
  orc->add_option("--bk", orc_bk, "Policy norm budget (0: certified default)");

  // robust
  auto* rob = app.add_subcommand("robust", "Solve the worst-case team game");
  std::string rob_config;
  std::string rob_builtin;
  double rob_tol = 1e-6;
  long rob_max_iter = 2000000;
  rob->add_option("--config", rob_config, "Robust instance document (JSON)");
  rob->add_option("--builtin", rob_builtin, "Builtin instance name (example41)");
  rob->add_option("--tol", rob_tol)->capture_default_str();
  rob->add_option("--max-iter", rob_max_iter)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) {
      return run_simulate(sim_inst, feedback, replications, horizon, seed, lambda, b_K,
                          projection, schedule, out_path, snapshot_interval, workers, trace_dir);
    }
    if (bnd->parsed()) return run_bounds(bnd_inst, bnd_bk, bnd_lambda, bnd_horizon);
    if (orc->parsed()) return run_oracle(orc_inst, orc_samples, orc_seed, orc_bk);
    if (rob->parsed()) return run_robust(rob_config, rob_builtin, rob_tol, rob_max_iter);
  } catch (const Error& e) {
    print_error_line(teamdec::to_string(e.code()), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error_line("Internal", e.what());
    return 1;
  }
  return 0;
}
