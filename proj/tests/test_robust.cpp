#include <doctest.h>

#include "support/test_instances.hpp"
#include "teamdec/errors.hpp"
#include "teamdec/experiment.hpp"
#include "teamdec/learners.hpp"
#include "teamdec/linalg.hpp"
#include "teamdec/robust.hpp"
#include "teamdec/rng.hpp"

using namespace teamdec;
using namespace teamdec::testing;

namespace {

RobustInstance scalar_robust() {
  RobustInstance r;
  r.H = Eigen::MatrixXd::Identity(1, 1);
  r.D = Eigen::MatrixXd::Identity(1, 1);
  r.C = Eigen::MatrixXd::Identity(1, 1);
  r.structure = BlockStructure({1}, {1});
  return r;
}

RobustInstance example41_robust() {
  const ProblemInstance p = example41_instance();
  return RobustInstance{p.H, p.D, p.C, p.structure};
}

// Dense grid minimax for instances with two scalar gain blocks.
double grid_minimax(const RobustInstance& r, double resolution = 1e-2) {
  const auto budgets = robust_policy_budget(r);
  REQUIRE(budgets.size() == 2);
  double best = std::numeric_limits<double>::infinity();
  Policy k = Policy::zero(r.structure);
  for (double k1 = -budgets[0]; k1 <= budgets[0] + 1e-12; k1 += resolution) {
    for (double k2 = -budgets[1]; k2 <= budgets[1] + 1e-12; k2 += resolution) {
      k.block(0)(0, 0) = k1;
      k.block(1)(0, 0) = k2;
      const Eigen::MatrixXd m = r.H + r.D * k.as_full_matrix() * r.C;
      best = std::min(best, max_eigenvalue_sym(m.transpose() * m));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("gamma_trivial_upper") {
  RobustInstance r = scalar_robust();
  CHECK(gamma_trivial_upper(r) == doctest::Approx(1.0));

  r.H = 2.0 * Eigen::MatrixXd::Identity(1, 1);
  CHECK(gamma_trivial_upper(r) == doctest::Approx(4.0));

  r.H = Eigen::MatrixXd::Zero(1, 1);
  CHECK(gamma_trivial_upper(r) == doctest::Approx(0.0));

  CHECK(gamma_trivial_upper(example41_robust()) == doctest::Approx(1.0));
}

TEST_CASE("robust_policy_budget") {
  CHECK(robust_policy_budget(scalar_robust()) == std::vector<double>{2.0});

  const auto ex_budgets = robust_policy_budget(example41_robust());
  REQUIRE(ex_budgets.size() == 2);
  CHECK(ex_budgets[0] == doctest::Approx(2.0));  // sigma_min>0(D) = 1, C_i = 1
  CHECK(ex_budgets[1] == doctest::Approx(2.0));

  RobustInstance zero_h = scalar_robust();
  zero_h.H = Eigen::MatrixXd::Zero(1, 1);
  CHECK(robust_policy_budget(zero_h) == std::vector<double>{0.0});

  RobustInstance zero_c = scalar_robust();
  zero_c.C = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_WITH_AS(robust_policy_budget(zero_c), doctest::Contains("ZeroMatrix"), Error);
}

TEST_CASE("lmi_margin") {
  const RobustInstance ex = example41_robust();
  const Policy zero = Policy::zero(ex.structure);
  CHECK(lmi_margin(ex, zero, gamma_trivial_upper(ex)) == doctest::Approx(0.0));
  CHECK(lmi_margin(ex, zero, gamma_trivial_upper(ex) + 1.0) == doctest::Approx(1.0));

  const RobustInstance sc = scalar_robust();
  Policy cancel = Policy::zero(sc.structure);
  cancel.block(0)(0, 0) = -1.0;
  CHECK(lmi_margin(sc, cancel, 0.0) == doctest::Approx(0.0));

  CHECK_THROWS_AS(lmi_margin(sc, cancel, -1.0), Error);
}

TEST_CASE("spectraplex_project") {
  const Eigen::MatrixXd half = Eigen::MatrixXd::Identity(2, 2) / 2.0;
  CHECK((spectraplex_project(half) - half).cwiseAbs().maxCoeff() < 1e-14);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
  a(0, 0) = 2.0;
  const Eigen::MatrixXd pa = spectraplex_project(a);
  CHECK(pa(0, 0) == doctest::Approx(1.0));
  CHECK(pa(1, 1) == doctest::Approx(0.0));

  Eigen::MatrixXd b = 0.6 * Eigen::MatrixXd::Identity(2, 2);
  const Eigen::MatrixXd pb = spectraplex_project(b);
  CHECK(pb(0, 0) == doctest::Approx(0.5));
  CHECK(pb(1, 1) == doctest::Approx(0.5));

  auto rng = make_stream(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::MatrixXd s = random_matrix(3, 3, rng);
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    const Eigen::MatrixXd proj = spectraplex_project(sym);
    CHECK(std::abs(proj.trace() - 1.0) <= 1e-12);
    CHECK(min_eigenvalue_sym(proj) >= -1e-12);
    const Eigen::MatrixXd again = spectraplex_project(proj);
    CHECK((again - proj).cwiseAbs().maxCoeff() <= 1e-10);

    const Eigen::MatrixXd t = random_matrix(3, 3, rng);
    const Eigen::MatrixXd sym_t = 0.5 * (t + t.transpose());
    const Eigen::MatrixXd proj_t = spectraplex_project(sym_t);
    CHECK((proj - proj_t).norm() <= (sym - sym_t).norm() + 1e-12);
  }
}

TEST_CASE("saddle_solve: perfect cancellation and degenerate cases") {
  const SaddleState s = saddle_solve(scalar_robust(), 1e-8, 500000);
  CHECK(s.converged);
  CHECK(s.gamma <= 1e-6);
  CHECK(std::abs(s.K.block(0)(0, 0) + 1.0) < 1e-3);
  CHECK(s.X(0, 0) == doctest::Approx(1.0));
  CHECK(s.gap <= 1e-8);
  CHECK(s.gap >= -1e-8);

  RobustInstance zero_h = scalar_robust();
  zero_h.H = Eigen::MatrixXd::Zero(1, 1);
  const SaddleState z = saddle_solve(zero_h, 1e-8, 1000);
  CHECK(z.converged);
  CHECK(z.gamma == doctest::Approx(0.0));
  CHECK(z.K.block(0)(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("saddle_solve: invertible D with identity C cancels within budget") {
  auto rng = make_stream(7);
  for (int trial = 0; trial < 5; ++trial) {
    RobustInstance r;
    r.structure = BlockStructure({2}, {2});
    r.D = random_spd(2, rng, 0.6);
    r.C = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd k_target = random_matrix(2, 2, rng, 0.3);
    r.H = -r.D * k_target;  // -D^{-1} H = k_target, well inside the budget
    const double budget = robust_policy_budget(r)[0];
    REQUIRE(operator_norm(k_target) < budget);
    const SaddleState s = saddle_solve(r, 1e-6, 500000);
    CHECK(s.converged);
    CHECK(s.gamma <= 1e-6);
  }
}

TEST_CASE("saddle_solve reaches tight gaps on random two-player instances") {
  auto rng = make_stream(11);
  for (int trial = 0; trial < 5; ++trial) {
    const RobustInstance r = random_robust_instance(rng, 2, 2);
    const SaddleState s = saddle_solve(r, 1e-4, 2000000);
    CHECK(s.converged);
    CHECK(s.gap <= 1e-4);
    CHECK(s.gap >= -1e-8);
    CHECK(s.gamma <= gamma_trivial_upper(r) + 1e-4);
    CHECK(lmi_margin(r, s.K, s.gamma + 1e-4) >= 0.0);

    const double grid = grid_minimax(r);
    CHECK(std::abs(s.gamma - grid) <= 2e-2);
  }
}

TEST_CASE("relaxed_instance wiring") {
  const RobustInstance sc = scalar_robust();
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(1, 1);
  const ProblemInstance p = relaxed_instance(sc, x);
  CHECK(p.Vxx(0, 0) == doctest::Approx(1.0));
  CHECK(p.Vvv(0, 0) == doctest::Approx(0.0));
  CHECK(p.validated());
  CHECK(gaussian_fourth_moment(p.Vxx) == doctest::Approx(1.0 + 2.0 * (x * x).trace()));

  // rank-one nature strategy with stacked identical measurements: no curvature
  RobustInstance two = example41_robust();
  Eigen::MatrixXd x1 = Eigen::MatrixXd::Identity(1, 1);
  const ProblemInstance relaxed = relaxed_instance(two, x1);
  CHECK_FALSE(relaxed.assumption2_holds());  // C X C^T = [[1,1],[1,1]] is singular, Vvv = 0
}

TEST_CASE("robust_regret_bound plug-in values") {
  const RobustInstance sc = scalar_robust();
  CHECK(robust_regret_bound(Feedback::gradient, sc, 1.0, 4.0) ==
        doctest::Approx(4.0 * (1.0 + 48.0) * 2.0));
  CHECK(robust_regret_bound(Feedback::bandit, sc, 1.0, 8.0) ==
        doctest::Approx(1.5 * std::cbrt(4.0) * 50.0 * 4.0));

  RobustInstance zero_h = sc;
  zero_h.H = Eigen::MatrixXd::Zero(1, 1);
  CHECK(robust_regret_bound(Feedback::gradient, zero_h, 0.0, 100.0) == doctest::Approx(0.0));
}

TEST_CASE("bandit learner with the two-thirds schedule runs on a relaxed instance") {
  const RobustInstance sc = scalar_robust();
  const SaddleState s = saddle_solve(sc, 1e-8, 500000);
  const ProblemInstance relaxed = relaxed_instance(sc, s.X);
  const double b_K = robust_policy_budget(sc)[0];
  const double kappa_x = gaussian_fourth_moment(relaxed.Vxx);

  const long reps = 32;
  const long horizon = 300;
  LearnerConfig cfg;
  cfg.feedback = Feedback::bandit;
  cfg.schedule = Schedule::convex_two_thirds;
  cfg.horizon = horizon;
  cfg.b_K = b_K;

  RegretAggregator agg(horizon);
  for (long rep = 0; rep < reps; ++rep) {
    agg.add(replication_regret(relaxed, Feedback::bandit, cfg, 57, rep));
  }
  const auto mean = agg.mean();
  for (long t = 1; t <= horizon; ++t) {
    CHECK(mean[t - 1] <=
          robust_regret_bound(Feedback::bandit, sc, b_K, static_cast<double>(t), kappa_x));
  }

  // played policies honor the exploration budget ||K~|| <= b_K + eps_1
  LearnerConfig single = cfg;
  single.horizon = 50;
  auto rng = make_stream(5);
  const RegretTrace trace = run_bandit_feedback(relaxed, single, rng);
  const double eps1 = exploration(Schedule::convex_two_thirds, 1, relaxed.structure, b_K);
  for (double norm : trace.played_norms) CHECK(norm <= b_K + eps1 + 1e-12);
}

TEST_CASE("convex-rate learner on a relaxed instance stays below the robust bound") {
  const RobustInstance sc = scalar_robust();
  const SaddleState s = saddle_solve(sc, 1e-8, 500000);
  const ProblemInstance relaxed = relaxed_instance(sc, s.X);
  const double b_K = robust_policy_budget(sc)[0];
  const double kappa_x = gaussian_fourth_moment(relaxed.Vxx);

  const long reps = 64;
  const long horizon = 400;
  LearnerConfig cfg;
  cfg.feedback = Feedback::gradient;
  cfg.schedule = Schedule::convex_sqrt;
  cfg.horizon = horizon;
  cfg.b_K = b_K;

  RegretAggregator agg(horizon);
  for (long rep = 0; rep < reps; ++rep) {
    agg.add(replication_regret(relaxed, Feedback::gradient, cfg, 31, rep));
  }
  const auto mean = agg.mean();
  for (long t = 1; t <= horizon; ++t) {
    CHECK(mean[t - 1] <=
          robust_regret_bound(Feedback::gradient, sc, b_K, static_cast<double>(t), kappa_x));
  }
}
