#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teamdec/experiment.hpp"
#include "teamdec/oracle.hpp"
#include "teamdec/rng.hpp"
#include "teamdec/robust.hpp"
#include "teamdec/serialization.hpp"

namespace py = pybind11;
using namespace teamdec;

namespace {

std::vector<Eigen::Index> to_dims(const std::vector<long>& v) {
  return std::vector<Eigen::Index>(v.begin(), v.end());
}

ProjectionMode projection_from(const std::string& name) {
  if (name == "sv_clip") return ProjectionMode::sv_clip;
  if (name == "radial") return ProjectionMode::radial;
  if (name == "paper_literal") return ProjectionMode::paper_literal;
  fail(ErrorCode::InvalidConfig, "unknown projection mode: " + name);
}

Schedule schedule_from(const std::string& name) {
  if (name == "strongly_convex") return Schedule::strongly_convex;
  if (name == "convex_sqrt") return Schedule::convex_sqrt;
  if (name == "convex_two_thirds") return Schedule::convex_two_thirds;
  fail(ErrorCode::InvalidConfig, "unknown schedule: " + name);
}

LearnerConfig make_learner_config(Feedback feedback, long horizon, double b_K, double lambda,
                                  const std::string& schedule, const std::string& projection,
                                  std::uint64_t seed) {
  LearnerConfig cfg;
  cfg.feedback = feedback;
  cfg.horizon = horizon;
  cfg.b_K = b_K;
  cfg.lambda = lambda;
  cfg.schedule = schedule_from(schedule);
  cfg.projection = projection_from(projection);
  cfg.seed = seed;
  return cfg;
}

py::dict trace_to_dict(const RegretTrace& trace) {
  py::dict d;
  d["losses"] = trace.losses;
  d["played_norms"] = trace.played_norms;
  d["cumulative_loss"] = trace.cumulative_loss;
  d["final_policy"] = trace.final_policy;
  return d;
}

}  // namespace

PYBIND11_MODULE(_teamdec, m) {
  m.doc() = "Online learning of decentralized linear-quadratic team decisions";

  py::register_exception<Error>(m, "TeamdecError");

  py::class_<BlockStructure>(m, "BlockStructure")
      .def(py::init([](const std::vector<long>& m_dims, const std::vector<long>& p_dims) {
             return BlockStructure(to_dims(m_dims), to_dims(p_dims));
           }),
           py::arg("output_dims"), py::arg("measurement_dims"))
      .def_property_readonly("player_count", &BlockStructure::player_count)
      .def_property_readonly("total_outputs", &BlockStructure::total_outputs)
      .def_property_readonly("total_measurements", &BlockStructure::total_measurements)
      .def_property_readonly("parameter_count", &BlockStructure::parameter_count)
      .def("sum_squared_block_sizes", &BlockStructure::sum_squared_block_sizes);

  py::class_<Policy>(m, "Policy")
      .def(py::init([](const std::vector<long>& m_dims, const std::vector<long>& p_dims,
                       const std::vector<Eigen::MatrixXd>& blocks) {
             return Policy(BlockStructure(to_dims(m_dims), to_dims(p_dims)), blocks);
           }),
           py::arg("output_dims"), py::arg("measurement_dims"), py::arg("blocks"))
      .def_static("zero", &Policy::zero)
      .def_property_readonly("blocks", [](const Policy& k) { return k.blocks(); })
      .def("as_full_matrix", &Policy::as_full_matrix)
      .def("operator_norm", &Policy::operator_norm)
      .def("to_parameters", &Policy::to_parameters);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def(py::init([](const Eigen::MatrixXd& H, const Eigen::MatrixXd& D,
                       const Eigen::MatrixXd& C, const Eigen::MatrixXd& Vxx,
                       const Eigen::MatrixXd& Vvv, const std::vector<long>& m_dims,
                       const std::vector<long>& p_dims) {
             ProblemInstance p;
             p.H = H;
             p.D = D;
             p.C = C;
             p.Vxx = Vxx;
             p.Vvv = Vvv;
             p.structure = BlockStructure(to_dims(m_dims), to_dims(p_dims));
             validate_instance(p);
             return p;
           }),
           py::arg("H"), py::arg("D"), py::arg("C"), py::arg("Vxx"), py::arg("Vvv"),
           py::arg("output_dims"), py::arg("measurement_dims"))
      .def_readonly("H", &ProblemInstance::H)
      .def_readonly("D", &ProblemInstance::D)
      .def_readonly("C", &ProblemInstance::C)
      .def_readonly("Vxx", &ProblemInstance::Vxx)
      .def_readonly("Vvv", &ProblemInstance::Vvv)
      .def_property_readonly("structure", [](const ProblemInstance& p) { return p.structure; })
      .def_property_readonly("assumption2_holds", &ProblemInstance::assumption2_holds)
      .def("to_json", &instance_to_json);

  py::class_<RobustInstance>(m, "RobustInstance")
      .def(py::init([](const Eigen::MatrixXd& H, const Eigen::MatrixXd& D,
                       const Eigen::MatrixXd& C, const std::vector<long>& m_dims,
                       const std::vector<long>& p_dims) {
             RobustInstance r{H, D, C, BlockStructure(to_dims(m_dims), to_dims(p_dims))};
             validate_robust_instance(r);
             return r;
           }),
           py::arg("H"), py::arg("D"), py::arg("C"), py::arg("output_dims"),
           py::arg("measurement_dims"))
      .def_readonly("H", &RobustInstance::H)
      .def_readonly("D", &RobustInstance::D)
      .def_readonly("C", &RobustInstance::C);

  m.def("example41", &example41_instance);
  m.def("instance_from_json", &instance_from_json);
  m.def("default_policy_budget", &default_policy_budget);

  m.def("expected_loss", &expected_loss);
  m.def("expected_gradient",
        [](const ProblemInstance& p, const Policy& k) { return expected_gradient(p, k).blocks(); });
  m.def("strong_convexity_alpha", &strong_convexity_alpha);
  m.def("gaussian_fourth_moment", &gaussian_fourth_moment);
  m.def(
      "moment_bounds",
      [](const ProblemInstance& p, double b_K, std::optional<double> epsilon) {
        const MomentBounds mb = moment_bounds(p, b_K, epsilon);
        py::dict d;
        d["kappa_x"] = mb.kappa_x;
        d["kappa_v"] = mb.kappa_v;
        d["b_l"] = mb.b_l;
        d["kappa_z"] = mb.kappa_z;
        d["alpha"] = mb.alpha;
        d["b_G_sq"] = mb.b_G_sq;
        d["b_K"] = mb.b_K;
        if (mb.bandit_b_G_sq) d["bandit_b_G_sq"] = *mb.bandit_b_G_sq;
        return d;
      },
      py::arg("instance"), py::arg("b_K"), py::arg("epsilon") = std::nullopt);

  m.def(
      "project_policy",
      [](const Policy& k, double b_K, const std::string& mode) {
        return project_policy(k, b_K, projection_from(mode));
      },
      py::arg("policy"), py::arg("b_K"), py::arg("mode") = "sv_clip");

  m.def("optimal_policy_expected", &optimal_policy_expected);
  m.def(
      "sample_path",
      [](const ProblemInstance& p, long count, std::uint64_t seed) {
        auto rng = make_stream(seed);
        py::list out;
        for (long i = 0; i < count; ++i) {
          const EnvironmentSample s = sample_environment(p, rng);
          py::dict d;
          d["x"] = s.x;
          d["v"] = s.v;
          d["y"] = s.y;
          out.append(std::move(d));
        }
        return out;
      },
      py::arg("instance"), py::arg("count"), py::arg("seed") = 0);
  m.def(
      "best_in_hindsight",
      [](const ProblemInstance& p, long count, std::uint64_t seed, double b_K) {
        auto rng = make_stream(seed);
        std::vector<EnvironmentSample> path;
        path.reserve(count);
        for (long i = 0; i < count; ++i) path.push_back(sample_environment(p, rng));
        return best_in_hindsight(p, path, b_K);
      },
      py::arg("instance"), py::arg("count"), py::arg("seed"), py::arg("b_K"));

  m.def(
      "run_gradient_feedback",
      [](const ProblemInstance& p, long horizon, double b_K, std::uint64_t seed, double lambda,
         const std::string& schedule, const std::string& projection) {
        return trace_to_dict(run_gradient_feedback(
            p, make_learner_config(Feedback::gradient, horizon, b_K, lambda, schedule, projection,
                                   seed)));
      },
      py::arg("instance"), py::arg("horizon"), py::arg("b_K"), py::arg("seed") = 0,
      py::arg("lambda") = 0.0, py::arg("schedule") = "strongly_convex",
      py::arg("projection") = "sv_clip");
  m.def(
      "run_bandit_feedback",
      [](const ProblemInstance& p, long horizon, double b_K, std::uint64_t seed, double lambda,
         const std::string& schedule, const std::string& projection) {
        return trace_to_dict(run_bandit_feedback(
            p, make_learner_config(Feedback::bandit, horizon, b_K, lambda, schedule, projection,
                                   seed)));
      },
      py::arg("instance"), py::arg("horizon"), py::arg("b_K"), py::arg("seed") = 0,
      py::arg("lambda") = 0.0, py::arg("schedule") = "strongly_convex",
      py::arg("projection") = "sv_clip");

  m.def("regret_bound_gradient", &regret_bound_gradient);
  m.def("regret_bound_bandit", &regret_bound_bandit);

  m.def(
      "run_experiment",
      [](const ProblemInstance& p, long replications, long horizon, std::uint64_t seed,
         const std::string& feedback, double b_K, double lambda, int workers,
         const std::string& schedule) {
        ExperimentConfig cfg;
        cfg.instance = p;
        cfg.run_gradient = feedback == "gradient" || feedback == "both";
        cfg.run_bandit = feedback == "bandit" || feedback == "both";
        cfg.replications = replications;
        cfg.horizon = horizon;
        cfg.base_seed = seed;
        cfg.b_K = b_K;
        cfg.lambda = lambda;
        cfg.workers = workers;
        cfg.schedule = schedule_from(schedule);
        const AggregateStats stats = run_experiment(cfg);
        py::dict d;
        d["horizon"] = stats.horizon;
        d["avg_gradient"] = stats.avg_gradient;
        d["std_gradient"] = stats.std_gradient;
        d["avg_bandit"] = stats.avg_bandit;
        d["std_bandit"] = stats.std_bandit;
        return d;
      },
      py::arg("instance"), py::arg("replications"), py::arg("horizon"), py::arg("seed") = 0,
      py::arg("feedback") = "both", py::arg("b_K") = 0.0, py::arg("lambda") = 0.0,
      py::arg("workers") = 0, py::arg("schedule") = "strongly_convex");

  m.def("gamma_trivial_upper", &gamma_trivial_upper);
  m.def("robust_policy_budget", &robust_policy_budget);
  m.def("lmi_margin", &lmi_margin);
  m.def("spectraplex_project", &spectraplex_project);
  m.def("relaxed_instance", &relaxed_instance);
  m.def(
      "robust_regret_bound",
      [](const std::string& kind, const RobustInstance& r, double b_K, double horizon,
         double kappa_x) {
        if (kind != "gradient" && kind != "bandit") {
          fail(ErrorCode::InvalidConfig, "kind must be gradient or bandit");
        }
        return robust_regret_bound(kind == "gradient" ? Feedback::gradient : Feedback::bandit, r,
                                   b_K, horizon, kappa_x);
      },
      py::arg("kind"), py::arg("instance"), py::arg("b_K"), py::arg("horizon"),
      py::arg("kappa_x") = 3.0);
  m.def(
      "saddle_solve",
      [](const RobustInstance& r, double tol, long max_iter) {
        const SaddleState s = saddle_solve(r, tol, max_iter);
        py::dict d;
        d["K"] = s.K;
        d["X"] = s.X;
        d["gamma"] = s.gamma;
        d["payoff"] = s.payoff;
        d["gap"] = s.gap;
        d["converged"] = s.converged;
        d["iterations"] = s.iterations;
        return d;
      },
      py::arg("instance"), py::arg("tol") = 1e-6, py::arg("max_iter") = 2000000);
}
