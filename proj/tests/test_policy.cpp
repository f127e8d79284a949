#include <doctest.h>

#include <array>

#include "support/sign_pattern_enum.hpp"
#include "support/test_instances.hpp"
#include "teamdec/errors.hpp"
#include "teamdec/experiment.hpp"
#include "teamdec/linalg.hpp"
#include "teamdec/policy.hpp"
#include "teamdec/rng.hpp"

using namespace teamdec;
using namespace teamdec::testing;

namespace {

// Closed-form spectral norm of a 2x2 block, used by the brute-force oracle.
double spectral_norm_2x2(const Eigen::Matrix2d& a) {
  const double f = a.squaredNorm();
  const double det = a.determinant();
  const double disc = std::max(0.0, f * f - 4.0 * det * det);
  return std::sqrt(0.5 * (f + std::sqrt(disc)));
}

}  // namespace

TEST_CASE("Policy assembly, norms and parameter round trip") {
  BlockStructure s({1, 2}, {2, 1});
  auto rng = make_stream(3);
  const Policy k = random_policy(s, rng);
  const Eigen::MatrixXd full = k.as_full_matrix();
  CHECK(full.rows() == 3);
  CHECK(full.cols() == 3);
  // off-block entries exactly zero
  CHECK(full(0, 2) == 0.0);
  CHECK(full(1, 0) == 0.0);
  CHECK(full(2, 1) == 0.0);
  CHECK(k.operator_norm() ==
        doctest::Approx(std::max(operator_norm(k.block(0)), operator_norm(k.block(1)))));
  CHECK(k.operator_norm() == doctest::Approx(operator_norm(full)));

  const Policy back = Policy::from_parameters(s, k.to_parameters());
  for (Eigen::Index i = 0; i < k.block_count(); ++i) CHECK(back.block(i) == k.block(i));

  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
  CHECK((k.apply(y) - full * y).norm() == 0.0);
}

TEST_CASE("project_policy modes") {
  BlockStructure s({2}, {2});
  Policy k = Policy::zero(s);
  k.block(0) << 3.0, 0.0, 0.0, 0.5;

  const Policy clipped = project_policy(k, 1.0, ProjectionMode::sv_clip);
  CHECK(clipped.block(0)(0, 0) == doctest::Approx(1.0));
  CHECK(clipped.block(0)(1, 1) == doctest::Approx(0.5));

  // feasible input is bit-identical in every mode
  Policy feasible = Policy::zero(s);
  feasible.block(0) << 0.4, 0.1, -0.2, 0.3;
  for (auto mode : {ProjectionMode::sv_clip, ProjectionMode::radial, ProjectionMode::paper_literal}) {
    CHECK(project_policy(feasible, 1.0, mode).block(0) == feasible.block(0));
  }

  BlockStructure ss({1}, {1});
  Policy scalar = Policy::zero(ss);
  scalar.block(0)(0, 0) = 3.0;
  CHECK(project_policy(scalar, 1.0, ProjectionMode::sv_clip).block(0)(0, 0) == doctest::Approx(1.0));
  CHECK(project_policy(scalar, 1.0, ProjectionMode::radial).block(0)(0, 0) == doctest::Approx(1.0));
  // dividing by the budget does not reach feasibility here
  CHECK(project_policy(scalar, 1.0, ProjectionMode::paper_literal).block(0)(0, 0) ==
        doctest::Approx(3.0));

  CHECK_THROWS_AS(project_policy(scalar, 0.0, ProjectionMode::sv_clip), Error);
  CHECK_THROWS_AS(project_policy(scalar, -1.0, ProjectionMode::sv_clip), Error);
}

TEST_CASE("sv_clip is idempotent, feasible and non-expansive") {
  auto rng = make_stream(5);
  BlockStructure s({2, 1}, {2, 2});
  const double b_K = 0.8;
  for (int trial = 0; trial < 1000; ++trial) {
    const Policy a = random_policy(s, rng, 2.0);
    const Policy b = random_policy(s, rng, 2.0);
    const Policy pa = project_policy(a, b_K, ProjectionMode::sv_clip);
    const Policy pb = project_policy(b, b_K, ProjectionMode::sv_clip);
    CHECK(pa.operator_norm() <= b_K + 1e-12);

    const Policy paa = project_policy(pa, b_K, ProjectionMode::sv_clip);
    for (Eigen::Index i = 0; i < pa.block_count(); ++i) {
      CHECK((paa.block(i) - pa.block(i)).cwiseAbs().maxCoeff() <= 1e-12);
    }
    const Policy raa =
        project_policy(project_policy(a, b_K, ProjectionMode::radial), b_K, ProjectionMode::radial);
    CHECK(raa.operator_norm() <= b_K + 1e-12);

    // non-expansiveness in Frobenius norm
    double dist_before = 0.0, dist_after = 0.0;
    for (Eigen::Index i = 0; i < a.block_count(); ++i) {
      dist_before += (a.block(i) - b.block(i)).squaredNorm();
      dist_after += (pa.block(i) - pb.block(i)).squaredNorm();
    }
    CHECK(dist_after <= dist_before + 1e-12);
  }
}

TEST_CASE("sv_clip matches a brute-force nearest feasible 2x2 block") {
  auto rng = make_stream(9);
  BlockStructure s({2}, {2});
  const double b_K = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Policy k = random_policy(s, rng, 1.2);
    const Policy projected = project_policy(k, b_K, ProjectionMode::sv_clip);
    const double obtained = std::sqrt((projected.block(0) - k.block(0)).squaredNorm());
    CHECK(spectral_norm_2x2(projected.block(0)) <= b_K + 1e-12);

    // Local grid search around the candidate; by convexity a local grid
    // minimum is within grid resolution of the global projection.
    const double grid = 1e-3;
    double best = obtained;
    Eigen::Matrix2d probe;
    for (int a = -10; a <= 10; ++a) {
      for (int b = -10; b <= 10; ++b) {
        for (int c = -10; c <= 10; ++c) {
          for (int d = -10; d <= 10; ++d) {
            probe = projected.block(0);
            probe(0, 0) += a * grid;
            probe(0, 1) += b * grid;
            probe(1, 0) += c * grid;
            probe(1, 1) += d * grid;
            if (spectral_norm_2x2(probe) > b_K) continue;
            best = std::min(best, std::sqrt((probe - k.block(0)).squaredNorm()));
          }
        }
      }
    }
    CHECK(obtained <= best + 1e-3);
  }
}

TEST_CASE("rademacher_draw produces exact signs with the right scales") {
  BlockStructure s({2}, {3});
  auto rng = make_stream(13);
  const PerturbationDraw d = rademacher_draw(s, 0.5, rng);
  CHECK(d.scale(s, 0) == doctest::Approx(0.5 / std::sqrt(6.0)));
  for (Eigen::Index a = 0; a < 2; ++a) {
    for (Eigen::Index b = 0; b < 3; ++b) {
      CHECK(std::abs(d.R_blocks[0](a, b)) == 1.0);
    }
  }
  // ||R_i||_F = sqrt(m_i p_i) exactly
  CHECK(d.R_blocks[0].norm() == std::sqrt(6.0));

  BlockStructure ss({1}, {1});
  long plus = 0;
  const long n = 100000;
  for (long i = 0; i < n; ++i) {
    if (rademacher_draw(ss, 1.0, rng).R_blocks[0](0, 0) > 0) ++plus;
  }
  CHECK(std::abs(static_cast<double>(plus) / n - 0.5) < 0.01);

  CHECK_THROWS_AS(rademacher_draw(s, 0.0, rng), Error);
}

TEST_CASE("perturb adds scaled sign blocks") {
  BlockStructure s({1}, {1});
  Policy k = Policy::zero(s);
  k.block(0)(0, 0) = 0.5;
  PerturbationDraw d;
  d.epsilon = 0.25;
  d.R_blocks.push_back(-Eigen::MatrixXd::Ones(1, 1));
  CHECK(perturb(k, d).block(0)(0, 0) == doctest::Approx(0.25));

  d.epsilon = 1e-300;
  CHECK(perturb(k, d).block(0)(0, 0) == doctest::Approx(0.5));

  ProblemInstance ex = example41_instance();
  auto rng = make_stream(17);
  const PerturbationDraw draw = rademacher_draw(ex.structure, 1.0, rng);
  const Policy played = perturb(Policy::zero(ex.structure), draw);
  CHECK(std::abs(played.block(0)(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(played.block(1)(0, 0)) == doctest::Approx(1.0));
  CHECK(operator_norm(played.as_full_matrix()) == doctest::Approx(1.0));
  CHECK(played.operator_norm() <= Policy::zero(ex.structure).operator_norm() + draw.epsilon + 1e-12);
}

TEST_CASE("bandit_gradient_estimate formula") {
  BlockStructure s({1}, {1});
  PerturbationDraw d;
  d.epsilon = 1.0;
  d.R_blocks.push_back(-Eigen::MatrixXd::Ones(1, 1));
  CHECK(bandit_gradient_estimate(2.0, s, d).block(0)(0, 0) == doctest::Approx(-2.0));
  CHECK(bandit_gradient_estimate(0.0, s, d).block(0)(0, 0) == doctest::Approx(0.0));

  BlockStructure wide({2}, {3});
  auto rng = make_stream(19);
  const PerturbationDraw dw = rademacher_draw(wide, 0.5, rng);
  const Policy g = bandit_gradient_estimate(1.5, wide, dw);
  CHECK(g.block(0)(1, 2) == doctest::Approx(1.5 * dw.R_blocks[0](1, 2) * std::sqrt(6.0) / 0.5));

  PerturbationDraw bad = dw;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(bandit_gradient_estimate(1.0, wide, bad), Error);
}

TEST_CASE("sign moments: exact identities under exhaustive enumeration") {
  auto rng = make_stream(21);
  const std::vector<BlockStructure> shapes = {
      BlockStructure({1}, {1}), BlockStructure({2}, {2}), BlockStructure({1, 2}, {2, 1}),
      BlockStructure({2, 2}, {2, 2}), BlockStructure({2, 1}, {3, 2})};
  for (const auto& s : shapes) {
    const Eigen::Index d = s.parameter_count();
    REQUIRE(d <= 16);
    const double total = std::pow(2.0, static_cast<double>(d));

    // first and second moments, plus a full set of third moments
    std::vector<double> first(d, 0.0);
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(d, d);
    std::vector<double> third;
    std::vector<std::array<Eigen::Index, 3>> triples;
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        for (Eigen::Index c = 0; c < d; ++c) triples.push_back({a, b, c});
      }
    }
    third.assign(triples.size(), 0.0);

    const Eigen::MatrixXd a_full = random_matrix(s.total_outputs(), s.total_measurements(), rng);
    std::vector<Eigen::MatrixXd> prop4(s.player_count());
    for (Eigen::Index i = 0; i < s.player_count(); ++i) {
      prop4[i] = Eigen::MatrixXd::Zero(s.output_dim(i), s.measurement_dim(i));
    }

    for_each_sign_pattern(s, [&](const PerturbationDraw& draw) {
      Policy r(s, draw.R_blocks);
      const Eigen::VectorXd v = r.to_parameters();
      for (Eigen::Index i = 0; i < d; ++i) first[i] += v(i);
      second += v * v.transpose();
      for (std::size_t t = 0; t < triples.size(); ++t) {
        third[t] += v(triples[t][0]) * v(triples[t][1]) * v(triples[t][2]);
      }
      const double trace = (a_full.transpose() * r.as_full_matrix()).trace();
      for (Eigen::Index i = 0; i < s.player_count(); ++i) prop4[i] += trace * draw.R_blocks[i];
      // property 5 holds exactly for every draw
      for (Eigen::Index i = 0; i < s.player_count(); ++i) {
        CHECK(draw.R_blocks[i].norm() ==
              std::sqrt(static_cast<double>(s.output_dim(i) * s.measurement_dim(i))));
      }
    });

    for (Eigen::Index i = 0; i < d; ++i) CHECK(first[i] == 0.0);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        CHECK(second(i, j) / total == (i == j ? 1.0 : 0.0));
      }
    }
    for (std::size_t t = 0; t < triples.size(); ++t) CHECK(third[t] == 0.0);
    for (Eigen::Index i = 0; i < s.player_count(); ++i) {
      const Eigen::MatrixXd diag_block =
          a_full.block(s.output_offset(i), s.measurement_offset(i), s.output_dim(i),
                       s.measurement_dim(i));
      CHECK((prop4[i] / total - diag_block).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}
