#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "rslab/dynamics.hpp"
#include "rslab/poisson.hpp"
#include "rslab/sampling.hpp"
#include "rslab/superint.hpp"

using namespace rslab;
using doctest::Approx;

namespace {

ModelConfig config(int n, Convention c = Convention::half) {
  ModelConfig cfg;
  cfg.n = n;
  cfg.convention = c;
  return cfg;
}

const PhasePoint kHand{{1.0, -1.0}, {0.0, 0.0}};

// U = (I_3, -I_2, 0): sum_k I_{1+k} U^k = I_2 I_3 - I_3 I_2 = 0, so F commutes with I_1.
ConstantFamily user_family() {
  return ConstantFamily::User({Polynomial::variable(3, 3), Polynomial::variable(2, 3, -1.0), Polynomial::constant(0.0, 3)},
                              Observable::I(1));
}

}  // namespace

TEST_CASE("constants vanish at the symmetric hand point") {
  CHECK(std::abs(eval_constant(ConstantFamily::C(2, 1), kHand, config(2))) < 1e-14);
  CHECK(std::abs(eval_constant(ConstantFamily::K(2), kHand, config(2))) < 1e-14);
  const ConstantFamily zero = ConstantFamily::User({Polynomial::constant(0.0, 2), Polynomial::constant(0.0, 2)},
                                                   Observable::H());
  CHECK(eval_constant(zero, kHand, config(2)) == 0.0);
}

TEST_CASE("family index ranges") {
  CHECK_THROWS_AS(ConstantFamily::C(1, 1).validate(3), IndexRangeError);
  CHECK_THROWS_AS(ConstantFamily::C(4, 1).validate(3), IndexRangeError);
  CHECK_THROWS_AS(ConstantFamily::K(1).validate(3), IndexRangeError);
  CHECK_THROWS_AS(ConstantFamily::L(4).validate(3), IndexRangeError);
  CHECK_THROWS_AS(ConstantFamily::User({Polynomial::constant(1.0, 2)}, Observable::I1(1)).validate(2), IndexRangeError);
  CHECK_NOTHROW(ConstantFamily::K(3).validate(3));
}

TEST_CASE("constants agree with polynomials of independently computed traces") {
  const ModelConfig cfg = config(3);
  const SampleSet s = sample_points(cfg, 10, 71);
  for (const PhasePoint& pt : s.points) {
    auto I = [&](int k) { return oracle::trace_power(pt.q, pt.p, cfg.chi, 0.5, k); };
    auto I1 = [&](int k) { return oracle::weighted_power(pt.q, pt.p, cfg.chi, 0.5, k); };
    for (int j = 1; j <= 3; ++j)
      for (int k = 1; k <= 3; ++k) {
        if (k == j) continue;
        const double want = I1(k) * I(2 * j) - I1(j) * I(k + j);
        CHECK(eval_constant(ConstantFamily::C(k, j), pt, cfg) == Approx(want).epsilon(1e-10).scale(1.0));
      }
    for (int j = 2; j <= 3; ++j) {
      const double kj = I1(j) * (I(2) - 3) - I1(1) * (I(j + 1) - I(j - 1));
      const double lj = I1(j) * (I(2) + 3) - I1(1) * (I(j + 1) + I(j - 1));
      CHECK(eval_constant(ConstantFamily::K(j), pt, cfg) == Approx(kj).epsilon(1e-10).scale(1.0));
      CHECK(eval_constant(ConstantFamily::L(j), pt, cfg) == Approx(lj).epsilon(1e-10).scale(1.0));
    }
    CHECK(eval_constant(user_family(), pt, cfg) == Approx(I1(1) * I(3) - I1(2) * I(2)).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("commutation checks") {
  {
    const ModelConfig cfg = config(3);
    const SampleSet s = sample_points(cfg, 50, 72);
    const SuiteReport r = commutation_check(ConstantFamily::C(2, 1), cfg, s.points);
    CHECK(r.pass);
    CHECK(r.max_residual < 1e-8);
    CHECK(r.samples == 50);
  }
  {
    const ModelConfig cfg = config(2);
    const SampleSet s = sample_points(cfg, 50, 73);
    CHECK(commutation_check(ConstantFamily::K(2), cfg, s.points).max_residual < 1e-8);
    CHECK(commutation_check(ConstantFamily::L(2), cfg, s.points).max_residual < 1e-8);
  }
  for (int n = 2; n <= 5; ++n) {
    const ModelConfig cfg = config(n);
    const SampleSet s = sample_points(cfg, 20, 74 + n);
    for (int j = 2; j <= n; ++j) {
      CHECK(commutation_check(ConstantFamily::K(j), cfg, s.points).pass);
      CHECK(commutation_check(ConstantFamily::L(j), cfg, s.points).pass);
      CHECK(commutation_check(ConstantFamily::C(1, j), cfg, s.points).pass);
    }
  }
  const SampleSet s = sample_points(config(3), 5, 79);
  for (const PhasePoint& pt : s.points) {
    const Observable f = ConstantFamily::C(3, 2).observable();
    CHECK(poisson_bracket(f, f, pt, config(3)) == 0.0);
  }
}

TEST_CASE("user family: orthogonality identity and commutation") {
  const ModelConfig cfg = config(3);
  const SampleSet s = sample_points(cfg, 20, 81);
  for (const PhasePoint& pt : s.points) CHECK(user_orthogonality_residual(user_family(), pt, cfg) < 1e-12);
  CHECK(commutation_check(user_family(), cfg, s.points).pass);

  // U = (1, 0, 0) gives F = I_1^1, which does not commute with I_1.
  const ConstantFamily bad = ConstantFamily::User(
      {Polynomial::constant(1.0, 3), Polynomial::constant(0.0, 3), Polynomial::constant(0.0, 3)}, Observable::I(1));
  CHECK(user_orthogonality_residual(bad, s.points[0], cfg) > 0.1);
  CHECK(!commutation_check(bad, cfg, s.points).pass);
}

TEST_CASE("user family is conserved along the commutant flow") {
  const ModelConfig cfg = config(3);
  const PhasePoint start = sample_points(cfg, 1, 82).points.front();
  FlowOptions opts;
  opts.extra_conserved.push_back(user_family().observable());
  const Trajectory t = hamiltonian_flow(Observable::I(1), start, cfg, 20.0, opts);
  CHECK(t.drift_of(user_family().id()) < 1e-6);
}

TEST_CASE("phase-space Jacobian: n = 1 closed form") {
  for (double p : {-0.7, 0.0, 1.2}) {
    const PhaseJacobian J = jacobian_J(PhasePoint{{0.4}, {p}}, config(1));
    CHECK(std::abs(J.det) == Approx(std::exp(2.0 * p)).epsilon(1e-13));
  }
}

TEST_CASE("phase-space Jacobian approaches the decoupled Vandermonde form") {
  for (Convention c : {Convention::half, Convention::literal}) {
    const double s = c == Convention::half ? 0.5 : 1.0;
    const PhasePoint far{{150.0, 0.0, -150.0}, {0.5, -0.2, -0.9}};
    const PhaseJacobian J = jacobian_J(far, config(3, c));
    const double want = oracle::decoupled_jacobian(far.p, s);
    CHECK(std::abs(std::abs(J.det) - want) < 0.01 * want);
  }
  const PhasePoint two{{100.0, -100.0}, {0.3, -0.6}};
  CHECK(std::abs(jacobian_J(two, config(2)).det) == Approx(oracle::decoupled_jacobian(two.p, 0.5)).epsilon(0.01));
}

TEST_CASE("phase-space Jacobian matches finite differences") {
  const ModelConfig cfg = config(2);
  const PhasePoint pt = sample_points(cfg, 1, 83).points.front();
  const PhaseJacobian J = jacobian_J(pt, cfg);
  for (int r = 0; r < 4; ++r) {
    const bool weighted = r >= 2;
    const int k = r % 2 + 1;
    const oracle::Field f = [&](const std::vector<double>& q, const std::vector<double>& p) {
      return weighted ? oracle::weighted_power(q, p, 1.0, 0.5, k) : oracle::trace_power(q, p, 1.0, 0.5, k);
    };
    const auto [dq, dp] = oracle::fd_gradient(f, pt.q, pt.p);
    for (int i = 0; i < 2; ++i) {
      CHECK(J.matrix(r, i) == Approx(dp[i]).epsilon(1e-6).scale(1.0));
      CHECK(J.matrix(r, 2 + i) == Approx(dq[i]).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("phase-space Jacobian is generic at random points") {
  for (int n = 2; n <= 4; ++n) {
    const ModelConfig cfg = config(n);
    const SampleSet s = sample_points(cfg, 100, 84 + n);
    const SuiteReport r = jacobian_suite(cfg, s.points, 4);
    CHECK(r.pass);
    CHECK(r.metrics.at("generic_fraction") >= 0.99);
  }
}

TEST_CASE("invariant-coordinate determinants at the hand point") {
  const InvariantJacobian c = invariant_coords_jacobian(InvariantMode::wojciechowski, 1, kHand, config(2));
  CHECK(c.det == Approx(3.0).epsilon(1e-12));
  CHECK(std::abs(c.det - 3.0) < 1e-10);
  REQUIRE(c.matrix.rows() == 3);
  CHECK(c.matrix(0, 0) == 1.0);
  CHECK(c.matrix(1, 1) == 1.0);
  CHECK(c.matrix(0, 1) == 0.0);
  CHECK(c.matrix(0, 2) == 0.0);
  CHECK(c.matrix(1, 2) == 0.0);
  CHECK(c.matrix(2, 2) == Approx(3.0).epsilon(1e-12));

  const InvariantJacobian k = invariant_coords_jacobian(InvariantMode::extra_k, 0, kHand, config(2));
  CHECK(std::abs(k.det - 1.0) < 1e-10);
  CHECK_THROWS_AS(invariant_coords_jacobian(InvariantMode::extra_k, 0, PhasePoint{{0.0}, {0.0}}, config(1)),
                  IndexRangeError);
  CHECK_THROWS_AS(invariant_coords_jacobian(InvariantMode::wojciechowski, 3, kHand, config(2)), IndexRangeError);
}

TEST_CASE("invariant-coordinate determinant identities hold at roundoff level") {
  for (int n = 2; n <= 5; ++n) {
    const ModelConfig cfg = config(n);
    const SampleSet s = sample_points(cfg, 20, 90 + n);
    for (int j = 1; j <= n; ++j)
      CHECK(jacobian_in_invariant_coords(InvariantMode::wojciechowski, j, cfg, s.points).max_residual < 1e-10);
    CHECK(jacobian_in_invariant_coords(InvariantMode::extra_k, 0, cfg, s.points).max_residual < 1e-10);
  }
}

TEST_CASE("independence ranks") {
  const ModelConfig cfg = config(3);
  const PhasePoint pt = sample_points(cfg, 1, 95).points.front();
  std::vector<Observable> full;
  for (int k = 1; k <= 3; ++k) full.push_back(Observable::I(k));
  std::vector<Observable> liouville = full;
  for (int k = 1; k <= 3; ++k) full.push_back(Observable::I1(k));
  CHECK(independence_rank(full, pt, cfg).rank == 6);
  CHECK(independence_rank(liouville, pt, cfg).rank == 3);
  const std::vector<Observable> dup{Observable::I(1), Observable::I(1)};
  CHECK(independence_rank(dup, pt, cfg).rank == 1);

  std::vector<Observable> wc = liouville;
  wc.push_back(Observable::C(2, 1));
  wc.push_back(Observable::C(3, 1));
  CHECK(independence_rank(wc, pt, cfg).rank == 5);

  const ModelConfig two = config(2);
  const SampleSet s = sample_points(two, 10, 96);
  const std::vector<Observable> k2{Observable::I(1), Observable::I(2), Observable::K(2)};
  for (const PhasePoint& x : s.points) CHECK(independence_rank(k2, x, two).rank == 3);
}
