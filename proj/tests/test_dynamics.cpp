#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "rslab/dynamics.hpp"
#include "rslab/poisson.hpp"
#include "rslab/sampling.hpp"

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

bool ordered(const Trajectory& t) {
  for (const PhasePoint& s : t.states)
    for (std::size_t i = 0; i + 1 < s.q.size(); ++i)
      if (!(s.q[i] > s.q[i + 1])) return false;
  return true;
}

}  // namespace

TEST_CASE("integrator reproduces exponential decay") {
  std::vector<double> y{1.0, 0.0};
  const auto stats = integrate_dp54(
      [](double, const std::vector<double>& x, std::vector<double>& dx) {
        dx[0] = -x[0];
        dx[1] = x[0];
      },
      y, 0.0, 5.0, StepControl{}, 0.0, [](double, const std::vector<double>&) {});
  CHECK(y[0] == Approx(std::exp(-5.0)).epsilon(1e-9));
  CHECK(y[1] == Approx(1.0 - std::exp(-5.0)).epsilon(1e-9));
  CHECK(stats.accepted > 0);
}

TEST_CASE("n = 1 flow of I_1 is free motion") {
  const PhasePoint start{{0.25}, {0.4}};
  FlowOptions opts;
  opts.output_interval = 0.5;
  const Trajectory t = hamiltonian_flow(Observable::I(1), start, config(1), 10.0, opts);
  CHECK(t.times.back() == Approx(10.0));
  CHECK(std::abs(t.states.back().q[0] - (0.25 + 10.0 * std::exp(0.4))) < 1e-9);
  CHECK(std::abs(t.states.back().p[0] - 0.4) < 1e-12);
  for (std::size_t i = 1; i < t.times.size(); ++i) CHECK(t.times[i] > t.times[i - 1]);
}

TEST_CASE("h is conserved along its own flow from the hand point") {
  const Trajectory t = hamiltonian_flow(Observable::H(), kHand, config(2), 50.0);
  CHECK(t.drift_of("generator") < 1e-9);
  CHECK(t.max_spectral_drift() < 1e-9);
  CHECK(ordered(t));
}

// {I^1_0, P} = h and {I^1_0, h} = P: the centre of mass moves uniformly
// under both flows.  The P flow is not a rigid translation for n >= 2.
TEST_CASE("centre of mass drifts at rate h under P and at rate P under h") {
  const ModelConfig cfg = config(3);
  const PhasePoint start = sample_points(cfg, 1, 12).points.front();
  const double h0 = principal_hamiltonian(start, cfg).value;
  const double p0 = total_momentum(start, cfg);
  auto com = [](const PhasePoint& s) { return s.q[0] + s.q[1] + s.q[2]; };
  const Trajectory tp = hamiltonian_flow(Observable::Momentum(), start, cfg, 20.0);
  for (std::size_t i = 0; i < tp.times.size(); ++i)
    CHECK(std::abs(com(tp.states[i]) - com(start) - tp.times[i] * h0) < 1e-9 * (1.0 + tp.times[i] * h0));
  const Trajectory th = hamiltonian_flow(Observable::H(), start, cfg, 20.0);
  for (std::size_t i = 0; i < th.times.size(); ++i)
    CHECK(std::abs(com(th.states[i]) - com(start) - th.times[i] * p0) < 1e-9 * (1.0 + th.times[i] * std::abs(p0)));
}

TEST_CASE("isospectrality and Weyl order along registry flows") {
  const ModelConfig cfg = config(3);
  const SampleSet s = sample_points(cfg, 3, 13);
  for (const Observable& obs : {Observable::H(), Observable::I(2), Observable::I(-1), Observable::Momentum()}) {
    for (const PhasePoint& start : s.points) {
      FlowOptions opts;
      opts.output_interval = 1.0;
      const Trajectory t = hamiltonian_flow(obs, start, cfg, 15.0, opts);
      CHECK(ordered(t));
      CHECK(t.max_spectral_drift() < cfg.tol.drift_tol);
      const Eigen::VectorXd lam0 = lax_spectrum(start, cfg);
      for (const PhasePoint& st : t.states) {
        const Eigen::VectorXd lam = lax_spectrum(st, cfg);
        CHECK(((lam - lam0).cwiseAbs().array() / lam0.array()).maxCoeff() < cfg.tol.drift_tol);
      }
    }
  }
}

TEST_CASE("extra constants are conserved along the commutant flow") {
  for (int n : {2, 3}) {
    const ModelConfig cfg = config(n);
    const SampleSet s = sample_points(cfg, 2, 400 + n);
    for (const PhasePoint& start : s.points) {
      for (int j = 1; j <= n; ++j) {
        FlowOptions opts;
        for (int k = 1; k <= n; ++k)
          if (k != j) opts.extra_conserved.push_back(Observable::C(k, j));
        const Trajectory t = hamiltonian_flow(Observable::I(j), start, cfg, 20.0, opts);
        for (const Observable& o : opts.extra_conserved) CHECK_MESSAGE(t.drift_of(o.id()) < 1e-6, o.id());
      }
      FlowOptions opts;
      for (int j = 2; j <= n; ++j) opts.extra_conserved.push_back(Observable::K(j));
      const Trajectory th = hamiltonian_flow(Observable::H(), start, cfg, 20.0, opts);
      for (const Observable& o : opts.extra_conserved) CHECK_MESSAGE(th.drift_of(o.id()) < 1e-6, o.id());
      FlowOptions optl;
      for (int j = 2; j <= n; ++j) optl.extra_conserved.push_back(Observable::L(j));
      const Trajectory tp = hamiltonian_flow(Observable::Momentum(), start, cfg, 20.0, optl);
      for (const Observable& o : optl.extra_conserved) CHECK_MESSAGE(tp.drift_of(o.id()) < 1e-6, o.id());
    }
  }
}

TEST_CASE("linearity at the hand point") {
  const LinearityResult r = linearity_check(Observable::I(1), 1, kHand, config(2), 10.0);
  CHECK(r.slope == Approx(3.0).epsilon(1e-9));
  CHECK(r.predicted_slope == Approx(3.0).epsilon(1e-12));
  CHECK(r.max_residual < 1e-6 * r.residual_scale);

  const LinearityResult c = linearity_check(Observable::I(0), 2, kHand, config(2), 10.0);
  CHECK(std::abs(c.slope) < 1e-12);
  CHECK(c.max_residual < 1e-12);
  CHECK_THROWS_AS(linearity_check(Observable::I1(1), 1, kHand, config(2), 1.0), IndexRangeError);
}

TEST_CASE("linear law for every k along spectral flows") {
  const ModelConfig cfg = config(3);
  const PhasePoint start = sample_points(cfg, 1, 21).points.front();
  Polynomial poly = Polynomial::variable(1, 3, 0.5);
  poly.add_term(0.25, {0, 1, 0});
  poly.add_term(0.1, {1, 0, 1});
  for (const Observable& gen : {Observable::H(), Observable::I(2), Observable::UserPoly(poly)}) {
    for (int k = -3; k <= 3; ++k) {
      const LinearityResult r = linearity_check(gen, k, start, cfg, 10.0);
      CHECK_MESSAGE(r.max_residual < 1e-6 * r.residual_scale, std::string(gen.id() + " k=" + std::to_string(k)));
      CHECK(r.slope_rel_error < 1e-7);
    }
  }
}

TEST_CASE("collision guard") {
  ModelConfig cfg = config(2);
  cfg.gap_floor = 1.5;
  CHECK_THROWS_AS(hamiltonian_flow(Observable::H(), PhasePoint{{1.0, -1.0}, {-1.0, 1.0}}, cfg, 5.0),
                  CollisionError);
}

TEST_CASE("scattering: free particle") {
  const ScatteringResult r = scattering_extract(PhasePoint{{0.3}, {0.7}}, config(1), 200.0);
  CHECK(r.p_plus[0] == Approx(0.7).epsilon(1e-10));
  CHECK(r.q_plus[0] == Approx(0.3).epsilon(1e-8));
  CHECK(r.spectrum_match_error < 1e-12);
}

TEST_CASE("scattering: asymptotic momenta reproduce the Lax spectrum") {
  const ScatteringResult r = scattering_extract(PhasePoint{{1.0, -1.0}, {0.4, -0.4}}, config(2), 200.0);
  CHECK(r.spectrum_match_error < 1e-5);
  CHECK(r.weyl_order_preserved);
  CHECK(r.p_plus[0] > r.p_plus[1]);
  CHECK(r.asymptotic_form == "sum exp(k p)");

  const ScatteringResult lit =
      scattering_extract(PhasePoint{{1.0, -1.0}, {0.4, -0.4}}, config(2, Convention::literal), 200.0);
  CHECK(lit.spectrum_match_error < 1e-5);
  CHECK(lit.asymptotic_form == "sum exp(2 k p)");
}

TEST_CASE("scattering: short horizons are refused") {
  CHECK_THROWS_AS(scattering_extract(kHand, config(2), 1.0), HorizonError);
  try {
    scattering_extract(kHand, config(2), 1.0);
  } catch (const HorizonError& e) {
    CHECK(e.min_gap() < e.required_gap());
  }
}

TEST_CASE("asymptotic invariants approach free-particle sums as chi^2 / gap^2") {
  const ModelConfig cfg = config(2);
  const std::vector<double> p{0.4, -0.4};
  for (int k : {1, 2, -1}) {
    double err[2];
    for (int i = 0; i < 2; ++i) {
      const double d = 20.0 * (i + 1);
      const double free = std::exp(k * p[0]) + std::exp(k * p[1]);
      err[i] = std::abs(lax_power_trace(PhasePoint{{d, -d}, p}, cfg, k).value - free);
    }
    CHECK(err[0] / err[1] == Approx(4.0).epsilon(0.01));
  }
}
