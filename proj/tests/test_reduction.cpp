#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "oracle.hpp"
#include "rslab/reduction.hpp"
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

}  // namespace

TEST_CASE("single particle slice is trivial") {
  const PhasePoint pt{{0.0}, {0.0}};
  const SlicePoint sp = build_slice_point(pt, config(1));
  CHECK(std::abs(sp.g(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(sp.v(0) - 1.0) < 1e-15);
  CHECK(std::abs(sp.xi(0, 0)) < 1e-15);
  const ConstraintResiduals c = constraint_check(sp, config(1));
  CHECK(c.jr_anti_hermitian == 0.0);
  CHECK(c.moment_map < 1e-15);
}

TEST_CASE("two particle hand point") {
  const ModelConfig cfg = config(2);
  const PhasePoint pt{{1.0, -1.0}, {0.0, 0.0}};
  const SlicePoint sp = build_slice_point(pt, cfg);
  CHECK(sp.v.squaredNorm() == Approx(2.0).epsilon(1e-10));
  CHECK((sp.g * sp.g - sp.lax).cwiseAbs().maxCoeff() < 1e-12);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sp.xi);
  std::vector<double> im;
  for (int i = 0; i < 2; ++i) {
    CHECK(std::abs(es.eigenvalues()(i).real()) < 1e-12);
    im.push_back(es.eigenvalues()(i).imag());
  }
  std::sort(im.begin(), im.end());
  CHECK(im[0] == Approx(-1.0).epsilon(1e-12));
  CHECK(im[1] == Approx(1.0).epsilon(1e-12));

  const SliceInvariants inv = slice_invariants(sp, cfg);
  CHECK(inv.sqrt_error < 1e-12);
  CHECK(inv.hermitian_error < 1e-12);
  CHECK(inv.orbit_norm_error < 1e-10);
  CHECK(inv.xi_spectrum_error < 1e-12);
  CHECK(constraint_check(sp, cfg).moment_map < 1e-10);

  const RestrictionResiduals r1 = invariant_restriction_check(pt, cfg, 1);
  CHECK(r1.restricted_invariant == Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(std::abs(r1.restricted_weighted) < 1e-12);
  const RestrictionResiduals r0 = invariant_restriction_check(pt, cfg, 0);
  CHECK(r0.restricted_invariant == Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(r0.restricted_weighted) < 1e-12);
}

TEST_CASE("restriction at k = 0 gives n and the centre of mass") {
  const ModelConfig cfg = config(3);
  const PhasePoint pt{{2.0, 0.5, -1.0}, {0.3, -0.2, 0.1}};
  const RestrictionResiduals r = invariant_restriction_check(pt, cfg, 0);
  CHECK(r.restricted_invariant == Approx(3.0).epsilon(1e-12));
  CHECK(r.restricted_weighted == Approx(1.5).epsilon(1e-12));
}

TEST_CASE("restriction matches independently computed traces") {
  const ModelConfig cfg = config(3);
  const SampleSet s = sample_points(cfg, 10, 31);
  for (const PhasePoint& pt : s.points)
    for (int k = -3; k <= 3; ++k) {
      const RestrictionResiduals r = invariant_restriction_check(pt, cfg, k);
      CHECK(r.restricted_invariant ==
            Approx(oracle::trace_power(pt.q, pt.p, 1.0, 0.5, k)).epsilon(1e-10).scale(1.0));
      CHECK(r.restricted_weighted ==
            Approx(oracle::weighted_power(pt.q, pt.p, 1.0, 0.5, k)).epsilon(1e-10).scale(1.0));
    }
  CHECK(invariant_restriction_check(s.points[0], cfg, -2).invariant_residual < 1e-9);
}

TEST_CASE("slice constraints and restrictions hold at random points") {
  for (Convention c : {Convention::half, Convention::literal})
    for (int n = 2; n <= 4; ++n) {
      const ModelConfig cfg = config(n, c);
      const SampleSet s = sample_points(cfg, 50, 32 + n);
      const SuiteReport r = reduction_suite(cfg, s.points, 4);
      CHECK(r.pass);
      CHECK(r.max_residual < kSliceTol);
      for (const PhasePoint& pt : s.points) {
        const SlicePoint sp = build_slice_point(pt, cfg);
        CHECK(constraint_check(sp, cfg).moment_map < 1e-9);
        CHECK(slice_invariants(sp, cfg).orbit_norm_error < 1e-9);
      }
    }
}

TEST_CASE("restriction index range") {
  const PhasePoint pt{{1.0, -1.0}, {0.0, 0.0}};
  CHECK_THROWS_AS(invariant_restriction_check(pt, config(2), 3), IndexRangeError);
  CHECK_THROWS_AS(invariant_restriction_check(pt, config(2), -3), IndexRangeError);
}

TEST_CASE("anti-Hermitian part") {
  Eigen::MatrixXcd x(2, 2);
  x << std::complex<double>(1, 2), std::complex<double>(3, 0), std::complex<double>(0, 1), 4.0;
  const Eigen::MatrixXcd a = anti_hermitian(x);
  CHECK((a + a.adjoint()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(a(0, 0) - std::complex<double>(0, 2)) < 1e-15);
  CHECK(std::abs(a(1, 1)) < 1e-15);
}
