#include "rslab/reduction.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "rslab/parallel.hpp"

namespace rslab {

namespace {

using Cd = std::complex<double>;

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, int k) {
  const Eigen::MatrixXcd base = k >= 0 ? m : Eigen::MatrixXcd(m.inverse());
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  for (int i = 0; i < std::abs(k); ++i) r = r * base;
  return r;
}

}  // namespace

Eigen::MatrixXcd anti_hermitian(const Eigen::MatrixXcd& x) { return 0.5 * (x - x.adjoint()); }

SlicePoint build_slice_point(const PhasePoint& point, const ModelConfig& cfg) {
  const LaxMatrix lax = build_lax(point, cfg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lax.entries);
  if (es.info() != Eigen::Success) throw NumericalError("build_slice_point: eigensolver did not converge");
  const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(kEigenClamp);
  const Eigen::MatrixXcd& V = es.eigenvectors();

  SlicePoint sp;
  sp.lax = lax.entries;
  sp.g = V * lam.cwiseSqrt().cast<Cd>().asDiagonal() * V.adjoint();
  const Eigen::MatrixXcd inv_sqrt = V * lam.cwiseSqrt().cwiseInverse().cast<Cd>().asDiagonal() * V.adjoint();
  sp.v = inv_sqrt * lax.u.cast<Cd>();
  const auto n = static_cast<Eigen::Index>(point.size());
  sp.jr = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) sp.jr(i, i) = -2.0 * point.q[static_cast<std::size_t>(i)];
  const Cd ichi(0.0, cfg.chi);
  sp.xi = ichi * (Eigen::MatrixXcd::Identity(n, n) - sp.v * sp.v.adjoint());
  return sp;
}

SliceInvariants slice_invariants(const SlicePoint& sp, const ModelConfig& cfg) {
  SliceInvariants r;
  const Eigen::Index n = sp.g.rows();
  r.sqrt_error = (sp.g * sp.g - sp.lax).cwiseAbs().maxCoeff();
  r.hermitian_error = (sp.g - sp.g.adjoint()).cwiseAbs().maxCoeff();
  r.orbit_norm_error = std::abs(sp.v.squaredNorm() - static_cast<double>(n));

  // -i xi = chi (1 - v v^*) is Hermitian; expected spectrum chi(1-n) once and
  // chi with multiplicity n-1.
  const Eigen::MatrixXcd h = Cd(0.0, -1.0) * sp.xi;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  std::vector<double> got(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::vector<double> want(static_cast<std::size_t>(n), cfg.chi);
  want[0] = cfg.chi * (1.0 - static_cast<double>(n));
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < got.size(); ++i) r.xi_spectrum_error = std::max(r.xi_spectrum_error, std::abs(got[i] - want[i]));
  // The anti-Hermitian part of -i xi must vanish too.
  r.xi_spectrum_error = std::max(r.xi_spectrum_error, (h - h.adjoint()).cwiseAbs().maxCoeff());
  return r;
}

ConstraintResiduals constraint_check(const SlicePoint& sp, const ModelConfig&) {
  ConstraintResiduals r;
  r.jr_anti_hermitian = anti_hermitian(sp.jr).cwiseAbs().maxCoeff();
  // g is Hermitian positive definite; solve rather than invert.
  const Eigen::MatrixXcd gjr = sp.g * sp.jr;
  const Eigen::MatrixXcd conj = sp.g.adjoint().partialPivLu().solve(gjr.adjoint()).adjoint();
  r.moment_map = (anti_hermitian(conj) + sp.xi).cwiseAbs().maxCoeff();
  return r;
}

RestrictionResiduals invariant_restriction_check(const PhasePoint& point, const ModelConfig& cfg, int k) {
  if (std::abs(k) > cfg.n) throw IndexRangeError("invariant_restriction_check: k must lie in [-n, n]");
  const SlicePoint sp = build_slice_point(point, cfg);
  const Eigen::MatrixXcd gg = sp.g.adjoint() * sp.g;
  const Eigen::MatrixXcd ggk = matrix_power(gg, k);
  RestrictionResiduals r;
  r.restricted_invariant = ggk.trace().real();
  r.restricted_weighted = -0.5 * (ggk * sp.jr).trace().real();
  const double ik = lax_power_trace(point, cfg, k).value;
  const double i1k = weighted_trace(point, cfg, k).value;
  r.invariant_residual = std::abs(r.restricted_invariant - ik) / std::max(std::abs(ik), 1.0);
  r.weighted_residual = std::abs(r.restricted_weighted - i1k) / std::max(std::abs(i1k), 1.0);
  return r;
}

SuiteReport reduction_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples, unsigned jobs) {
  struct Item {
    double inv = 0.0, constraint = 0.0, restriction = 0.0, jr = 0.0;
  };
  const auto items = parallel_map<Item>(samples.size(), jobs, [&](std::size_t s) {
    const SlicePoint sp = build_slice_point(samples[s], cfg);
    const SliceInvariants si = slice_invariants(sp, cfg);
    const ConstraintResiduals cr = constraint_check(sp, cfg);
    Item it;
    it.inv = std::max({si.sqrt_error, si.hermitian_error, si.orbit_norm_error, si.xi_spectrum_error});
    it.constraint = cr.moment_map;
    it.jr = cr.jr_anti_hermitian;
    for (int k = -cfg.n; k <= cfg.n; ++k) {
      const RestrictionResiduals rr = invariant_restriction_check(samples[s], cfg, k);
      it.restriction = std::max({it.restriction, rr.invariant_residual, rr.weighted_residual});
    }
    return it;
  });
  SuiteReport rep;
  rep.id = "reduction_slice";
  rep.anchor = "gauge slice (L^{1/2}, -2q, xi) on the constraint surface";
  rep.samples = samples.size();
  rep.tolerance = kSliceTol;
  double inv = 0.0, con = 0.0, res = 0.0, jr = 0.0;
  for (const Item& it : items) {
    inv = std::max(inv, it.inv);
    con = std::max(con, it.constraint);
    res = std::max(res, it.restriction);
    jr = std::max(jr, it.jr);
  }
  rep.metrics["slice_invariants"] = inv;
  rep.metrics["moment_map_residual"] = con;
  rep.metrics["restriction_residual"] = res;
  rep.metrics["jr_anti_hermitian"] = jr;
  rep.max_residual = std::max({inv, con, res});
  rep.pass = rep.max_residual < rep.tolerance && jr == 0.0;
  return rep;
}

}  // namespace rslab
