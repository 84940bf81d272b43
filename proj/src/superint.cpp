#include "rslab/superint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rslab/parallel.hpp"
#include "rslab/poisson.hpp"
#include "rslab/spectral.hpp"

namespace rslab {

ConstantFamily ConstantFamily::C(int k, int j) {
  ConstantFamily f;
  f.kind_ = FamilyKind::wojciechowski;
  f.k_ = k;
  f.j_ = j;
  f.commutant_ = Observable::I(j);
  return f;
}

ConstantFamily ConstantFamily::K(int j) {
  ConstantFamily f;
  f.kind_ = FamilyKind::extra_k;
  f.j_ = j;
  f.commutant_ = Observable::H();
  return f;
}

ConstantFamily ConstantFamily::L(int j) {
  ConstantFamily f;
  f.kind_ = FamilyKind::extra_l;
  f.j_ = j;
  f.commutant_ = Observable::Momentum();
  return f;
}

ConstantFamily ConstantFamily::User(std::vector<Polynomial> u_maps, Observable commutant) {
  ConstantFamily f;
  f.kind_ = FamilyKind::user;
  f.u_maps_ = std::move(u_maps);
  f.commutant_ = std::move(commutant);
  return f;
}

Observable ConstantFamily::observable() const {
  switch (kind_) {
    case FamilyKind::wojciechowski:
      return Observable::C(k_, j_);
    case FamilyKind::extra_k:
      return Observable::K(j_);
    case FamilyKind::extra_l:
      return Observable::L(j_);
    case FamilyKind::user:
      return Observable::UserF(u_maps_);
  }
  throw Error("ConstantFamily: unknown kind");
}

void ConstantFamily::validate(int n) const {
  observable().check_ranges(n);
  commutant_.check_ranges(n);
  if (kind_ == FamilyKind::user && !commutant_.is_spectral(n))
    throw IndexRangeError("User family commutant must be a function of I_1..I_n");
}

double eval_constant(const ConstantFamily& fam, const PhasePoint& point, const ModelConfig& cfg) {
  fam.validate(cfg.n);
  return evaluate(fam.observable(), point, cfg);
}

double user_orthogonality_residual(const ConstantFamily& fam, const PhasePoint& point,
                                   const ModelConfig& cfg) {
  fam.validate(cfg.n);
  if (fam.kind() != FamilyKind::user) return 0.0;
  const int n = cfg.n;
  LaxInvariants<double> inv(as_generic(point), cfg);
  std::vector<double> first(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) first[static_cast<std::size_t>(i - 1)] = inv.I(i);

  // dI/dI_j by dual seeds on the spectral coordinates.
  std::vector<double> dI(static_cast<std::size_t>(n));
  std::vector<Dual> x(first.begin(), first.end());
  for (int j = 0; j < n; ++j) {
    x[static_cast<std::size_t>(j)].der = 1.0;
    dI[static_cast<std::size_t>(j)] = fam.commutant().evaluate_spectral<Dual>(x).der;
    x[static_cast<std::size_t>(j)].der = 0.0;
  }
  double sum = 0.0, scale = 1.0;
  for (int k = 1; k <= n; ++k) {
    double w = 0.0;
    for (int j = 1; j <= n; ++j) w += j * inv.I(j + k) * dI[static_cast<std::size_t>(j - 1)];
    const double term = w * fam.u_maps()[static_cast<std::size_t>(k - 1)](std::span<const double>(first));
    sum += term;
    scale += std::abs(term);
  }
  return std::abs(sum) / scale;
}

SuiteReport commutation_check(const ConstantFamily& fam, const ModelConfig& cfg,
                              std::span<const PhasePoint> samples, unsigned jobs) {
  cfg.validate();
  fam.validate(cfg.n);
  const Observable pair[2] = {fam.observable(), fam.commutant()};
  const auto residuals = parallel_map<double>(samples.size(), jobs, [&](std::size_t s) {
    const std::vector<Gradient> g = gradients(pair, samples[s], cfg);
    double r = std::abs(bracket_from_gradients(g[0], g[1])) / (1.0 + bracket_scale(g[0], g[1]));
    if (fam.kind() == FamilyKind::user) r = std::max(r, user_orthogonality_residual(fam, samples[s], cfg));
    return r;
  });
  SuiteReport rep;
  rep.id = "commutation:" + fam.id() + "~" + fam.commutant().id();
  rep.anchor = "{F, I} = 0 for the extra constants";
  rep.samples = samples.size();
  rep.tolerance = cfg.tol.rel_tol;
  for (double r : residuals) rep.max_residual = std::max(rep.max_residual, r);
  rep.pass = rep.max_residual < rep.tolerance;
  return rep;
}

PhaseJacobian jacobian_J(const PhasePoint& point, const ModelConfig& cfg) {
  const int n = cfg.n;
  std::vector<Observable> rows;
  for (int k = 1; k <= n; ++k) rows.push_back(Observable::I(k));
  for (int k = 1; k <= n; ++k) rows.push_back(Observable::I1(k));
  const std::vector<Gradient> g = gradients(rows, point, cfg);

  PhaseJacobian out;
  out.matrix.resize(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int c = 0; c < n; ++c) {
      out.matrix(r, c) = g[static_cast<std::size_t>(r)].dp[static_cast<std::size_t>(c)];
      out.matrix(r, n + c) = g[static_cast<std::size_t>(r)].dq[static_cast<std::size_t>(c)];
    }
  out.det = out.matrix.partialPivLu().determinant();
  out.hadamard = 1.0;
  for (int r = 0; r < 2 * n; ++r) out.hadamard *= out.matrix.row(r).norm();

  const double e = 2.0 * cfg.momentum_exponent();
  double log_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pi = point.p[static_cast<std::size_t>(i)];
    log_scale += std::log(static_cast<double>(i + 1) * e) + 2.0 * e * pi;
    for (int j = i + 1; j < n; ++j) log_scale += 2.0 * e * std::max(pi, point.p[static_cast<std::size_t>(j)]);
  }
  out.scale = std::exp(log_scale);
  return out;
}

namespace {

// Max-norm row/column balancing by exact powers of two before LU, so that the
// large derivative rows do not swamp the pivots.
double balanced_determinant(Eigen::MatrixXd m) {
  int shift = 0;
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const double mx = m.row(r).cwiseAbs().maxCoeff();
      if (mx == 0.0) return 0.0;
      const int e = std::ilogb(mx);
      m.row(r) *= std::ldexp(1.0, -e);
      shift += e;
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double mx = m.col(c).cwiseAbs().maxCoeff();
      if (mx == 0.0) return 0.0;
      const int e = std::ilogb(mx);
      m.col(c) *= std::ldexp(1.0, -e);
      shift += e;
    }
  }
  return std::ldexp(m.partialPivLu().determinant(), shift);
}

}  // namespace

InvariantJacobian invariant_coords_jacobian(InvariantMode mode, int j, const PhasePoint& point,
                                            const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  const int n = cfg.n;
  if (mode == InvariantMode::wojciechowski && (j < 1 || j > n))
    throw IndexRangeError("invariant_coords_jacobian: j must lie in 1..n");
  if (mode == InvariantMode::extra_k && n < 2)
    throw IndexRangeError("invariant_coords_jacobian: K mode needs n >= 2");

  LaxInvariants<double> inv(as_generic(point), cfg);
  std::vector<double> I(static_cast<std::size_t>(n)), I1(static_cast<std::size_t>(n));
  for (int a = 1; a <= n; ++a) {
    I[static_cast<std::size_t>(a - 1)] = inv.I(a);
    I1[static_cast<std::size_t>(a - 1)] = inv.I1(a);
  }

  std::vector<int> betas;
  for (int b = 1; b <= n; ++b) {
    if (mode == InvariantMode::wojciechowski && b == j) continue;
    if (mode == InvariantMode::extra_k && b == 1) continue;
    betas.push_back(b);
  }
  const int dim = n + static_cast<int>(betas.size());
  const int top = mode == InvariantMode::wojciechowski ? 2 * n : n + 1;

  InvariantJacobian out;
  out.matrix.resize(dim, dim);
  for (int col = 0; col < dim; ++col) {
    std::vector<Dual> x(I.begin(), I.end());
    std::vector<Dual> y(I1.begin(), I1.end());
    if (col < n)
      x[static_cast<std::size_t>(col)].der = 1.0;
    else
      y[static_cast<std::size_t>(betas[static_cast<std::size_t>(col - n)] - 1)].der = 1.0;

    const PowerSums<Dual> P(std::span<const Dual>(x), 0, top);
    auto Y = [&](int b) { return y[static_cast<std::size_t>(b - 1)]; };
    for (int a = 1; a <= n; ++a) out.matrix(a - 1, col) = P[a].der;
    for (std::size_t r = 0; r < betas.size(); ++r) {
      const int b = betas[r];
      Dual g;
      if (mode == InvariantMode::wojciechowski)
        g = Y(b) * P[2 * j] - Y(j) * P[b + j];
      else
        g = Y(b) * (P[2] - static_cast<double>(n)) - Y(1) * (P[b + 1] - P[b - 1]);
      out.matrix(n + static_cast<int>(r), col) = g.der;
    }
  }
  out.det = balanced_determinant(out.matrix);
  const double base = mode == InvariantMode::wojciechowski ? inv.I(2 * j) : inv.I(2) - n;
  out.closed_form = std::pow(base, n - 1);
  out.rel_error = std::abs(out.det - out.closed_form) / std::abs(out.closed_form);
  return out;
}

SuiteReport jacobian_in_invariant_coords(InvariantMode mode, int j, const ModelConfig& cfg,
                                         std::span<const PhasePoint> samples, unsigned jobs) {
  SuiteReport rep;
  rep.samples = samples.size();
  rep.tolerance = kDeterminantIdentityTol;
  if (mode == InvariantMode::wojciechowski) {
    rep.id = "invariant_jacobian_C:j=" + std::to_string(j);
    rep.anchor = "det d(I_a, C_{b,j})/d(I_alpha, I^1_beta) = (I_{2j})^{n-1}";
  } else {
    rep.id = "invariant_jacobian_K";
    rep.anchor = "det d(I_a, K_b)/d(I_alpha, I^1_beta) = (I_2 - n)^{n-1}";
  }
  const auto errs = parallel_map<double>(samples.size(), jobs, [&](std::size_t s) {
    return invariant_coords_jacobian(mode, j, samples[s], cfg).rel_error;
  });
  for (double e : errs) rep.max_residual = std::max(rep.max_residual, e);
  rep.pass = rep.max_residual < rep.tolerance;
  return rep;
}

RankResult independence_rank(std::span<const Observable> observables, const PhasePoint& point,
                             const ModelConfig& cfg) {
  const std::vector<Gradient> g = gradients(observables, point, cfg);
  const int n = cfg.n;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(g.size()), 2 * n);
  for (std::size_t r = 0; r < g.size(); ++r) {
    for (int c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), c) = g[r].dq[static_cast<std::size_t>(c)];
      m(static_cast<Eigen::Index>(r), n + c) = g[r].dp[static_cast<std::size_t>(c)];
    }
    const double norm = m.row(static_cast<Eigen::Index>(r)).norm();
    if (norm > 0.0) m.row(static_cast<Eigen::Index>(r)) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  RankResult out;
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values.size() ? out.singular_values(0) : 0.0;
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values(i) > kRankThreshold * smax) ++out.rank;
  const double smin = out.singular_values.size() ? out.singular_values.tail(1)(0) : 0.0;
  out.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  return out;
}

SuiteReport jacobian_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                           unsigned jobs) {
  const int n = cfg.n;
  std::vector<Observable> coords;
  for (int k = 1; k <= n; ++k) coords.push_back(Observable::I(k));
  for (int k = 1; k <= n; ++k) coords.push_back(Observable::I1(k));

  struct Item {
    bool generic = false;
    double ratio = 0.0;
  };
  const auto items = parallel_map<Item>(samples.size(), jobs, [&](std::size_t s) {
    const PhaseJacobian J = jacobian_J(samples[s], cfg);
    const RankResult rk = independence_rank(coords, samples[s], cfg);
    Item it;
    it.ratio = J.scale > 0.0 ? std::abs(J.det) / J.scale : 0.0;
    it.generic = rk.rank == 2 * n && it.ratio > kJacobianDetFloor;
    return it;
  });
  SuiteReport rep;
  rep.id = "jacobian_J";
  rep.anchor = "det d(I_1..I_n, I^1_1..I^1_n)/d(p, q) non-vanishing generically";
  rep.samples = samples.size();
  std::size_t generic = 0;
  double worst = 1.0;
  for (const Item& it : items) {
    generic += it.generic ? 1 : 0;
    worst = std::min(worst, it.ratio);
  }
  const double fraction = samples.empty() ? 0.0 : static_cast<double>(generic) / static_cast<double>(samples.size());
  rep.metrics["generic_fraction"] = fraction;
  rep.metrics["min_det_over_scale"] = worst;
  // Reported as the non-generic fraction against the allowed 1%.
  rep.tolerance = 1.0 - kGenericFraction;
  rep.max_residual = 1.0 - fraction;
  rep.pass = fraction >= kGenericFraction;
  if (generic < samples.size())
    rep.findings.push_back(std::to_string(samples.size() - generic) + " sample(s) with degenerate Jacobian");
  return rep;
}

}  // namespace rslab
