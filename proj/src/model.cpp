#include "rslab/model.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

namespace rslab {

std::string to_string(Convention c) { return c == Convention::half ? "half" : "literal"; }

Convention convention_from_string(const std::string& s) {
  if (s == "half") return Convention::half;
  if (s == "literal") return Convention::literal;
  throw ConfigError("convention must be 'half' or 'literal', got '" + s + "'");
}

void ModelConfig::validate() const {
  if (n < 1) throw ConfigError("n >= 1 required (got " + std::to_string(n) + ")");
  if (!(chi != 0.0) || !std::isfinite(chi))
    throw ConfigError("chi must be a nonzero finite real coupling (chi != 0)");
  if (gap_floor < 0.0 || !std::isfinite(gap_floor))
    throw ConfigError("gap_floor must be positive (0 selects the default)");
  if (!(tol.abs_tol > 0.0) || !(tol.rel_tol > 0.0) || !(tol.drift_tol > 0.0))
    throw ConfigError("all tolerances (abs_tol, rel_tol, drift_tol) must be > 0");
  if (!(ranges.gap_min > 0.0) || ranges.gap_max < ranges.gap_min)
    throw ConfigError("sample gap range must satisfy 0 < gap_min <= gap_max");
  if (ranges.p_max < ranges.p_min) throw ConfigError("sample momentum range must satisfy p_min <= p_max");
}

double min_gap(const std::vector<double>& q) {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < q.size(); ++i) g = std::min(g, q[i] - q[i + 1]);
  return g;
}

void validate_point(const PhasePoint& point, const ModelConfig& cfg) {
  const std::size_t n = point.q.size();
  if (n != static_cast<std::size_t>(cfg.n) || point.p.size() != n) {
    throw SingularConfigurationError("phase point has dimension " + std::to_string(n) +
                                     ", config expects n=" + std::to_string(cfg.n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(point.q[i]) || !std::isfinite(point.p[i]))
      throw SingularConfigurationError("phase point has non-finite coordinates");
  }
  const double floor = cfg.effective_gap_floor();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double gap = point.q[i] - point.q[i + 1];
    if (!(gap > 0.0))
      throw SingularConfigurationError("q must be strictly decreasing (Weyl chamber) at index " +
                                       std::to_string(i));
    if (gap < floor)
      throw SingularConfigurationError("gap q_" + std::to_string(i + 1) + " - q_" +
                                       std::to_string(i + 2) + " below gap_floor");
  }
}

Eigen::MatrixXcd to_eigen(const SquareMatrix<double>& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXcd r(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& z = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      r(i, j) = {z.re, z.im};
    }
  return r;
}

std::vector<double> build_u(const PhasePoint& point, const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  return build_u_generic(as_generic(point), cfg);
}

LaxMatrix build_lax(const PhasePoint& point, const ModelConfig& cfg) {
  const std::vector<double> u = build_u(point, cfg);
  LaxMatrix out;
  out.entries = to_eigen(build_lax_generic(as_generic(point), u, cfg));
  out.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  out.convention = cfg.convention;
  return out;
}

namespace {

template <class F>
TraceResult traced(const PhasePoint& point, const ModelConfig& cfg, int k, F&& f) {
  cfg.validate();
  validate_point(point, cfg);
  LaxInvariants<double> inv(as_generic(point), cfg);
  TraceResult r;
  r.value = f(inv, k);
  r.imag_residue = inv.max_imag_residue();
  r.condition_estimate = inv.condition_estimate();
  r.conditioning_warning = r.condition_estimate > kConditionWarnThreshold;
  return r;
}

}  // namespace

TraceResult lax_power_trace(const PhasePoint& point, const ModelConfig& cfg, int k) {
  return traced(point, cfg, k, [](LaxInvariants<double>& inv, int kk) { return inv.I(kk); });
}

TraceResult weighted_trace(const PhasePoint& point, const ModelConfig& cfg, int k) {
  return traced(point, cfg, k, [](LaxInvariants<double>& inv, int kk) { return inv.I1(kk); });
}

HamiltonianAudit principal_hamiltonian(const PhasePoint& point, const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  LaxInvariants<double> inv(as_generic(point), cfg);
  HamiltonianAudit a;
  a.value = 0.5 * (inv.I(1) + inv.I(-1));
  const double chi2 = cfg.chi * cfg.chi;
  const std::size_t n = point.size();
  for (std::size_t k = 0; k < n; ++k) {
    double prod = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == k) continue;
      const double d = point.q[k] - point.q[j];
      prod *= std::sqrt(1.0 + chi2 / (d * d));
    }
    a.direct_sum += std::cosh(point.p[k]) * prod;
  }
  a.residual = std::abs(a.value - a.direct_sum);
  return a;
}

double total_momentum(const PhasePoint& point, const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  LaxInvariants<double> inv(as_generic(point), cfg);
  return 0.5 * (inv.I(1) - inv.I(-1));
}

Eigen::VectorXd lax_spectrum(const PhasePoint& point, const ModelConfig& cfg) {
  const LaxMatrix lax = build_lax(point, cfg);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lax.entries, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("lax_spectrum: eigensolver did not converge");
  return es.eigenvalues();
}

}  // namespace rslab
