#include "rslab/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rslab/parallel.hpp"

namespace rslab {

std::vector<Gradient> gradients(std::span<const Observable> observables, const PhasePoint& point,
                                const ModelConfig& cfg) {
  cfg.validate();
  validate_point(point, cfg);
  for (const Observable& o : observables) o.check_ranges(cfg.n);

  const std::size_t n = point.size();
  std::vector<Gradient> out(observables.size());
  for (Gradient& g : out) {
    g.dq.assign(n, 0.0);
    g.dp.assign(n, 0.0);
  }
  GenericPoint<Dual> dual;
  dual.q.assign(point.q.begin(), point.q.end());
  dual.p.assign(point.p.begin(), point.p.end());

  for (std::size_t c = 0; c < 2 * n; ++c) {
    Dual& seed = c < n ? dual.q[c] : dual.p[c - n];
    seed.der = 1.0;
    LaxInvariants<Dual> inv(dual, cfg);
    for (std::size_t o = 0; o < observables.size(); ++o) {
      const double d = observables[o].evaluate(inv).der;
      if (!std::isfinite(d)) {
        throw DifferentiationError("non-finite derivative of " + observables[o].id() +
                                       " at coordinate " + std::to_string(c),
                                   c);
      }
      (c < n ? out[o].dq[c] : out[o].dp[c - n]) = d;
    }
    seed.der = 0.0;
  }
  return out;
}

Gradient gradient(const Observable& obs, const PhasePoint& point, const ModelConfig& cfg) {
  return gradients(std::span<const Observable>(&obs, 1), point, cfg).front();
}

Gradient central_difference_gradient(const std::function<double(const PhasePoint&)>& f,
                                     const PhasePoint& point, double rel_step) {
  const std::size_t n = point.size();
  Gradient g{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t c = 0; c < 2 * n; ++c) {
    PhasePoint plus = point;
    PhasePoint minus = point;
    double& xp = c < n ? plus.q[c] : plus.p[c - n];
    double& xm = c < n ? minus.q[c] : minus.p[c - n];
    const double h = rel_step * std::max(1.0, std::abs(xp));
    xp += h;
    xm -= h;
    const double d = (f(plus) - f(minus)) / (2.0 * h);
    (c < n ? g.dq[c] : g.dp[c - n]) = d;
  }
  return g;
}

double bracket_from_gradients(const Gradient& f, const Gradient& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.dq.size(); ++i) s += f.dq[i] * g.dp[i] - f.dp[i] * g.dq[i];
  return s;
}

double bracket_scale(const Gradient& f, const Gradient& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.dq.size(); ++i)
    s += std::abs(f.dq[i] * g.dp[i]) + std::abs(f.dp[i] * g.dq[i]);
  return s;
}

double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& point,
                       const ModelConfig& cfg) {
  const Observable pair[2] = {f, g};
  const std::vector<Gradient> gr = gradients(pair, point, cfg);
  return bracket_from_gradients(gr[0], gr[1]);
}

double jacobi_residual(const Observable& a, const Observable& b, const Observable& c,
                       const PhasePoint& point, const ModelConfig& cfg) {
  auto nested = [&](const Observable& outer, const Observable& x, const Observable& y) {
    const Gradient go = gradient(outer, point, cfg);
    const Gradient gi = central_difference_gradient(
        [&](const PhasePoint& pt) { return poisson_bracket(x, y, pt, cfg); }, point);
    return bracket_from_gradients(go, gi);
  };
  return nested(a, b, c) + nested(b, c, a) + nested(c, a, b);
}

std::vector<std::pair<int, int>> admissible_pairs(IndexRange range, int n) {
  std::vector<std::pair<int, int>> out;
  for (int j = range.lo; j <= range.hi; ++j)
    for (int k = range.lo; k <= range.hi; ++k)
      if (std::abs(j) + std::abs(k) <= 2 * n + 2) out.emplace_back(j, k);
  return out;
}

namespace {

enum class Algebra { mixed, virasoro };

std::vector<BracketRow> bracket_rows(Algebra which, const ModelConfig& cfg, IndexRange range,
                                     std::span<const PhasePoint> samples, unsigned jobs) {
  cfg.validate();
  const auto pairs = admissible_pairs(range, cfg.n);
  const int width = range.hi - range.lo + 1;

  // Observable table: I1(lo..hi) then I(lo..hi) (or I1 again for Virasoro).
  std::vector<Observable> table;
  for (int k = range.lo; k <= range.hi; ++k) table.push_back(Observable::I1(k));
  if (which == Algebra::mixed)
    for (int j = range.lo; j <= range.hi; ++j) table.push_back(Observable::I(j));

  auto per_sample = parallel_map<std::vector<BracketRow>>(samples.size(), jobs, [&](std::size_t s) {
    const PhasePoint& pt = samples[s];
    const std::vector<Gradient> g = gradients(table, pt, cfg);
    LaxInvariants<double> inv(as_generic(pt), cfg);
    const std::size_t second = which == Algebra::mixed ? static_cast<std::size_t>(width) : 0;
    std::vector<BracketRow> rows;
    rows.reserve(pairs.size());
    for (const auto& [j, k] : pairs) {
      BracketRow r;
      r.j = j;
      r.k = k;
      r.sample = s;
      const Gradient& gk = g[static_cast<std::size_t>(k - range.lo)];
      const Gradient& gj = g[second + static_cast<std::size_t>(j - range.lo)];
      r.bracket = bracket_from_gradients(gk, gj);
      r.rhs = which == Algebra::mixed ? j * inv.I(j + k) : (j - k) * inv.I1(j + k);
      rows.push_back(r);
    }
    return rows;
  });

  std::vector<BracketRow> out;
  for (auto& v : per_sample) out.insert(out.end(), v.begin(), v.end());
  return out;
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10f", x);
  return buf;
}

SuiteReport bracket_suite(Algebra which, const ModelConfig& cfg, IndexRange range,
                          std::span<const PhasePoint> samples, unsigned jobs) {
  const std::vector<BracketRow> rows = bracket_rows(which, cfg, range, samples, jobs);
  SuiteReport rep;
  rep.id = which == Algebra::mixed ? "mixed_bracket" : "virasoro_bracket";
  rep.anchor = which == Algebra::mixed ? "{I_k^1, I_j} = j I_{j+k}"
                                       : "{I_k^1, I_j^1} = (j-k) I_{k+j}^1";
  rep.samples = samples.size();
  rep.tolerance = cfg.tol.rel_tol;

  double kappa_ref = 1.0;
  bool has_fit = std::any_of(rows.begin(), rows.end(), [](const BracketRow& r) { return r.rhs != 0.0; });
  if (has_fit) {
    const KappaFit fit = fit_kappa(rows, cfg.tol.rel_tol);
    rep.metrics["kappa_fit"] = fit.kappa;
    if (std::abs(fit.kappa - 1.0) > cfg.tol.rel_tol) {
      kappa_ref = fit.kappa;
      rep.findings.push_back("kappa=" + fmt_double(fit.kappa) + " (" + to_string(cfg.convention) +
                             " convention); residuals measured against the fitted constant");
    }
  }
  double worst = 0.0;
  for (const BracketRow& r : rows) {
    const double rhs = kappa_ref * r.rhs;
    worst = std::max(worst, std::abs(r.bracket - rhs) / (1.0 + std::abs(rhs)));
  }
  rep.max_residual = worst;
  rep.metrics["rows"] = static_cast<double>(rows.size());
  rep.pass = worst < rep.tolerance;
  return rep;
}

}  // namespace

std::vector<BracketRow> mixed_bracket_rows(const ModelConfig& cfg, IndexRange range,
                                        std::span<const PhasePoint> samples, unsigned jobs) {
  return bracket_rows(Algebra::mixed, cfg, range, samples, jobs);
}

std::vector<BracketRow> virasoro_bracket_rows(const ModelConfig& cfg, IndexRange range,
                                        std::span<const PhasePoint> samples, unsigned jobs) {
  return bracket_rows(Algebra::virasoro, cfg, range, samples, jobs);
}

KappaFit fit_kappa(std::span<const BracketRow> rows, double rel_tol) {
  double num = 0.0, den = 0.0;
  std::size_t used = 0;
  for (const BracketRow& r : rows) {
    if (r.rhs == 0.0) continue;
    const double w = 1.0 / (1.0 + std::abs(r.rhs));
    num += w * w * r.rhs * r.bracket;
    den += w * w * r.rhs * r.rhs;
    ++used;
  }
  if (used == 0) throw NumericalError("fit_kappa: no rows with a nonzero right-hand side");
  KappaFit fit;
  fit.kappa = num / den;
  fit.rows = used;
  for (const BracketRow& r : rows) {
    if (r.rhs == 0.0) continue;
    const double pred = fit.kappa * r.rhs;
    fit.fit_residual = std::max(fit.fit_residual, std::abs(r.bracket - pred) / (1.0 + std::abs(pred)));
  }
  fit.consistent = fit.fit_residual < rel_tol;
  return fit;
}

KappaFit calibrate_kappa(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                         IndexRange range, unsigned jobs) {
  if (samples.empty()) throw ConfigError("calibrate_kappa: at least one sample required");
  return fit_kappa(mixed_bracket_rows(cfg, range, samples, jobs), cfg.tol.rel_tol);
}

SuiteReport mixed_bracket_suite(const ModelConfig& cfg, IndexRange range,
                             std::span<const PhasePoint> samples, unsigned jobs) {
  return bracket_suite(Algebra::mixed, cfg, range, samples, jobs);
}

SuiteReport virasoro_bracket_suite(const ModelConfig& cfg, IndexRange range,
                             std::span<const PhasePoint> samples, unsigned jobs) {
  return bracket_suite(Algebra::virasoro, cfg, range, samples, jobs);
}

}  // namespace rslab
