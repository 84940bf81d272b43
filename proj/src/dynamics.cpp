#include "rslab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rslab/poisson.hpp"

namespace rslab {

double relative_drift(double v, double v0) { return std::abs(v - v0) / std::max(std::abs(v0), 1.0); }

std::size_t Trajectory::column(const std::string& id) const {
  const auto it = std::find(tracked_ids.begin(), tracked_ids.end(), id);
  if (it == tracked_ids.end()) throw IndexRangeError("trajectory does not track '" + id + "'");
  return static_cast<std::size_t>(it - tracked_ids.begin());
}

std::vector<double> Trajectory::series(const std::string& id) const {
  const std::size_t c = column(id);
  std::vector<double> out;
  out.reserve(tracked.size());
  for (const auto& row : tracked) out.push_back(row[c]);
  return out;
}

double Trajectory::max_spectral_drift() const {
  double worst = drift.empty() ? 0.0 : drift[0];
  for (int k = -n; k <= n; ++k) worst = std::max(worst, drift_of("I:" + std::to_string(k)));
  return worst;
}

namespace {

PhasePoint unpack(const std::vector<double>& y, std::size_t n) {
  PhasePoint pt;
  pt.q.assign(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n));
  pt.p.assign(y.begin() + static_cast<std::ptrdiff_t>(n), y.end());
  return pt;
}

}  // namespace

Trajectory hamiltonian_flow(const Observable& obs, const PhasePoint& start, const ModelConfig& cfg,
                            double t_end, const FlowOptions& opts) {
  cfg.validate();
  validate_point(start, cfg);
  obs.check_ranges(cfg.n);
  for (const Observable& o : opts.extra_conserved) o.check_ranges(cfg.n);
  if (!(t_end > 0.0)) throw ConfigError("hamiltonian_flow: t_end must be positive");

  const std::size_t n = start.size();
  const int ni = cfg.n;

  Trajectory traj;
  traj.n = ni;
  traj.generator = obs.id();
  std::vector<Observable> tracked_obs;
  tracked_obs.push_back(obs);
  traj.tracked_ids.push_back("generator");
  traj.conserved.push_back(true);
  for (int k = -ni; k <= ni; ++k) {
    tracked_obs.push_back(Observable::I(k));
    traj.tracked_ids.push_back("I:" + std::to_string(k));
    traj.conserved.push_back(true);
  }
  for (int k = -ni; k <= ni; ++k) {
    tracked_obs.push_back(Observable::I1(k));
    traj.tracked_ids.push_back("I1:" + std::to_string(k));
    traj.conserved.push_back(false);
  }
  for (const Observable& o : opts.extra_conserved) {
    tracked_obs.push_back(o);
    traj.tracked_ids.push_back(o.id());
    traj.conserved.push_back(true);
  }

  const double floor = cfg.effective_gap_floor();
  traj.min_gap_seen = std::numeric_limits<double>::infinity();

  auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
    PhasePoint pt = unpack(y, n);
    Gradient g;
    try {
      g = gradient(obs, pt, cfg);
    } catch (const SingularConfigurationError& e) {
      throw CollisionError(std::string("hamiltonian_flow: stage point left the Weyl chamber: ") + e.what(), t);
    }
    for (std::size_t i = 0; i < n; ++i) {
      dy[i] = g.dp[i];
      dy[n + i] = -g.dq[i];
    }
  };

  auto observe = [&](double t, const std::vector<double>& y) {
    PhasePoint pt = unpack(y, n);
    const double gap = min_gap(pt.q);
    traj.min_gap_seen = std::min(traj.min_gap_seen, gap);
    if (n > 1 && !(gap >= floor)) {
      throw CollisionError("hamiltonian_flow: gap " + std::to_string(gap) +
                               " below gap_floor (model-violation finding)",
                           t);
    }
    LaxInvariants<double> inv(as_generic(pt), cfg);
    std::vector<double> row;
    row.reserve(tracked_obs.size());
    for (const Observable& o : tracked_obs) row.push_back(o.evaluate(inv));
    traj.times.push_back(t);
    traj.states.push_back(std::move(pt));
    traj.tracked.push_back(std::move(row));
  };

  std::vector<double> y(start.q);
  y.insert(y.end(), start.p.begin(), start.p.end());
  traj.stats = integrate_dp54(rhs, y, 0.0, t_end, opts.step, opts.output_interval, observe);

  traj.drift.assign(traj.tracked_ids.size(), std::numeric_limits<double>::quiet_NaN());
  const auto& first = traj.tracked.front();
  for (std::size_t c = 0; c < traj.tracked_ids.size(); ++c) {
    if (!traj.conserved[c]) continue;
    double worst = 0.0;
    for (const auto& row : traj.tracked) worst = std::max(worst, relative_drift(row[c], first[c]));
    traj.drift[c] = worst;
  }
  return traj;
}

LinearityResult linearity_check(const Observable& generator, int k, const PhasePoint& start,
                                const ModelConfig& cfg, double t_end, const FlowOptions& opts) {
  if (!generator.is_spectral(cfg.n))
    throw IndexRangeError("linearity_check: generator " + generator.id() +
                          " is not a function of I_1..I_n");
  if (std::abs(k) > cfg.n) throw IndexRangeError("linearity_check: k must lie in [-n, n]");

  FlowOptions o = opts;
  if (o.output_interval <= 0.0) o.output_interval = t_end / 200.0;
  const Trajectory traj = hamiltonian_flow(generator, start, cfg, t_end, o);
  const std::vector<double> values = traj.series("I1:" + std::to_string(k));

  // Least-squares line through (t, I_k^1(t)), centred for conditioning.
  const auto m = static_cast<double>(values.size());
  double tbar = 0.0, vbar = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    tbar += traj.times[i];
    vbar += values[i];
  }
  tbar /= m;
  vbar /= m;
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dt = traj.times[i] - tbar;
    stt += dt * dt;
    stv += dt * (values[i] - vbar);
  }
  LinearityResult r;
  r.slope = stv / stt;
  r.intercept = vbar - r.slope * tbar;
  for (std::size_t i = 0; i < values.size(); ++i)
    r.max_residual = std::max(r.max_residual, std::abs(values[i] - (r.intercept + r.slope * traj.times[i])));
  r.residual_scale = 1.0 + std::abs(r.slope) * t_end;
  r.bracket_slope = poisson_bracket(Observable::I1(k), generator, start, cfg);
  r.slope_rel_error = std::abs(r.slope - r.bracket_slope) / std::max(std::abs(r.bracket_slope), 1.0);
  r.predicted_slope = std::numeric_limits<double>::quiet_NaN();
  if (generator.kind() == ObservableKind::power_trace) {
    const int j = generator.first_index();
    r.predicted_slope = cfg.expected_kappa() * j * lax_power_trace(start, cfg, j + k).value;
  }
  return r;
}

ScatteringResult scattering_extract(const PhasePoint& start, const ModelConfig& cfg, double t_end,
                                    const FlowOptions& opts) {
  FlowOptions o = opts;
  if (o.output_interval <= 0.0) o.output_interval = t_end / 500.0;
  const Trajectory traj = hamiltonian_flow(Observable::H(), start, cfg, t_end, o);
  const std::size_t n = start.size();

  ScatteringResult res;
  res.asymptotic_form = cfg.convention == Convention::half ? "sum exp(k p)" : "sum exp(2 k p)";

  // Fit window: final 20% of the horizon.
  const double t_window = 0.8 * t_end;
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] >= t_window) rows.push_back(i);
  if (rows.size() < 4) throw HorizonError("scattering_extract: too few samples in fit window", 0.0, 0.0, 0.0);

  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows.size()), 3);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const double t = traj.times[rows[r]];
    A(static_cast<Eigen::Index>(r), 0) = 1.0;
    A(static_cast<Eigen::Index>(r), 1) = t;
    A(static_cast<Eigen::Index>(r), 2) = 1.0 / t;
  }
  const auto qr = A.colPivHouseholderQr();
  res.p_plus.resize(n);
  res.q_plus.resize(n);
  res.v_plus.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) b(static_cast<Eigen::Index>(r)) = traj.states[rows[r]].q[i];
    const Eigen::VectorXd coef = qr.solve(b);
    res.q_plus[i] = coef(0);
    res.v_plus[i] = coef(1);
    res.fit_residual = std::max(res.fit_residual, (A * coef - b).cwiseAbs().maxCoeff());
  }

  // Momenta settle as 1/gap^2 ~ 1/t^2; fit over the second half of the horizon.
  std::vector<std::size_t> prow;
  for (std::size_t i = 0; i < traj.times.size(); ++i)
    if (traj.times[i] >= 0.5 * t_end) prow.push_back(i);
  Eigen::MatrixXd P(static_cast<Eigen::Index>(prow.size()), 3);
  for (std::size_t r = 0; r < prow.size(); ++r) {
    const double t = traj.times[prow[r]];
    P(static_cast<Eigen::Index>(r), 0) = 1.0;
    P(static_cast<Eigen::Index>(r), 1) = 1.0 / (t * t);
    P(static_cast<Eigen::Index>(r), 2) = 1.0 / (t * t * t);
  }
  const auto pqr = P.colPivHouseholderQr();
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::VectorXd b(static_cast<Eigen::Index>(prow.size()));
    for (std::size_t r = 0; r < prow.size(); ++r) b(static_cast<Eigen::Index>(r)) = traj.states[prow[r]].p[i];
    res.p_plus[i] = pqr.solve(b)(0);
  }

  for (const PhasePoint& s : traj.states)
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(s.q[i] > s.q[i + 1])) res.weyl_order_preserved = false;

  res.min_final_gap = min_gap(traj.states.back().q);
  const double required = kScatteringSeparation * std::abs(cfg.chi);
  if (n > 1 && !(res.min_final_gap > required)) {
    throw HorizonError("scattering_extract: final minimum gap " + std::to_string(res.min_final_gap) +
                           " below " + std::to_string(required) + "; extend t_end",
                       res.min_final_gap, required, res.fit_residual);
  }

  const Eigen::VectorXd spec = lax_spectrum(start, cfg);
  res.lax_spectrum.assign(spec.data(), spec.data() + spec.size());
  std::vector<double> asym(n);
  const double s = cfg.convention == Convention::half ? 1.0 : 2.0;
  for (std::size_t i = 0; i < n; ++i) asym[i] = std::exp(s * res.p_plus[i]);
  std::sort(asym.begin(), asym.end());
  for (std::size_t i = 0; i < n; ++i)
    res.spectrum_match_error =
        std::max(res.spectrum_match_error, std::abs(asym[i] - res.lax_spectrum[i]) / res.lax_spectrum[i]);
  return res;
}

}  // namespace rslab
