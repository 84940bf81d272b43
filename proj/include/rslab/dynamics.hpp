#pragma once

// Hamiltonian flows of registry observables, the linear evolution law of
// I_k^1 under spectral flows, and scattering asymptotics.

#include <cstddef>
#include <string>
#include <vector>

#include "rslab/integrator.hpp"
#include "rslab/model.hpp"
#include "rslab/observable.hpp"

namespace rslab {

struct FlowOptions {
  StepControl step;
  /// Record the state every output_interval time units (0: every accepted step).
  double output_interval = 0.0;
  /// Additional observables expected to be conserved along the flow; they
  /// are tracked and their drift is reported.
  std::vector<Observable> extra_conserved;
};

/// Immutable record of one integrated flow.
///
/// Tracked columns, in order: the generator, I_{-n}..I_n, I^1_{-n}..I^1_n,
/// then `extra_conserved`.  `drift[c]` is max_t |v(t) - v(0)| / max(|v(0)|, 1)
/// for conserved columns and NaN otherwise.
struct Trajectory {
  int n = 0;
  std::string generator;
  std::vector<double> times;
  std::vector<PhasePoint> states;
  std::vector<std::string> tracked_ids;
  std::vector<bool> conserved;
  std::vector<std::vector<double>> tracked;  ///< tracked[step][column]
  std::vector<double> drift;
  IntegrationStats stats;
  double min_gap_seen = 0.0;

  std::size_t column(const std::string& id) const;
  std::vector<double> series(const std::string& id) const;
  double drift_of(const std::string& id) const { return drift.at(column(id)); }
  /// Largest drift over the generator and the trace invariants I_k.
  double max_spectral_drift() const;
};

/// Integrates qdot = d obs / dp, pdot = -d obs / dq from `start` to t_end.
/// Throws CollisionError if the configuration approaches gap_floor or leaves
/// the Weyl chamber, StiffnessError on step-size underflow.
Trajectory hamiltonian_flow(const Observable& obs, const PhasePoint& start, const ModelConfig& cfg,
                            double t_end, const FlowOptions& opts = {});

/// Drift measure used throughout: |v - v0| / max(|v0|, 1).
double relative_drift(double v, double v0);

struct LinearityResult {
  double slope = 0.0;
  double intercept = 0.0;
  double max_residual = 0.0;     ///< max |I_k^1(t) - (intercept + slope t)|
  double residual_scale = 0.0;   ///< 1 + |slope| t_end
  double bracket_slope = 0.0;    ///< {I_k^1, I}(start)
  double slope_rel_error = 0.0;  ///< |slope - bracket| / max(|bracket|, 1)
  /// kappa * j * I_{j+k}(start) when the generator is I_j, NaN otherwise.
  double predicted_slope = 0.0;
};

/// Fits I_k^1(t) by a line along the flow of the spectral observable I.
/// Throws IndexRangeError if I is not a function of I_1..I_n.
LinearityResult linearity_check(const Observable& generator, int k, const PhasePoint& start,
                                const ModelConfig& cfg, double t_end,
                                const FlowOptions& opts = {});

struct ScatteringResult {
  std::vector<double> p_plus;
  std::vector<double> q_plus;
  std::vector<double> v_plus;
  double fit_residual = 0.0;
  std::vector<double> lax_spectrum;  ///< ascending eigenvalues of L(start)
  /// max_i |exp(s' p_i^+) - lambda_i| / lambda_i with both sides sorted, where
  /// s' = 1 (half) or 2 (literal).
  double spectrum_match_error = 0.0;
  double min_final_gap = 0.0;
  bool weyl_order_preserved = true;
  /// Which asymptotic form was tested: "sum exp(k p)" or "sum exp(2 k p)".
  std::string asymptotic_form;
};

/// Required asymptotic separation as a multiple of |chi|.
inline constexpr double kScatteringSeparation = 50.0;

/// Flows h from start to t_end and fits q_i(t) = q_i^+ + v_i^+ t + c_i / t over
/// the final 20% of the horizon, and p_i(t) = p_i^+ + a_i / t^2 + b_i / t^3 over
/// the second half.  Throws HorizonError if the final minimum gap is below
/// 50 |chi|.
ScatteringResult scattering_extract(const PhasePoint& start, const ModelConfig& cfg, double t_end,
                                    const FlowOptions& opts = {});

}  // namespace rslab
