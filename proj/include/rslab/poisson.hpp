#pragma once

// Exact gradients by forward-mode dual sweeps and the canonical Poisson
// bracket {f, g} = sum_i (df/dq_i dg/dp_i - df/dp_i dg/dq_i), plus the
// residual suites for the I / I^1 bracket algebra.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rslab/model.hpp"
#include "rslab/observable.hpp"
#include "rslab/suite.hpp"

namespace rslab {

struct Gradient {
  std::vector<double> dq;
  std::vector<double> dp;
};

/// 2n dual passes, one seeded coordinate each; all observables share the
/// passes.  Throws DifferentiationError on a non-finite derivative.
std::vector<Gradient> gradients(std::span<const Observable> observables, const PhasePoint& point,
                                const ModelConfig& cfg);
Gradient gradient(const Observable& obs, const PhasePoint& point, const ModelConfig& cfg);

/// Central differences with step rel_step * max(1, |x|).
Gradient central_difference_gradient(const std::function<double(const PhasePoint&)>& f,
                                     const PhasePoint& point, double rel_step = 1e-5);

double bracket_from_gradients(const Gradient& f, const Gradient& g);
/// sum_i |df/dq_i dg/dp_i| + |df/dp_i dg/dq_i|: the magnitude the bracket
/// cancels down from, used to normalise commutation residuals.
double bracket_scale(const Gradient& f, const Gradient& g);

double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& point,
                       const ModelConfig& cfg);

/// Cyclic sum {A,{B,C}} + {B,{C,A}} + {C,{A,B}}; the inner brackets are
/// exact, the outer gradients of the inner brackets are central differences.
double jacobi_residual(const Observable& a, const Observable& b, const Observable& c,
                       const PhasePoint& point, const ModelConfig& cfg);

struct IndexRange {
  int lo = -2;
  int hi = 3;
};

/// Index pairs (j, k) in range x range with |j| + |k| <= 2n + 2.
std::vector<std::pair<int, int>> admissible_pairs(IndexRange range, int n);

struct BracketRow {
  int j = 0;
  int k = 0;
  std::size_t sample = 0;
  double bracket = 0.0;  ///< measured left-hand side
  double rhs = 0.0;      ///< kappa-free right-hand side (j I_{j+k} or (j-k) I^1_{j+k})
};

/// {I_k^1, I_j} against j I_{j+k} for every admissible pair and sample.
std::vector<BracketRow> mixed_bracket_rows(const ModelConfig& cfg, IndexRange range,
                                        std::span<const PhasePoint> samples, unsigned jobs = 1);
/// {I_k^1, I_j^1} against (j - k) I^1_{k+j}.
std::vector<BracketRow> virasoro_bracket_rows(const ModelConfig& cfg, IndexRange range,
                                        std::span<const PhasePoint> samples, unsigned jobs = 1);

struct KappaFit {
  double kappa = 0.0;
  double fit_residual = 0.0;  ///< max |b - kappa a| / (1 + |kappa a|)
  std::size_t rows = 0;
  bool consistent = false;    ///< fit_residual < rel_tol
};

/// Weighted least squares for kappa in b = kappa * a, rows with a == 0
/// excluded.  Throws NumericalError if no usable row remains.
KappaFit fit_kappa(std::span<const BracketRow> rows, double rel_tol);

KappaFit calibrate_kappa(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                         IndexRange range = {}, unsigned jobs = 1);

/// Pass iff max |bracket - kappa_ref rhs| / (1 + |kappa_ref rhs|) < rel_tol.
/// kappa_ref is 1 unless the fitted constant differs from 1, in which case
/// the fitted value is used and reported as a finding.
SuiteReport mixed_bracket_suite(const ModelConfig& cfg, IndexRange range,
                             std::span<const PhasePoint> samples, unsigned jobs = 1);
SuiteReport virasoro_bracket_suite(const ModelConfig& cfg, IndexRange range,
                             std::span<const PhasePoint> samples, unsigned jobs = 1);

}  // namespace rslab
