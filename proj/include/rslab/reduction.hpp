#pragma once

// Numerical audit of the symplectic-reduction gauge slice
//   (g, J^R, xi) = (L^{1/2}, -2 diag(q), i chi (1 - v v^*)),  v = L^{-1/2} u,
// its moment-map constraints, and the restriction of the invariant functions
// tr((g^* g)^k) and -1/2 Re tr((g^* g)^k J^R) to I_k and I_k^1.

#include <span>

#include <Eigen/Dense>

#include "rslab/model.hpp"
#include "rslab/suite.hpp"

namespace rslab {

struct SlicePoint {
  Eigen::MatrixXcd g;   ///< Hermitian square root of L
  Eigen::MatrixXcd jr;  ///< -2 diag(q)
  Eigen::MatrixXcd xi;  ///< orbit point i chi (1 - v v^*)
  Eigen::VectorXcd v;   ///< L^{-1/2} u
  Eigen::MatrixXcd lax;
};

/// Eigenvalue floor used when taking L^{+-1/2}.
inline constexpr double kEigenClamp = 1e-14;

/// Throws NumericalError if the Hermitian eigensolver fails.
SlicePoint build_slice_point(const PhasePoint& point, const ModelConfig& cfg);

/// X -> (X - X^*) / 2.
Eigen::MatrixXcd anti_hermitian(const Eigen::MatrixXcd& x);

struct SliceInvariants {
  double sqrt_error = 0.0;       ///< max |g g - L|
  double hermitian_error = 0.0;  ///< max |g - g^*|
  double orbit_norm_error = 0.0; ///< | |v|^2 - n |
  double xi_spectrum_error = 0.0;///< spectrum of xi vs {i chi (1 - n), i chi x (n-1)}
};

SliceInvariants slice_invariants(const SlicePoint& sp, const ModelConfig& cfg);

struct ConstraintResiduals {
  double jr_anti_hermitian = 0.0;  ///< max |antiHermitian(J^R)|, exactly 0 on the slice
  double moment_map = 0.0;         ///< max |antiHermitian(g J^R g^{-1}) + xi|
};

ConstraintResiduals constraint_check(const SlicePoint& sp, const ModelConfig& cfg);

struct RestrictionResiduals {
  double restricted_invariant = 0.0;  ///< tr((g^* g)^k)
  double restricted_weighted = 0.0;   ///< -1/2 Re tr((g^* g)^k J^R)
  double invariant_residual = 0.0;    ///< relative to I_k
  double weighted_residual = 0.0;     ///< relative to I_k^1
};

/// k in [-n, n]; residuals are |a - b| / max(|b|, 1).
RestrictionResiduals invariant_restriction_check(const PhasePoint& point, const ModelConfig& cfg,
                                                 int k);

/// Tolerance for the slice audit: every residual below 1e-9.
inline constexpr double kSliceTol = 1e-9;

SuiteReport reduction_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                            unsigned jobs = 1);

}  // namespace rslab
