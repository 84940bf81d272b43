#pragma once

// Extra constants of motion built from I_k and I_k^1, their commutation
// checks, and the independence tests: the phase-space Jacobian of
// (I_1..I_n, I_1^1..I_n^1), the algebraic Jacobians in invariant coordinates,
// and numerical ranks of stacked gradients.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rslab/model.hpp"
#include "rslab/observable.hpp"
#include "rslab/suite.hpp"

namespace rslab {

enum class FamilyKind { wojciechowski, extra_k, extra_l, user };

/// A constant of motion together with the observable it must commute with.
///   C(k, j): k, j in 1..n, k != j, commutant I_j
///   K(j):    j in 2..n, commutant h
///   L(j):    j in 2..n, commutant P
///   User:    F = sum_k I_k^1 U^k(I_1..I_n), commutant any spectral observable
class ConstantFamily {
 public:
  static ConstantFamily C(int k, int j);
  static ConstantFamily K(int j);
  static ConstantFamily L(int j);
  static ConstantFamily User(std::vector<Polynomial> u_maps, Observable commutant);

  FamilyKind kind() const { return kind_; }
  Observable observable() const;
  const Observable& commutant() const { return commutant_; }
  const std::vector<Polynomial>& u_maps() const { return u_maps_; }
  std::string id() const { return observable().id(); }

  void validate(int n) const;

 private:
  FamilyKind kind_ = FamilyKind::wojciechowski;
  int k_ = 0;
  int j_ = 0;
  std::vector<Polynomial> u_maps_;
  Observable commutant_;
};

double eval_constant(const ConstantFamily& fam, const PhasePoint& point, const ModelConfig& cfg);

/// Residual of sum_k (sum_j j I_{j+k} dI/dI_j) U^k = 0 at one point,
/// normalised by 1 + sum_k |w_k U^k|.
double user_orthogonality_residual(const ConstantFamily& fam, const PhasePoint& point,
                                   const ModelConfig& cfg);

/// max_s |{F, commutant}| / (1 + bracket_scale) over the samples; for User
/// families the orthogonality identity residual is folded in as well.
SuiteReport commutation_check(const ConstantFamily& fam, const ModelConfig& cfg,
                              std::span<const PhasePoint> samples, unsigned jobs = 1);

struct PhaseJacobian {
  /// Rows (I_1..I_n, I_1^1..I_n^1), columns (p_1..p_n, q_1..q_n).
  Eigen::MatrixXd matrix;
  double det = 0.0;
  /// Hadamard bound prod_i ||row_i||; |det| / hadamard lies in [0, 1].
  double hadamard = 0.0;
  /// n! (2s)^n (prod x)^2 prod_{i<j} max(x_i, x_j)^2 with x = exp(2 s p):
  /// the free-particle determinant n! (2s)^n (prod x)^2 V(x)^2 with every
  /// Vandermonde factor replaced by its upper bound, so it never vanishes.
  double scale = 0.0;
};

PhaseJacobian jacobian_J(const PhasePoint& point, const ModelConfig& cfg);

enum class InvariantMode { wojciechowski, extra_k };

struct InvariantJacobian {
  Eigen::MatrixXd matrix;  ///< d(I_a, G_b) / d(I_alpha, I^1_beta)
  double det = 0.0;
  double closed_form = 0.0;  ///< (I_{2j})^{n-1} or (I_2 - n)^{n-1}
  double rel_error = 0.0;
};

/// Treats (I_1..I_n, I_beta^1) as independent coordinates: I_m for m outside
/// 1..n are Newton-identity functions of I_1..I_n, and the constants
/// C_{b,j} (b != j) or K_b (b >= 2) are fixed polynomials in them.  Derivatives
/// are exact (dual seeds on the coordinates, not on phase space).
InvariantJacobian invariant_coords_jacobian(InvariantMode mode, int j, const PhasePoint& point,
                                            const ModelConfig& cfg);

/// Exact identity tolerance for the invariant-coordinate determinants.
inline constexpr double kDeterminantIdentityTol = 1e-10;

/// All samples for one mode (j ignored in K mode); pass iff the max
/// rel_error < kDeterminantIdentityTol.
SuiteReport jacobian_in_invariant_coords(InvariantMode mode, int j, const ModelConfig& cfg,
                                         std::span<const PhasePoint> samples, unsigned jobs = 1);

struct RankResult {
  int rank = 0;
  Eigen::VectorXd singular_values;  ///< of the row-normalised gradient stack
  double condition = 0.0;           ///< sigma_max / sigma_min
};

inline constexpr double kRankThreshold = 1e-8;

/// Numerical rank (singular values above 1e-8 sigma_max) of the stacked
/// gradients, each row scaled to unit length first.
RankResult independence_rank(std::span<const Observable> observables, const PhasePoint& point,
                             const ModelConfig& cfg);

/// Genericity thresholds for the phase-space Jacobian suite.
inline constexpr double kJacobianDetFloor = 1e-8;
inline constexpr double kGenericFraction = 0.99;

/// Rank of (I_1..I_n, I_1^1..I_n^1) equals 2n and |det J| > 1e-8 * scale
/// at >= 99% of samples.
SuiteReport jacobian_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                           unsigned jobs = 1);

}  // namespace rslab
