#pragma once

// Rational Ruijsenaars-Schneider model core: phase points, the Lax matrix,
// and the trace invariants I_k = tr(L^k), I_k^1 = tr(diag(q) L^k).
//
// The evaluators are templates over the real scalar so that the Poisson
// engine can push dual numbers through exactly the same code path.

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rslab/dual.hpp"
#include "rslab/errors.hpp"
#include "rslab/matrix.hpp"

namespace rslab {

/// Exponent convention for u_j.  `half` uses exp(p_j / 2) and makes the
/// canonical brackets, the cosh-sum Hamiltonian and the bracket algebra
/// mutually consistent; `literal` uses exp(p_j), which rescales every
/// bracket constant by 2.
enum class Convention { half, literal };

std::string to_string(Convention c);
Convention convention_from_string(const std::string& s);

struct Tolerances {
  double abs_tol = 1e-9;
  double rel_tol = 1e-8;
  double drift_tol = 1e-6;
};

/// Sampling ranges: consecutive q gaps are drawn in [gap_min, gap_max]*|chi|,
/// momenta in [p_min, p_max].
struct SampleRanges {
  double gap_min = 1.0;
  double gap_max = 5.0;
  double p_min = -1.5;
  double p_max = 1.5;
};

struct ModelConfig {
  int n = 3;
  double chi = 1.0;
  Convention convention = Convention::half;
  /// Non-positive means "use the default 1e-6 * |chi|".
  double gap_floor = 0.0;
  Tolerances tol;
  SampleRanges ranges;

  /// Throws ConfigError naming the violated invariant.
  void validate() const;

  double effective_gap_floor() const {
    return gap_floor > 0.0 ? gap_floor : 1e-6 * std::abs(chi);
  }
  /// Multiplier s in u_j = exp(s p_j) * ...
  double momentum_exponent() const {
    return convention == Convention::half ? 0.5 : 1.0;
  }
  /// Constant kappa in {I_k^1, I_j} = kappa * j * I_{j+k} implied by the
  /// convention.
  double expected_kappa() const {
    return convention == Convention::half ? 1.0 : 2.0;
  }
};

struct PhasePoint {
  std::vector<double> q;
  std::vector<double> p;

  std::size_t size() const { return q.size(); }
};

/// Checks the Weyl-chamber ordering and the gap floor; throws
/// SingularConfigurationError otherwise.
void validate_point(const PhasePoint& point, const ModelConfig& cfg);

/// Smallest consecutive gap q_i - q_{i+1} (infinity for n = 1).
double min_gap(const std::vector<double>& q);

template <class T>
struct GenericPoint {
  std::vector<T> q;
  std::vector<T> p;
};

inline GenericPoint<double> as_generic(const PhasePoint& pt) { return {pt.q, pt.p}; }

/// u_j = exp(s p_j) * prod_{m != j} [1 + chi^2 / (q_j - q_m)^2]^{1/4}.
template <class T>
std::vector<T> build_u_generic(const GenericPoint<T>& pt, const ModelConfig& cfg) {
  using std::exp;
  using std::log;
  const std::size_t n = pt.q.size();
  const double chi2 = cfg.chi * cfg.chi;
  const double s = cfg.momentum_exponent();
  std::vector<T> u(n);
  for (std::size_t j = 0; j < n; ++j) {
    T logsum(0.0);
    for (std::size_t m = 0; m < n; ++m) {
      if (m == j) continue;
      T d = pt.q[j] - pt.q[m];
      logsum += log(1.0 + chi2 / (d * d));
    }
    u[j] = exp(s * pt.p[j] + 0.25 * logsum);
  }
  return u;
}

/// L_jk = u_j * i chi / (i chi + q_j - q_k) * u_k.
template <class T>
SquareMatrix<T> build_lax_generic(const GenericPoint<T>& pt, const std::vector<T>& u,
                                  const ModelConfig& cfg) {
  const std::size_t n = pt.q.size();
  const double chi = cfg.chi;
  const double chi2 = chi * chi;
  SquareMatrix<T> lax(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      T uu = u[j] * u[k];
      if (j == k) {
        lax(j, k) = Complex<T>(uu);
        continue;
      }
      // i chi / (i chi + d) = (chi^2 + i chi d) / (d^2 + chi^2)
      T d = pt.q[j] - pt.q[k];
      T den = d * d + chi2;
      lax(j, k) = Complex<T>(uu * chi2 / den, uu * chi * d / den);
    }
  }
  return lax;
}

/// Threshold on the 1-norm condition estimate above which negative powers
/// carry a conditioning warning.
inline constexpr double kConditionWarnThreshold = 1e12;

/// Lazily extends the power tables L^k, k in Z, for one phase point.  Trace
/// accessors assert that the imaginary residue is below abs_tol (scaled by
/// the diagonal magnitude) and then discard it.
template <class T>
class LaxInvariants {
 public:
  LaxInvariants(const GenericPoint<T>& pt, const ModelConfig& cfg)
      : q_(pt.q), abs_tol_(cfg.tol.abs_tol) {
    u_ = build_u_generic(pt, cfg);
    lax_ = build_lax_generic(pt, u_, cfg);
    positive_.push_back(SquareMatrix<T>::identity(q_.size()));
    negative_.push_back(positive_.front());
  }

  std::size_t size() const { return q_.size(); }
  const std::vector<T>& u() const { return u_; }
  const SquareMatrix<T>& lax() const { return lax_; }
  const std::vector<T>& q() const { return q_; }

  const SquareMatrix<T>& power(int k) {
    if (k >= 0) {
      while (positive_.size() <= static_cast<std::size_t>(k))
        positive_.push_back(positive_.back() * lax_);
      return positive_[static_cast<std::size_t>(k)];
    }
    if (negative_.size() == 1) {
      negative_.push_back(inverse(lax_));
      condition_ = norm1(lax_) * norm1(negative_[1]);
    }
    const auto m = static_cast<std::size_t>(-k);
    while (negative_.size() <= m) negative_.push_back(negative_.back() * negative_[1]);
    return negative_[m];
  }

  /// tr(L^k).
  T I(int k) {
    if (k == 0) return T(static_cast<double>(size()));
    const SquareMatrix<T>& m = power(k);
    T re(0.0), im(0.0);
    double scale = 1.0;
    for (std::size_t i = 0; i < size(); ++i) {
      re += m(i, i).re;
      im += m(i, i).im;
      scale += std::abs(value_of(m(i, i).re));
    }
    check_real(im, scale, k, "tr(L^k)");
    return re;
  }

  /// tr(diag(q) L^k).
  T I1(int k) {
    if (k == 0) {
      T s(0.0);
      for (const T& qi : q_) s += qi;
      return s;
    }
    const SquareMatrix<T>& m = power(k);
    T re(0.0), im(0.0);
    double scale = 1.0;
    for (std::size_t i = 0; i < size(); ++i) {
      re += q_[i] * m(i, i).re;
      im += q_[i] * m(i, i).im;
      scale += std::abs(value_of(q_[i]) * value_of(m(i, i).re));
    }
    check_real(im, scale, k, "tr(q L^k)");
    return re;
  }

  /// 1-norm condition estimate of L (0 until a negative power is requested).
  double condition_estimate() const { return condition_; }
  double max_imag_residue() const { return max_imag_; }

 private:
  void check_real(const T& im, double scale, int k, const char* what) {
    const double r = std::abs(value_of(im));
    if (r > max_imag_) max_imag_ = r;
    if (r > abs_tol_ * scale) {
      throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(r) +
                           " exceeds abs_tol at k=" + std::to_string(k));
    }
  }

  std::vector<T> q_;
  std::vector<T> u_;
  SquareMatrix<T> lax_;
  std::vector<SquareMatrix<T>> positive_;
  std::vector<SquareMatrix<T>> negative_;
  double abs_tol_;
  double condition_ = 0.0;
  double max_imag_ = 0.0;
};

// ---------------------------------------------------------------------------
// Plain-double operations.

struct LaxMatrix {
  Eigen::MatrixXcd entries;
  Eigen::VectorXd u;
  Convention convention = Convention::half;
};

struct TraceResult {
  double value = 0.0;
  double imag_residue = 0.0;
  double condition_estimate = 0.0;
  bool conditioning_warning = false;
};

struct HamiltonianAudit {
  double value = 0.0;       ///< (I_1 + I_{-1}) / 2 from the Lax matrix
  double direct_sum = 0.0;  ///< sum_k cosh(p_k) prod_{j != k} [1 + chi^2/(q_k-q_j)^2]^{1/2}
  double residual = 0.0;    ///< |value - direct_sum|
};

std::vector<double> build_u(const PhasePoint& point, const ModelConfig& cfg);
LaxMatrix build_lax(const PhasePoint& point, const ModelConfig& cfg);
TraceResult lax_power_trace(const PhasePoint& point, const ModelConfig& cfg, int k);
TraceResult weighted_trace(const PhasePoint& point, const ModelConfig& cfg, int k);
HamiltonianAudit principal_hamiltonian(const PhasePoint& point, const ModelConfig& cfg);
double total_momentum(const PhasePoint& point, const ModelConfig& cfg);

/// Ascending eigenvalues of the (Hermitian) Lax matrix.
Eigen::VectorXd lax_spectrum(const PhasePoint& point, const ModelConfig& cfg);

Eigen::MatrixXcd to_eigen(const SquareMatrix<double>& m);

}  // namespace rslab
