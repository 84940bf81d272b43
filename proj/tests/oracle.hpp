#pragma once

// Reference evaluations written without any library code: plain
// std::complex matrices, naive powers, Gauss-Jordan inverse, central
// differences and scalar closed forms.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace oracle {

using cd = std::complex<double>;
using Mat = std::vector<std::vector<cd>>;

inline Mat identity(std::size_t n) {
  Mat m(n, std::vector<cd>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
  return m;
}

inline Mat mul(const Mat& a, const Mat& b) {
  const std::size_t n = a.size();
  Mat c(n, std::vector<cd>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat inverse(Mat a) {
  const std::size_t n = a.size();
  Mat r = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a[i][c]) > std::abs(a[piv][c])) piv = i;
    std::swap(a[c], a[piv]);
    std::swap(r[c], r[piv]);
    const cd d = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= d;
      r[c][j] /= d;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c) continue;
      const cd f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        r[i][j] -= f * r[c][j];
      }
    }
  }
  return r;
}

inline Mat power(const Mat& m, int k) {
  const Mat base = k >= 0 ? m : inverse(m);
  Mat r = identity(m.size());
  for (int i = 0; i < std::abs(k); ++i) r = mul(r, base);
  return r;
}

/// s = 0.5 for the half convention, 1 for literal.
inline std::vector<double> u(const std::vector<double>& q, const std::vector<double>& p, double chi,
                             double s) {
  const std::size_t n = q.size();
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double f = std::exp(s * p[j]);
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) f *= std::pow(1.0 + chi * chi / ((q[j] - q[m]) * (q[j] - q[m])), 0.25);
    out[j] = f;
  }
  return out;
}

inline Mat lax(const std::vector<double>& q, const std::vector<double>& p, double chi, double s) {
  const std::vector<double> uu = u(q, p, chi, s);
  const std::size_t n = q.size();
  Mat l(n, std::vector<cd>(n));
  const cd ichi(0.0, chi);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) l[j][k] = uu[j] * ichi / (ichi + q[j] - q[k]) * uu[k];
  return l;
}

inline double trace_power(const std::vector<double>& q, const std::vector<double>& p, double chi, double s,
                          int k) {
  const Mat m = power(lax(q, p, chi, s), k);
  double t = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) t += m[i][i].real();
  return t;
}

inline double weighted_power(const std::vector<double>& q, const std::vector<double>& p, double chi,
                             double s, int k) {
  const Mat m = power(lax(q, p, chi, s), k);
  double t = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) t += q[i] * m[i][i].real();
  return t;
}

inline double cosh_sum(const std::vector<double>& q, const std::vector<double>& p, double chi) {
  double h = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) {
    double f = std::cosh(p[k]);
    for (std::size_t j = 0; j < q.size(); ++j)
      if (j != k) f *= std::sqrt(1.0 + chi * chi / ((q[k] - q[j]) * (q[k] - q[j])));
    h += f;
  }
  return h;
}

using Field = std::function<double(const std::vector<double>&, const std::vector<double>&)>;

/// Central differences with step h * max(1, |x|); returns (dq, dp).
inline std::pair<std::vector<double>, std::vector<double>> fd_gradient(const Field& f, std::vector<double> q,
                                                                       std::vector<double> p,
                                                                       double h = 1e-5) {
  std::vector<double> dq(q.size()), dp(p.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double x = q[i], step = h * std::max(1.0, std::abs(x));
    q[i] = x + step;
    const double a = f(q, p);
    q[i] = x - step;
    const double b = f(q, p);
    q[i] = x;
    dq[i] = (a - b) / (2.0 * step);
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = p[i], step = h * std::max(1.0, std::abs(x));
    p[i] = x + step;
    const double a = f(q, p);
    p[i] = x - step;
    const double b = f(q, p);
    p[i] = x;
    dp[i] = (a - b) / (2.0 * step);
  }
  return {dq, dp};
}

inline double fd_bracket(const Field& f, const Field& g, const std::vector<double>& q,
                         const std::vector<double>& p) {
  const auto [fq, fp] = fd_gradient(f, q, p);
  const auto [gq, gp] = fd_gradient(g, q, p);
  double b = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) b += fq[i] * gp[i] - fp[i] * gq[i];
  return b;
}

/// Free-particle limit of det d(I_1..I_n, I^1_1..I^1_n)/d(p, q), up to sign:
/// n! (2s)^n (prod x)^2 V(x)^2 with x = exp(2 s p).
inline double decoupled_jacobian(const std::vector<double>& p, double s) {
  const std::size_t n = p.size();
  double f = 1.0, px = 1.0, v = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    f *= static_cast<double>(i + 1) * 2.0 * s;
    px *= std::exp(2.0 * s * p[i]);
    for (std::size_t j = i + 1; j < n; ++j) v *= std::exp(2.0 * s * p[i]) - std::exp(2.0 * s * p[j]);
  }
  return f * px * px * v * v;
}

}  // namespace oracle
