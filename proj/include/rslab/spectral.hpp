#pragma once

// Power-sum algebra for an n-point spectrum.  Given P_1..P_n (= I_1..I_n)
// the Newton identities fix the elementary symmetric polynomials e_1..e_n and
// hence every P_m, m in Z.  This is how functions of the Lax spectrum are
// expressed in the independent coordinates I_1..I_n.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "rslab/errors.hpp"

namespace rslab {

/// e_0..e_n from P_1..P_n.
template <class T>
std::vector<T> elementary_from_power_sums(std::span<const T> p) {
  const std::size_t n = p.size();
  std::vector<T> e(n + 1, T(0.0));
  e[0] = T(1.0);
  for (std::size_t m = 1; m <= n; ++m) {
    T acc(0.0);
    for (std::size_t i = 1; i <= m; ++i) {
      T term = e[m - i] * p[i - 1];
      if (i % 2 == 0)
        acc -= term;
      else
        acc += term;
    }
    e[m] = acc / static_cast<double>(m);
  }
  return e;
}

/// P_1..P_count from e_0..e_n.
template <class T>
std::vector<T> power_sums_from_elementary(std::span<const T> e, std::size_t count) {
  const std::size_t n = e.size() - 1;
  std::vector<T> p(count + 1, T(0.0));
  p[0] = T(static_cast<double>(n));
  for (std::size_t m = 1; m <= count; ++m) {
    T acc(0.0);
    const std::size_t top = m <= n ? m - 1 : n;
    for (std::size_t i = 1; i <= top; ++i) {
      T term = e[i] * p[m - i];
      if (i % 2 == 0)
        acc -= term;
      else
        acc += term;
    }
    if (m <= n) {
      T term = static_cast<double>(m) * e[m];
      if (m % 2 == 0)
        acc -= term;
      else
        acc += term;
    }
    p[m] = acc;
  }
  return p;
}

/// Power sums of an n-point spectrum over an index window [lo, hi], computed
/// from P_1..P_n only.
template <class T>
class PowerSums {
 public:
  PowerSums(std::span<const T> first_n, int lo, int hi) : lo_(lo), n_(first_n.size()) {
    if (n_ == 0) throw IndexRangeError("PowerSums: empty spectrum");
    const std::vector<T> e = elementary_from_power_sums(first_n);
    values_.assign(static_cast<std::size_t>(hi - lo + 1), T(0.0));
    if (hi > 0) {
      const std::vector<T> pos = power_sums_from_elementary<T>(e, static_cast<std::size_t>(hi));
      for (int k = std::max(lo, 0); k <= hi; ++k) values_[idx(k)] = pos[static_cast<std::size_t>(k)];
    }
    if (lo < 0) {
      // Reciprocal spectrum: e'_i = e_{n-i} / e_n.
      std::vector<T> er(n_ + 1);
      for (std::size_t i = 0; i <= n_; ++i) er[i] = e[n_ - i] / e[n_];
      const std::vector<T> neg = power_sums_from_elementary<T>(er, static_cast<std::size_t>(-lo));
      for (int k = lo; k <= std::min(hi, -1); ++k) values_[idx(k)] = neg[static_cast<std::size_t>(-k)];
    }
    if (lo <= 0 && hi >= 0) values_[idx(0)] = T(static_cast<double>(n_));
  }

  T operator[](int k) const {
    if (k < lo_ || idx(k) >= values_.size()) throw IndexRangeError("PowerSums: index outside window");
    return values_[idx(k)];
  }

 private:
  std::size_t idx(int k) const { return static_cast<std::size_t>(k - lo_); }
  int lo_;
  std::size_t n_;
  std::vector<T> values_;
};

}  // namespace rslab
