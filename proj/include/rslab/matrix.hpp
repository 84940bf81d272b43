#pragma once

// Small dense complex matrices over a generic real scalar.  Sizes here are
// n <= 8, so everything is row-major std::vector storage and cubic loops.

#include <cstddef>
#include <utility>
#include <vector>

#include "rslab/dual.hpp"
#include "rslab/errors.hpp"

namespace rslab {

template <class T>
class SquareMatrix {
 public:
  using value_type = Complex<T>;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), a_(n * n) {}

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex<T>(T(1.0));
    return m;
  }

  std::size_t size() const { return n_; }

  Complex<T>& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const Complex<T>& operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }

  Complex<T> trace() const {
    Complex<T> t;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
  }

  SquareMatrix adjoint() const {
    SquareMatrix r(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(i, j) = conj((*this)(j, i));
    return r;
  }

  friend SquareMatrix operator*(const SquareMatrix& x, const SquareMatrix& y) {
    const std::size_t n = x.n_;
    SquareMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex<T>& xik = x(i, k);
        for (std::size_t j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  }

  friend SquareMatrix operator-(const SquareMatrix& x, const SquareMatrix& y) {
    SquareMatrix r = x;
    for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
    return r;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Complex<T>> a_;
};

/// Gauss-Jordan inverse with partial pivoting on the value part.  For dual
/// scalars the tangent of the result is the resolvent rule -A^{-1} dA A^{-1}
/// because every arithmetic step propagates derivatives exactly.
template <class T>
SquareMatrix<T> inverse(const SquareMatrix<T>& m) {
  const std::size_t n = m.size();
  SquareMatrix<T> a = m;
  SquareMatrix<T> inv = SquareMatrix<T>::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = pivot_magnitude(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      const double mag = pivot_magnitude(a(r, col));
      if (mag > best) {
        best = mag;
        piv = r;
      }
    }
    if (!(best > 0.0)) throw NumericalError("inverse: matrix is singular");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    }
    const Complex<T> d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex<T> f = a(r, col);
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

/// Max-column-sum norm of the value part.
template <class T>
double norm1(const SquareMatrix<T>& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += pivot_magnitude(m(i, j));
    if (s > best) best = s;
  }
  return best;
}

}  // namespace rslab
