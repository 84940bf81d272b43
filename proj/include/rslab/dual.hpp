#pragma once

// Forward-mode scalars used by every evaluator that is generic over the
// scalar type.  `Dual` carries one tangent direction; `Complex<T>` is a
// minimal complex number over an arbitrary real scalar (std::complex is only
// specified for float, double and long double).

#include <cmath>

namespace rslab {

/// First-order dual number: value plus one directional derivative.
struct Dual {
  double val = 0.0;
  double der = 0.0;

  constexpr Dual() = default;
  constexpr Dual(double v) : val(v) {}  // NOLINT: implicit lift of constants
  constexpr Dual(double v, double d) : val(v), der(d) {}

  constexpr Dual& operator+=(const Dual& o) {
    val += o.val;
    der += o.der;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    val -= o.val;
    der -= o.der;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    der = der * o.val + val * o.der;
    val *= o.val;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.val;
    der = (der - val * inv * o.der) * inv;
    val *= inv;
    return *this;
  }
};

constexpr Dual operator-(const Dual& a) { return {-a.val, -a.der}; }
constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }
constexpr Dual operator*(Dual a, const Dual& b) { return a *= b; }
constexpr Dual operator/(Dual a, const Dual& b) { return a /= b; }
constexpr Dual operator+(Dual a, double b) { return a += Dual(b); }
constexpr Dual operator+(double a, const Dual& b) { return Dual(a) + b; }
constexpr Dual operator-(Dual a, double b) { return a -= Dual(b); }
constexpr Dual operator-(double a, const Dual& b) { return Dual(a) - b; }
constexpr Dual operator*(const Dual& a, double b) { return {a.val * b, a.der * b}; }
constexpr Dual operator*(double a, const Dual& b) { return {a * b.val, a * b.der}; }
constexpr Dual operator/(const Dual& a, double b) { return {a.val / b, a.der / b}; }
constexpr Dual operator/(double a, const Dual& b) { return Dual(a) / b; }

inline Dual exp(const Dual& a) {
  const double e = std::exp(a.val);
  return {e, e * a.der};
}
inline Dual log(const Dual& a) { return {std::log(a.val), a.der / a.val}; }
inline Dual sqrt(const Dual& a) {
  const double s = std::sqrt(a.val);
  return {s, 0.5 * a.der / s};
}
inline Dual pow(const Dual& a, double e) {
  const double pm1 = std::pow(a.val, e - 1.0);
  return {pm1 * a.val, e * pm1 * a.der};
}
inline Dual cosh(const Dual& a) { return {std::cosh(a.val), std::sinh(a.val) * a.der}; }
inline Dual sinh(const Dual& a) { return {std::sinh(a.val), std::cosh(a.val) * a.der}; }

inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.val; }
inline double tangent_of(double) { return 0.0; }
inline double tangent_of(const Dual& x) { return x.der; }

/// Complex number over a real scalar T (double or Dual).
template <class T>
struct Complex {
  T re{};
  T im{};

  constexpr Complex() = default;
  constexpr Complex(T r) : re(r), im(0.0) {}  // NOLINT
  constexpr Complex(T r, T i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    T r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    T den = o.re * o.re + o.im * o.im;
    T r = (re * o.re + im * o.im) / den;
    im = (im * o.re - re * o.im) / den;
    re = r;
    return *this;
  }
};

template <class T>
Complex<T> operator-(const Complex<T>& a) {
  return {-a.re, -a.im};
}
template <class T>
Complex<T> operator+(Complex<T> a, const Complex<T>& b) {
  return a += b;
}
template <class T>
Complex<T> operator-(Complex<T> a, const Complex<T>& b) {
  return a -= b;
}
template <class T>
Complex<T> operator*(Complex<T> a, const Complex<T>& b) {
  return a *= b;
}
template <class T>
Complex<T> operator/(Complex<T> a, const Complex<T>& b) {
  return a /= b;
}
template <class T>
Complex<T> operator*(const Complex<T>& a, const T& s) {
  return {a.re * s, a.im * s};
}
template <class T>
Complex<T> operator*(const T& s, const Complex<T>& a) {
  return {a.re * s, a.im * s};
}

template <class T>
Complex<T> conj(const Complex<T>& a) {
  return {a.re, -a.im};
}

/// Magnitude of the value part, used for pivot selection so that the same
/// elimination order is taken for plain and dual scalars.
template <class T>
double pivot_magnitude(const Complex<T>& a) {
  return std::hypot(value_of(a.re), value_of(a.im));
}

}  // namespace rslab
