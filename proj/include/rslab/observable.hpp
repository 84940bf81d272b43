#pragma once

// Registry of differentiable phase-space observables.  Every evaluator is a
// template over the scalar type and reads its invariants from one shared
// LaxInvariants cache, so a dual sweep differentiates all of them at once.

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rslab/model.hpp"
#include "rslab/spectral.hpp"

namespace rslab {

/// Polynomial in the n variables x_1..x_n (in practice I_1..I_n).
struct Polynomial {
  struct Term {
    double coef = 0.0;
    std::vector<int> powers;  ///< length n, non-negative
  };
  std::vector<Term> terms;

  static Polynomial constant(double c, std::size_t n);
  /// c * x_var (var is 1-based like I_var).
  static Polynomial variable(std::size_t var, std::size_t n, double c = 1.0);

  Polynomial& add_term(double coef, std::vector<int> powers);

  template <class T>
  T operator()(std::span<const T> x) const {
    T acc(0.0);
    for (const Term& t : terms) {
      T m(t.coef);
      for (std::size_t i = 0; i < t.powers.size(); ++i)
        for (int e = 0; e < t.powers[i]; ++e) m = m * x[i];
      acc += m;
    }
    return acc;
  }

  /// Throws IndexRangeError unless every term has n non-negative exponents.
  void validate(std::size_t n) const;
  std::size_t variables() const;
};

enum class ObservableKind {
  power_trace,     ///< I_k
  weighted_trace,  ///< I_k^1
  hamiltonian,     ///< h = (I_1 + I_{-1}) / 2
  momentum,        ///< P = (I_1 - I_{-1}) / 2
  wojciechowski,   ///< C_{k,j} = I_k^1 I_{2j} - I_j^1 I_{k+j}
  extra_k,         ///< K_j = I_j^1 (I_2 - n) - I_1^1 (I_{j+1} - I_{j-1})
  extra_l,         ///< L_j = I_j^1 (I_2 + n) - I_1^1 (I_{j+1} + I_{j-1})
  user_poly,       ///< polynomial in I_1..I_n
  user_f,          ///< F = sum_k I_k^1 U^k(I_1..I_n)
  product,         ///< f * g
};

class Observable {
 public:
  static Observable I(int k);
  static Observable I1(int k);
  static Observable H();
  static Observable Momentum();
  static Observable C(int k, int j);
  static Observable K(int j);
  static Observable L(int j);
  static Observable UserPoly(Polynomial poly);
  /// u_maps[k-1] is U^k for k = 1..n.
  static Observable UserF(std::vector<Polynomial> u_maps);
  static Observable Product(Observable f, Observable g);

  /// Parse a textual id: "I:k", "I1:k", "H", "P", "C:k,j", "K:j", "L:j".
  static Observable parse(const std::string& id);

  ObservableKind kind() const { return kind_; }
  int first_index() const { return a_; }
  int second_index() const { return b_; }
  const Polynomial& polynomial() const { return poly_; }
  const std::vector<Polynomial>& u_maps() const { return u_maps_; }

  std::string id() const;

  /// Throws IndexRangeError if an index parameter is outside its declared
  /// range for particle number n.
  void check_ranges(int n) const;

  /// True for functions of the spectrum alone, i.e. of I_1..I_n.
  bool is_spectral(int n) const;

  template <class T>
  T evaluate(LaxInvariants<T>& inv) const;

  /// Evaluate a spectral observable as a function of I_1..I_n.
  template <class T>
  T evaluate_spectral(std::span<const T> first_n) const;

 private:
  ObservableKind kind_ = ObservableKind::power_trace;
  int a_ = 0;
  int b_ = 0;
  Polynomial poly_;
  std::vector<Polynomial> u_maps_;
  std::shared_ptr<const Observable> lhs_;
  std::shared_ptr<const Observable> rhs_;
};

/// Trace powers accepted by the registry: |k| <= 4n + 2.
inline int max_trace_power(int n) { return 4 * n + 2; }

template <class T>
T Observable::evaluate(LaxInvariants<T>& inv) const {
  const double n = static_cast<double>(inv.size());
  switch (kind_) {
    case ObservableKind::power_trace:
      return inv.I(a_);
    case ObservableKind::weighted_trace:
      return inv.I1(a_);
    case ObservableKind::hamiltonian:
      return 0.5 * (inv.I(1) + inv.I(-1));
    case ObservableKind::momentum:
      return 0.5 * (inv.I(1) - inv.I(-1));
    case ObservableKind::wojciechowski:
      return inv.I1(a_) * inv.I(2 * b_) - inv.I1(b_) * inv.I(a_ + b_);
    case ObservableKind::extra_k:
      return inv.I1(a_) * (inv.I(2) - n) - inv.I1(1) * (inv.I(a_ + 1) - inv.I(a_ - 1));
    case ObservableKind::extra_l:
      return inv.I1(a_) * (inv.I(2) + n) - inv.I1(1) * (inv.I(a_ + 1) + inv.I(a_ - 1));
    case ObservableKind::user_poly: {
      std::vector<T> x;
      for (std::size_t i = 1; i <= inv.size(); ++i) x.push_back(inv.I(static_cast<int>(i)));
      return poly_(std::span<const T>(x));
    }
    case ObservableKind::user_f: {
      std::vector<T> x;
      for (std::size_t i = 1; i <= inv.size(); ++i) x.push_back(inv.I(static_cast<int>(i)));
      T acc(0.0);
      for (std::size_t k = 0; k < u_maps_.size(); ++k)
        acc += inv.I1(static_cast<int>(k + 1)) * u_maps_[k](std::span<const T>(x));
      return acc;
    }
    case ObservableKind::product:
      return lhs_->evaluate(inv) * rhs_->evaluate(inv);
  }
  throw Error("Observable::evaluate: unknown kind");
}

template <class T>
T Observable::evaluate_spectral(std::span<const T> first_n) const {
  const int n = static_cast<int>(first_n.size());
  if (!is_spectral(n)) throw IndexRangeError("observable " + id() + " is not a spectral function");
  switch (kind_) {
    case ObservableKind::power_trace: {
      if (a_ == 0) return T(static_cast<double>(n));
      if (a_ >= 1 && a_ <= n) return first_n[static_cast<std::size_t>(a_ - 1)];
      const PowerSums<T> ps(first_n, std::min(a_, 0), std::max(a_, 0));
      return ps[a_];
    }
    case ObservableKind::hamiltonian:
    case ObservableKind::momentum: {
      const PowerSums<T> ps(first_n, -1, 1);
      const double sign = kind_ == ObservableKind::hamiltonian ? 1.0 : -1.0;
      return 0.5 * (ps[1] + sign * ps[-1]);
    }
    case ObservableKind::user_poly:
      return poly_(first_n);
    case ObservableKind::product:
      return lhs_->evaluate_spectral(first_n) * rhs_->evaluate_spectral(first_n);
    default:
      break;
  }
  throw IndexRangeError("observable " + id() + " is not a spectral function");
}

/// Double-precision evaluation at a validated phase point.
double evaluate(const Observable& obs, const PhasePoint& point, const ModelConfig& cfg);

}  // namespace rslab
