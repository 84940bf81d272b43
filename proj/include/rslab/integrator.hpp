#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta pair with FSAL and standard
// step-size control (Hairer, Norsett & Wanner, Solving ODEs I, II.4).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "rslab/errors.hpp"

namespace rslab {

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-13;
  std::size_t max_steps = 5'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace dp54 {
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b - b_hat (fifth minus fourth order weights)
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
}  // namespace dp54

/// Integrates y' = f(t, y) from t0 to t_end.  `observe(t, y)` is called at t0
/// and then after every accepted step, or only at multiples of
/// output_interval when it is positive (steps are shortened to land on them).
template <class Rhs, class Observer>
IntegrationStats integrate_dp54(Rhs&& f, std::vector<double>& y, double t0, double t_end,
                                const StepControl& ctl, double output_interval,
                                Observer&& observe) {
  using namespace dp54;
  const std::size_t dim = y.size();
  IntegrationStats stats;
  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  std::vector<double> tmp(dim), ynew(dim);

  double t = t0;
  double h_ctrl = std::min(ctl.initial_step, t_end - t0);
  f(t, y, k1);
  ++stats.rhs_evaluations;
  observe(t, y);

  std::size_t next_output = 1;
  auto next_output_time = [&] {
    return output_interval > 0.0 ? std::min(t_end, t0 + static_cast<double>(next_output) * output_interval)
                                 : t_end;
  };

  while (t < t_end) {
    if (stats.accepted + stats.rejected >= ctl.max_steps)
      throw StiffnessError("integrate_dp54: step budget exhausted", t);
    if (h_ctrl < ctl.min_step) throw StiffnessError("integrate_dp54: step size underflow", t);
    const double target = next_output_time();
    double h = h_ctrl;
    bool lands = false;
    if (t + h >= target) {
      h = target - t;
      lands = true;
    }

    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < dim; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < dim; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, ynew, k7);
    stats.rhs_evaluations += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (e / sc) * (e / sc);
    }
    err = std::sqrt(err / static_cast<double>(dim));

    const double factor =
        err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      t = lands ? target : t + h;
      y.swap(ynew);
      k1.swap(k7);
      ++stats.accepted;
      if (output_interval <= 0.0 || lands) {
        observe(t, y);
        if (lands) ++next_output;
      }
      // A step cut short to land on an output time says nothing about the
      // controller's step, so keep it.
      if (!(lands && h < h_ctrl)) h_ctrl = h * factor;
    } else {
      ++stats.rejected;
      h_ctrl = h * factor;
    }
  }
  return stats;
}

}  // namespace rslab
