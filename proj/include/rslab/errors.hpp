#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rslab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid ModelConfig or run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Point outside the Weyl chamber or closer to a collision than gap_floor.
class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

/// Registry index outside its declared range.
class IndexRangeError : public Error {
 public:
  using Error::Error;
};

/// Failed numerical assertion (imaginary residue, non-convergence, ...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DifferentiationError : public Error {
 public:
  DifferentiationError(const std::string& what, std::size_t coordinate)
      : Error(what), coordinate_(coordinate) {}
  /// Seeded coordinate: 0..n-1 are q, n..2n-1 are p.
  std::size_t coordinate() const { return coordinate_; }

 private:
  std::size_t coordinate_;
};

/// Particles came within gap_floor along an integrated trajectory.
class CollisionError : public Error {
 public:
  CollisionError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Adaptive step size fell below the configured floor.
class StiffnessError : public Error {
 public:
  StiffnessError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Scattering horizon too short for the asymptotic fit to be trusted.
class HorizonError : public Error {
 public:
  HorizonError(const std::string& what, double min_gap, double required_gap,
               double fit_residual)
      : Error(what),
        min_gap_(min_gap),
        required_gap_(required_gap),
        fit_residual_(fit_residual) {}
  double min_gap() const { return min_gap_; }
  double required_gap() const { return required_gap_; }
  double fit_residual() const { return fit_residual_; }

 private:
  double min_gap_;
  double required_gap_;
  double fit_residual_;
};

}  // namespace rslab
