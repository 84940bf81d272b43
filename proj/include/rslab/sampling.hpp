#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "rslab/model.hpp"

namespace rslab {

/// Seeded sampler over the Weyl chamber.  Uses std::mt19937_64, whose output
/// sequence is fixed by the standard, and maps raw words to doubles by hand
/// (the standard distributions are implementation-defined).
class PointSampler {
 public:
  static constexpr const char* kGeneratorName = "mt19937_64";

  PointSampler(const ModelConfig& cfg, std::uint64_t seed);

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// q gaps in [gap_min, gap_max]*|chi|, p in [p_min, p_max], q centred on 0.
  /// Draws that fail validate_point are rejected and redrawn.
  PhasePoint next();

  std::size_t rejected() const { return rejected_; }

 private:
  ModelConfig cfg_;
  std::mt19937_64 engine_;
  std::size_t rejected_ = 0;
};

struct SampleSet {
  std::vector<PhasePoint> points;
  std::size_t rejected = 0;
};

SampleSet sample_points(const ModelConfig& cfg, std::size_t count, std::uint64_t seed);

}  // namespace rslab
