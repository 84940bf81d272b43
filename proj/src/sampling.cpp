#include "rslab/sampling.hpp"

#include <cmath>

namespace rslab {

PointSampler::PointSampler(const ModelConfig& cfg, std::uint64_t seed) : cfg_(cfg), engine_(seed) {
  cfg_.validate();
}

double PointSampler::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

PhasePoint PointSampler::next() {
  const auto n = static_cast<std::size_t>(cfg_.n);
  const double scale = std::abs(cfg_.chi);
  for (;;) {
    PhasePoint pt;
    pt.q.resize(n);
    pt.p.resize(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) x -= uniform(cfg_.ranges.gap_min, cfg_.ranges.gap_max) * scale;
      pt.q[i] = x;
    }
    double mean = 0.0;
    for (double qi : pt.q) mean += qi;
    mean /= static_cast<double>(n);
    for (double& qi : pt.q) qi -= mean;
    for (std::size_t i = 0; i < n; ++i) pt.p[i] = uniform(cfg_.ranges.p_min, cfg_.ranges.p_max);
    try {
      validate_point(pt, cfg_);
      return pt;
    } catch (const SingularConfigurationError&) {
      ++rejected_;
    }
  }
}

SampleSet sample_points(const ModelConfig& cfg, std::size_t count, std::uint64_t seed) {
  PointSampler sampler(cfg, seed);
  SampleSet set;
  set.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) set.points.push_back(sampler.next());
  set.rejected = sampler.rejected();
  return set;
}

}  // namespace rslab
