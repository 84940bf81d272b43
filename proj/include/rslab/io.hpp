#pragma once

// Configuration, verification reports and trajectory serialization.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rslab/dynamics.hpp"
#include "rslab/model.hpp"
#include "rslab/poisson.hpp"
#include "rslab/suite.hpp"

namespace rslab {

struct RunOptions {
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::size_t samples = 100;
  IndexRange range{-2, 3};
  bool timing = false;
};

struct RunConfig {
  ModelConfig model;
  RunOptions run;
};

inline constexpr int kMaxCliParticles = 8;

/// Flat JSON object; absent keys take defaults, unknown keys are rejected.
/// Throws ConfigError on any violation (including n outside [1, 8]).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
/// Every field, defaults included.
nlohmann::json config_to_json(const RunConfig& cfg);

/// JSON text with sorted keys, two-space indent, and every floating-point
/// number printed with 17 significant digits in exponent form.
std::string canonical_dump(const nlohmann::json& j);

/// Writes to path.tmp and renames over path.
void write_file_atomically(const std::string& path, const std::string& contents);

struct VerificationReport {
  RunConfig config;
  std::vector<SuiteReport> suites;
  KappaFit kappa;
  std::map<std::string, double> timing_seconds;

  bool pass() const;
  std::vector<std::string> findings() const;
  const SuiteReport& suite(const std::string& id) const;
};

/// Tolerance for the cosh-sum identity of the principal Hamiltonian.
inline constexpr double kCoshIdentityTol = 1e-10;

/// Lax-based h against the explicit cosh-sum at every sample.  Under the
/// literal convention the gap is recorded as a finding, not a failure.
SuiteReport cosh_identity_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples);

/// Rank checks: (I, I^1) -> 2n, (I, C_{.,1}) -> 2n-1, (I, K) -> 2n-1, at
/// >= 99% of samples.
SuiteReport independence_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                               unsigned jobs = 1);

/// C_{k,j} against I_j, K_j against h and L_j against P, for every index.
SuiteReport constants_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples,
                            unsigned jobs = 1);

VerificationReport run_verification(const RunConfig& cfg);
nlohmann::json report_to_json(const VerificationReport& rep);

nlohmann::json kappa_to_json(const KappaFit& fit, const ModelConfig& cfg);

// Trajectory CSV --------------------------------------------------------

/// t, q_1..q_n, p_1..p_n, I_{-n}..I_{n}, I_{-n}^1..I_{n}^1, drift_generator, drift_I
std::vector<std::string> trajectory_csv_header(int n);
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
CsvTable parse_csv(std::istream& is);

nlohmann::json scattering_to_json(const ScatteringResult& res);

}  // namespace rslab
