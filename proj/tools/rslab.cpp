// rslab: verify, calibrate, evolve and scatter from the command line.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rslab/io.hpp"
#include "rslab/sampling.hpp"

using namespace rslab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> convention;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "flat JSON config file");
  sub->add_option("--seed", c.seed, "sampling seed");
  sub->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  sub->add_option("--convention", c.convention, "half or literal")
      ->check(CLI::IsMember({"half", "literal"}));
  sub->add_option("--out", c.out, "output file (stdout if omitted)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? parse_config(nlohmann::json::object()) : load_config(c.config);
  if (c.seed) cfg.run.seed = *c.seed;
  if (c.jobs) cfg.run.jobs = *c.jobs;
  if (c.convention) cfg.model.convention = convention_from_string(*c.convention);
  cfg.model.validate();
  return cfg;
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty())
    std::cout << text;
  else
    write_file_atomically(out, text);
}

PhasePoint resolve_start(const RunConfig& cfg, const std::vector<double>& q, const std::vector<double>& p) {
  if (q.empty() && p.empty()) return PointSampler(cfg.model, cfg.run.seed).next();
  PhasePoint pt{q, p};
  if (pt.p.empty()) pt.p.assign(q.size(), 0.0);
  if (static_cast<int>(pt.q.size()) != cfg.model.n || static_cast<int>(pt.p.size()) != cfg.model.n)
    throw ConfigError("--q and --p need exactly n = " + std::to_string(cfg.model.n) + " values");
  validate_point(pt, cfg.model);
  return pt;
}

int cmd_verify(const Common& c) {
  const RunConfig cfg = resolve(c);
  const VerificationReport rep = run_verification(cfg);
  emit(c.out, canonical_dump(report_to_json(rep)));
  for (const SuiteReport& s : rep.suites)
    std::fprintf(stderr, "%-24s %s  max_residual=%.3e tol=%.1e\n", s.id.c_str(), s.pass ? "PASS" : "FAIL",
                 s.max_residual, s.tolerance);
  for (const std::string& f : rep.findings()) std::fprintf(stderr, "finding: %s\n", f.c_str());
  return rep.pass() ? kExitPass : kExitFail;
}

int cmd_calibrate(const Common& c) {
  const RunConfig cfg = resolve(c);
  const SampleSet set = sample_points(cfg.model, cfg.run.samples, cfg.run.seed);
  const KappaFit fit = calibrate_kappa(cfg.model, set.points, cfg.run.range, cfg.run.jobs);
  nlohmann::json j = kappa_to_json(fit, cfg.model);
  j["config"] = config_to_json(cfg);
  emit(c.out, canonical_dump(j));
  std::fprintf(stderr, "kappa=%.10f fit_residual=%.3e\n", fit.kappa, fit.fit_residual);
  return fit.consistent ? kExitPass : kExitFail;
}

int cmd_evolve(const Common& c, const std::string& obs_id, const std::vector<double>& q,
               const std::vector<double>& p, double t_end, double dt) {
  const RunConfig cfg = resolve(c);
  const Observable obs = Observable::parse(obs_id);
  obs.check_ranges(cfg.model.n);
  const PhasePoint start = resolve_start(cfg, q, p);
  FlowOptions opts;
  opts.output_interval = dt > 0.0 ? dt : t_end / 200.0;
  const Trajectory traj = hamiltonian_flow(obs, start, cfg.model, t_end, opts);
  std::ostringstream os;
  write_trajectory_csv(os, traj);
  emit(c.out, os.str());
  const double drift = traj.max_spectral_drift();
  std::fprintf(stderr, "steps=%zu max_spectral_drift=%.3e\n", traj.stats.accepted, drift);
  return drift < cfg.model.tol.drift_tol ? kExitPass : kExitFail;
}

int cmd_scatter(const Common& c, const std::vector<double>& q, const std::vector<double>& p, double t_end) {
  const RunConfig cfg = resolve(c);
  const PhasePoint start = resolve_start(cfg, q, p);
  const ScatteringResult res = scattering_extract(start, cfg.model, t_end);
  emit(c.out, canonical_dump(scattering_to_json(res)));
  std::fprintf(stderr, "spectrum_match_error=%.3e fit_residual=%.3e\n", res.spectrum_match_error,
               res.fit_residual);
  return res.weyl_order_preserved ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ruijsenaars-Schneider invariant laboratory"};
  app.require_subcommand(1);
  Common common;

  CLI::App* verify = app.add_subcommand("verify", "run every verification suite");
  CLI::App* calibrate = app.add_subcommand("calibrate", "fit the bracket normalisation kappa");
  CLI::App* evolve = app.add_subcommand("evolve", "integrate a Hamiltonian flow to CSV");
  CLI::App* scatter = app.add_subcommand("scatter", "extract asymptotic momenta");
  for (CLI::App* sub : {verify, calibrate, evolve, scatter}) add_common(sub, common);

  std::string obs_id = "H";
  std::vector<double> q, p;
  double t_end = 10.0, scatter_t_end = 200.0, dt = 0.0;
  evolve->add_option("--observable", obs_id, "generator id, e.g. H, P, I:2, C:2,1");
  for (CLI::App* sub : {evolve, scatter}) {
    sub->add_option("--q", q, "start positions, comma separated")->delimiter(',');
    sub->add_option("--p", p, "start momenta, comma separated")->delimiter(',');
  }
  evolve->add_option("--t-end", t_end, "final time")->capture_default_str()->check(CLI::PositiveNumber);
  scatter->add_option("--t-end", scatter_t_end, "final time")->capture_default_str()->check(CLI::PositiveNumber);
  evolve->add_option("--dt", dt, "output interval");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify) return cmd_verify(common);
    if (*calibrate) return cmd_calibrate(common);
    if (*evolve) return cmd_evolve(common, obs_id, q, p, t_end, dt);
    return cmd_scatter(common, q, p, scatter_t_end);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const IndexRangeError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const HorizonError& e) {
    std::fprintf(stderr,
                 "%s\n  min_gap=%.6g required=%.6g fit_residual=%.3e; increase --t-end\n",
                 e.what(), e.min_gap(), e.required_gap(), e.fit_residual());
    return kExitFail;
  } catch (const CollisionError& e) {
    std::fprintf(stderr, "integration error at t=%.6g: %s\n", e.time(), e.what());
    return kExitFail;
  } catch (const StiffnessError& e) {
    std::fprintf(stderr, "integration error at t=%.6g: %s\n", e.time(), e.what());
    return kExitFail;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFail;
  }
}
