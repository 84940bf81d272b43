#include "rslab/io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "rslab/parallel.hpp"
#include "rslab/reduction.hpp"
#include "rslab/sampling.hpp"
#include "rslab/superint.hpp"

namespace rslab {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "n",       "chi",     "convention", "gap_floor", "abs_tol",  "rel_tol",
      "drift_tol", "gap_min", "gap_max",  "p_min",     "p_max",    "seed",
      "jobs",    "samples", "index_lo",   "index_hi",  "timing"};
  return keys;
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

void dump_value(const json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map: keys sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_value(it.value(), out, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(j[i], out, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case json::value_t::number_float: {
      const double x = j.get<double>();
      out += std::isfinite(x) ? fmt17(x) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

RunConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a flat JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known_keys().count(it.key())) throw ConfigError("unknown config key '" + it.key() + "'");

  RunConfig c;
  read(j, "n", c.model.n);
  read(j, "chi", c.model.chi);
  if (j.contains("convention")) {
    std::string s;
    read(j, "convention", s);
    c.model.convention = convention_from_string(s);
  }
  read(j, "gap_floor", c.model.gap_floor);
  read(j, "abs_tol", c.model.tol.abs_tol);
  read(j, "rel_tol", c.model.tol.rel_tol);
  read(j, "drift_tol", c.model.tol.drift_tol);
  read(j, "gap_min", c.model.ranges.gap_min);
  read(j, "gap_max", c.model.ranges.gap_max);
  read(j, "p_min", c.model.ranges.p_min);
  read(j, "p_max", c.model.ranges.p_max);
  read(j, "seed", c.run.seed);
  read(j, "jobs", c.run.jobs);
  read(j, "samples", c.run.samples);
  read(j, "index_lo", c.run.range.lo);
  read(j, "index_hi", c.run.range.hi);
  read(j, "timing", c.run.timing);

  c.model.validate();
  if (c.model.n > kMaxCliParticles)
    throw ConfigError("n must lie in [1, 8] (got " + std::to_string(c.model.n) + ")");
  if (c.run.jobs == 0) c.run.jobs = 1;
  if (c.run.samples == 0) throw ConfigError("samples must be >= 1");
  if (c.run.range.lo > c.run.range.hi) throw ConfigError("index_lo must not exceed index_hi");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  json j;
  j["n"] = c.model.n;
  j["chi"] = c.model.chi;
  j["convention"] = to_string(c.model.convention);
  j["gap_floor"] = c.model.effective_gap_floor();
  j["abs_tol"] = c.model.tol.abs_tol;
  j["rel_tol"] = c.model.tol.rel_tol;
  j["drift_tol"] = c.model.tol.drift_tol;
  j["gap_min"] = c.model.ranges.gap_min;
  j["gap_max"] = c.model.ranges.gap_max;
  j["p_min"] = c.model.ranges.p_min;
  j["p_max"] = c.model.ranges.p_max;
  j["seed"] = c.run.seed;
  j["generator"] = PointSampler::kGeneratorName;
  j["jobs"] = c.run.jobs;
  j["samples"] = c.run.samples;
  j["index_lo"] = c.run.range.lo;
  j["index_hi"] = c.run.range.hi;
  j["timing"] = c.run.timing;
  return j;
}

std::string canonical_dump(const json& j) {
  std::string out;
  dump_value(j, out, 0);
  out += "\n";
  return out;
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << contents;
    out.flush();
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

bool VerificationReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteReport& s) { return s.pass; });
}

std::vector<std::string> VerificationReport::findings() const {
  std::vector<std::string> out;
  for (const SuiteReport& s : suites)
    for (const std::string& f : s.findings) out.push_back(s.id + ": " + f);
  return out;
}

const SuiteReport& VerificationReport::suite(const std::string& id) const {
  for (const SuiteReport& s : suites)
    if (s.id == id) return s;
  throw IndexRangeError("report has no suite '" + id + "'");
}

SuiteReport cosh_identity_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples) {
  SuiteReport rep;
  rep.id = "cosh_identity";
  rep.anchor = "h = (I_1 + I_{-1})/2 = sum_k cosh(p_k) prod_j [1 + chi^2/(q_k-q_j)^2]^{1/2}";
  rep.samples = samples.size();
  rep.tolerance = kCoshIdentityTol;
  for (const PhasePoint& pt : samples) {
    const HamiltonianAudit a = principal_hamiltonian(pt, cfg);
    rep.max_residual = std::max(rep.max_residual, a.residual / std::abs(a.value));
  }
  if (cfg.convention == Convention::literal) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "Lax h differs from the cosh-sum under the literal convention: max relative gap %.6e",
                  rep.max_residual);
    rep.findings.emplace_back(buf);
    rep.pass = true;
  } else {
    rep.pass = rep.max_residual < rep.tolerance;
  }
  return rep;
}

SuiteReport independence_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples, unsigned jobs) {
  const int n = cfg.n;
  struct Set {
    std::string name;
    std::vector<Observable> obs;
    int expected;
  };
  std::vector<Set> sets;
  {
    Set s{"I,I1", {}, 2 * n};
    for (int k = 1; k <= n; ++k) s.obs.push_back(Observable::I(k));
    for (int k = 1; k <= n; ++k) s.obs.push_back(Observable::I1(k));
    sets.push_back(std::move(s));
  }
  if (n >= 2) {
    Set c{"I,C(.,1)", {}, 2 * n - 1};
    Set kk{"I,K", {}, 2 * n - 1};
    for (int a = 1; a <= n; ++a) {
      c.obs.push_back(Observable::I(a));
      kk.obs.push_back(Observable::I(a));
    }
    for (int b = 2; b <= n; ++b) {
      c.obs.push_back(Observable::C(b, 1));
      kk.obs.push_back(Observable::K(b));
    }
    sets.push_back(std::move(c));
    sets.push_back(std::move(kk));
  }

  SuiteReport rep;
  rep.id = "independence_rank";
  rep.anchor = "differentials linearly independent on a dense subset";
  rep.samples = samples.size();
  rep.tolerance = 1.0 - kGenericFraction;
  for (const Set& s : sets) {
    const auto ok = parallel_map<int>(samples.size(), jobs, [&](std::size_t i) {
      return independence_rank(s.obs, samples[i], cfg).rank == s.expected ? 1 : 0;
    });
    const double good = static_cast<double>(std::count(ok.begin(), ok.end(), 1));
    const double fraction = samples.empty() ? 0.0 : good / static_cast<double>(samples.size());
    rep.metrics["generic_fraction[" + s.name + "]"] = fraction;
    rep.max_residual = std::max(rep.max_residual, 1.0 - fraction);
  }
  rep.pass = rep.max_residual <= rep.tolerance;
  return rep;
}

SuiteReport constants_suite(const ModelConfig& cfg, std::span<const PhasePoint> samples, unsigned jobs) {
  const int n = cfg.n;
  std::vector<ConstantFamily> fams;
  for (int j = 1; j <= n; ++j)
    for (int k = 1; k <= n; ++k)
      if (k != j) fams.push_back(ConstantFamily::C(k, j));
  for (int j = 2; j <= n; ++j) {
    fams.push_back(ConstantFamily::K(j));
    fams.push_back(ConstantFamily::L(j));
  }
  SuiteReport rep;
  rep.id = "constants_commutation";
  rep.anchor = "C_{k,j}, K_j, L_j Poisson commute with I_j, h, P";
  rep.samples = samples.size();
  rep.tolerance = cfg.tol.rel_tol;
  for (const ConstantFamily& f : fams) {
    const SuiteReport r = commutation_check(f, cfg, samples, jobs);
    rep.metrics[r.id] = r.max_residual;
    rep.max_residual = std::max(rep.max_residual, r.max_residual);
  }
  if (fams.empty()) rep.findings.emplace_back("no extra constants exist for n=1");
  rep.pass = rep.max_residual < rep.tolerance;
  return rep;
}

VerificationReport run_verification(const RunConfig& cfg) {
  const ModelConfig& m = cfg.model;
  m.validate();
  const unsigned jobs = cfg.run.jobs;
  const SampleSet set = sample_points(m, cfg.run.samples, cfg.run.seed);
  const std::span<const PhasePoint> pts(set.points);

  VerificationReport rep;
  rep.config = cfg;
  auto timed = [&](const std::string& id, auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    SuiteReport s = fn();
    s.resampled = set.rejected;
    rep.timing_seconds[id] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.suites.push_back(std::move(s));
  };

  timed("cosh_identity", [&] { return cosh_identity_suite(m, pts); });
  timed("mixed_bracket", [&] { return mixed_bracket_suite(m, cfg.run.range, pts, jobs); });
  timed("virasoro_bracket", [&] { return virasoro_bracket_suite(m, cfg.run.range, pts, jobs); });
  timed("kappa_calibration", [&] {
    rep.kappa = calibrate_kappa(m, pts, cfg.run.range, jobs);
    SuiteReport s;
    s.id = "kappa_calibration";
    s.anchor = "{I_k^1, I_j} = kappa j I_{j+k}";
    s.samples = pts.size();
    s.tolerance = m.tol.rel_tol;
    s.max_residual = rep.kappa.fit_residual;
    s.metrics["kappa"] = rep.kappa.kappa;
    s.metrics["rows"] = static_cast<double>(rep.kappa.rows);
    s.pass = rep.kappa.consistent;
    if (std::abs(rep.kappa.kappa - 1.0) > m.tol.rel_tol) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "kappa=%.1f (%s convention)", rep.kappa.kappa,
                    to_string(m.convention).c_str());
      s.findings.emplace_back(buf);
    }
    if (!rep.kappa.consistent) s.findings.emplace_back("convention inconsistency: no single kappa fits");
    return s;
  });
  timed("jacobian_J", [&] { return jacobian_suite(m, pts, jobs); });
  timed("invariant_jacobian_C", [&] {
    SuiteReport s;
    s.id = "invariant_jacobian_C";
    s.anchor = "det d(I_a, C_{b,j})/d(I_alpha, I^1_beta) = (I_{2j})^{n-1}";
    s.samples = pts.size();
    s.tolerance = kDeterminantIdentityTol;
    for (int j = 1; j <= m.n; ++j) {
      const SuiteReport r = jacobian_in_invariant_coords(InvariantMode::wojciechowski, j, m, pts, jobs);
      s.metrics["j=" + std::to_string(j)] = r.max_residual;
      s.max_residual = std::max(s.max_residual, r.max_residual);
    }
    s.pass = s.max_residual < s.tolerance;
    return s;
  });
  timed("invariant_jacobian_K", [&] {
    if (m.n < 2) {
      SuiteReport s;
      s.id = "invariant_jacobian_K";
      s.anchor = "det d(I_a, K_b)/d(I_alpha, I^1_beta) = (I_2 - n)^{n-1}";
      s.samples = 0;
      s.tolerance = kDeterminantIdentityTol;
      s.pass = true;
      s.findings.emplace_back("not applicable for n=1");
      return s;
    }
    return jacobian_in_invariant_coords(InvariantMode::extra_k, 0, m, pts, jobs);
  });
  timed("independence_rank", [&] { return independence_suite(m, pts, jobs); });
  timed("constants_commutation", [&] { return constants_suite(m, pts, jobs); });
  timed("reduction_slice", [&] { return reduction_suite(m, pts, jobs); });
  return rep;
}

json kappa_to_json(const KappaFit& fit, const ModelConfig& cfg) {
  json j;
  j["kappa"] = fit.kappa;
  j["fit_residual"] = fit.fit_residual;
  j["rows"] = fit.rows;
  j["consistent"] = fit.consistent;
  j["convention"] = to_string(cfg.convention);
  return j;
}

json report_to_json(const VerificationReport& rep) {
  json j;
  j["config"] = config_to_json(rep.config);
  json suites = json::array();
  for (const SuiteReport& s : rep.suites) {
    json o;
    o["id"] = s.id;
    o["anchor"] = s.anchor;
    o["samples"] = s.samples;
    o["max_residual"] = s.max_residual;
    o["tolerance"] = s.tolerance;
    o["pass"] = s.pass;
    o["findings"] = s.findings;
    o["resampled"] = s.resampled;
    json metrics = json::object();
    for (const auto& [k, v] : s.metrics) metrics[k] = v;
    o["metrics"] = metrics;
    suites.push_back(o);
  }
  j["suites"] = suites;
  j["kappa"] = kappa_to_json(rep.kappa, rep.config.model);
  j["findings"] = rep.findings();
  j["pass"] = rep.pass();
  if (rep.config.run.timing) {
    json t = json::object();
    for (const auto& [k, v] : rep.timing_seconds) t[k] = v;
    j["timing_seconds"] = t;
  }
  return j;
}

// ---------------------------------------------------------------------------

std::vector<std::string> trajectory_csv_header(int n) {
  std::vector<std::string> h{"t"};
  for (int i = 1; i <= n; ++i) h.push_back("q_" + std::to_string(i));
  for (int i = 1; i <= n; ++i) h.push_back("p_" + std::to_string(i));
  for (int k = -n; k <= n; ++k) h.push_back("I_{" + std::to_string(k) + "}");
  for (int k = -n; k <= n; ++k) h.push_back("I_{" + std::to_string(k) + "}^1");
  h.emplace_back("drift_generator");
  h.emplace_back("drift_I");
  return h;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const int n = traj.n;
  const std::vector<std::string> header = trajectory_csv_header(n);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << "\n";

  const std::size_t gen = traj.column("generator");
  std::vector<std::size_t> icols, i1cols;
  for (int k = -n; k <= n; ++k) {
    icols.push_back(traj.column("I:" + std::to_string(k)));
    i1cols.push_back(traj.column("I1:" + std::to_string(k)));
  }
  const auto& first = traj.tracked.front();
  double run_gen = 0.0, run_i = 0.0;
  char buf[40];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    os << ',' << buf;
  };
  for (std::size_t s = 0; s < traj.times.size(); ++s) {
    const auto& row = traj.tracked[s];
    run_gen = std::max(run_gen, relative_drift(row[gen], first[gen]));
    for (std::size_t c : icols) run_i = std::max(run_i, relative_drift(row[c], first[c]));
    std::snprintf(buf, sizeof buf, "%.17g", traj.times[s]);
    os << buf;
    for (double x : traj.states[s].q) put(x);
    for (double x : traj.states[s].p) put(x);
    for (std::size_t c : icols) put(row[c]);
    for (std::size_t c : i1cols) put(row[c]);
    put(run_gen);
    put(run_i);
    os << "\n";
  }
}

CsvTable parse_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  if (!std::getline(is, line)) throw Error("parse_csv: empty input");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.header.size()) throw Error("parse_csv: ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

json scattering_to_json(const ScatteringResult& res) {
  json j;
  j["p_plus"] = res.p_plus;
  j["q_plus"] = res.q_plus;
  j["v_plus"] = res.v_plus;
  j["fit_residual"] = res.fit_residual;
  j["lax_spectrum"] = res.lax_spectrum;
  j["spectrum_match_error"] = res.spectrum_match_error;
  j["min_final_gap"] = std::isfinite(res.min_final_gap) ? json(res.min_final_gap) : json(nullptr);
  j["weyl_order_preserved"] = res.weyl_order_preserved;
  j["asymptotic_form"] = res.asymptotic_form;
  return j;
}

}  // namespace rslab
