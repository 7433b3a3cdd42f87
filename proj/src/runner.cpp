#include "grasslag/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <ostream>
#include <vector>

#include "grasslag/quotient.hpp"
#include "grasslag/reallocus.hpp"
#include "grasslag/rng.hpp"

namespace grasslag {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Stopwatch {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

json config_echo(const RunConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  j["coefficients"] = cfg.cv.str();
  j["n"] = cfg.n;
  j["seed"] = cfg.seed;
  j["starts"] = cfg.starts;
  j["tol_scale"] = cfg.tol_scale;
  j["m_fiber"] = cfg.m_fiber;
  return j;
}

std::ofstream open_out(const RunConfig& cfg, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::ofstream f(fs::path(cfg.out_dir) / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + name + " under " + cfg.out_dir);
  return f;
}

void write_report(const RunConfig& cfg, const json& j) {
  auto f = open_out(cfg, "report.json");
  f << j.dump(2) << "\n";
}

void write_locus_csv(const RunConfig& cfg, const std::string& name,
                     const std::vector<RealLocusPoint>& pts) {
  auto f = open_out(cfg, name);
  f << "eta0,eta1,eta2,eta3,eta4,eta5\n";
  for (const auto& p : pts) {
    for (int t = 0; t < 6; ++t) f << (t ? "," : "") << fmt(p.eta[t]);
    f << "\n";
  }
}

void write_records(const RunConfig& cfg, const std::vector<RealLocusPoint>& pts) {
  auto f = open_out(cfg, "records.jsonl");
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    json r;
    r["row"] = i;
    r["u"] = p.u;
    r["up"] = p.up;
    r["eta"] = p.eta;
    r["p_residual"] = p.p_residual;
    r["n_residual"] = p.n_residual;
    f << r.dump() << "\n";
  }
}

json check_block(const std::string& name, double worst, double tol) {
  json j;
  j["check"] = name;
  j["worst"] = worst;
  j["tolerance"] = tol;
  j["pass"] = (worst <= tol);
  return j;
}

void log_check(std::ostream& log, const json& block) {
  log << (block["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") << block["check"].get<std::string>()
      << ": worst " << fmt(block["worst"].get<double>()) << " (tol "
      << fmt(block["tolerance"].get<double>()) << ")\n";
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);

  auto trim = [](std::string s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };

  std::map<std::string, std::string> kv;
  std::string line;
  size_t lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (!kv.emplace(key, val).second)
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
  }

  auto parse_u64 = [](const std::string& key, const std::string& val) -> uint64_t {
    if (val.empty() || val[0] == '-') throw ConfigError(key + " must be a nonnegative integer");
    size_t pos = 0;
    uint64_t x;
    try {
      x = std::stoull(val, &pos);
    } catch (const std::exception&) {
      throw ConfigError(key + " must be a nonnegative integer, got '" + val + "'");
    }
    if (pos != val.size()) throw ConfigError(key + " must be a nonnegative integer, got '" + val + "'");
    return x;
  };

  RunConfig cfg;
  std::array<std::string, 6> coeff;
  int have = 0;
  for (const auto& [key, val] : kv) {
    if (key.size() == 2 && key[0] == 'c' && key[1] >= '0' && key[1] <= '5') {
      coeff[key[1] - '0'] = val;
      ++have;
    } else if (key == "n") {
      cfg.n = parse_u64(key, val);
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, val);
    } else if (key == "starts") {
      cfg.starts = parse_u64(key, val);
    } else if (key == "m_fiber") {
      cfg.m_fiber = parse_u64(key, val);
    } else if (key == "tol_scale") {
      size_t pos = 0;
      double x;
      try {
        x = std::stod(val, &pos);
      } catch (const std::exception&) {
        throw ConfigError("tol_scale must be a positive number, got '" + val + "'");
      }
      if (pos != val.size() || !(x > 0.0))
        throw ConfigError("tol_scale must be a positive number, got '" + val + "'");
      cfg.tol_scale = x;
    } else if (key == "out") {
      cfg.out_dir = val;
    } else {
      throw ConfigError("unknown key: " + key);
    }
  }
  if (have != 6) throw ConfigError("config file must define all of c0..c5");
  try {
    cfg.cv = CoefficientVector::from_strings(coeff);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad coefficients: ") + e.what());
  }
  cfg.preset = "custom";
  return cfg;
}

int cmd_atlas_check(std::ostream& log, const RunConfig& cfg, bool corrupt_transition) {
  Stopwatch sw;
  AtlasJacobianReport rep = verify_transition_jacobians(corrupt_transition);
  json ids = json::array();
  size_t passed = 0;
  for (const auto& id : rep.identities) {
    json e;
    e["name"] = id.name;
    e["pass"] = id.pass;
    e["determinant"] = id.lhs;
    e["expected"] = id.rhs;
    ids.push_back(e);
    if (id.pass)
      ++passed;
    else
      log << "[FAIL] " << id.name << "\n";
  }
  log << "atlas-check: " << passed << "/" << rep.identities.size()
      << " determinant identities hold\n";
  json j;
  j["command"] = "atlas-check";
  j["identities"] = ids;
  j["pass"] = rep.all_pass;
  j["elapsed_seconds"] = sw.seconds();
  write_report(cfg, j);
  return rep.all_pass ? 0 : 1;
}

int cmd_smoothness(std::ostream& log, const RunConfig& cfg) {
  if (cfg.starts == 0) throw ConfigError("starts must be at least 1");
  Stopwatch sw;
  json charts = json::array();
  size_t total = 0;
  for (int t = 0; t < 6; ++t) {
    auto [a, b] = pair_from_index(t);
    Chart ch{a, b};
    SmoothnessReport rep = smoothness_search(cfg.cv, ch, cfg.starts, cfg.seed);
    total += rep.witnesses.size();
    json ws = json::array();
    for (const auto& w : rep.witnesses) {
      json z = json::array();
      for (const auto& c : w.zeta) z.push_back(json::array({c.real(), c.imag()}));
      json e;
      e["start"] = w.start_index;
      e["zeta"] = z;
      e["residual"] = w.residual;
      ws.push_back(e);
    }
    json c;
    c["chart"] = ch.name();
    c["starts"] = rep.starts;
    c["witness_count"] = rep.witnesses.size();
    c["witnesses"] = ws;
    c["min_residual"] = rep.min_residual;
    c["p25_residual"] = rep.p25_residual;
    c["median_residual"] = rep.median_residual;
    charts.push_back(c);
    log << "smoothness " << ch.name() << ": " << rep.witnesses.size() << " witnesses in "
        << rep.starts << " starts, min residual " << fmt(rep.min_residual) << "\n";
  }
  json j;
  j["command"] = "smoothness";
  j["config"] = config_echo(cfg);
  j["charts"] = charts;
  j["witness_total"] = total;
  j["pass"] = (total == 0);
  j["conclusion"] =
      total == 0 ? "no joint zero of the equation and its gradient was found over the sampled "
                   "starts; evidence of smoothness, not a proof"
                 : "joint zeros found: singular chart points exist";
  j["elapsed_seconds"] = sw.seconds();
  write_report(cfg, j);
  return total == 0 ? 0 : 1;
}

int cmd_sample(std::ostream& log, const RunConfig& cfg) {
  if (cfg.n == 0) throw ConfigError("n must be at least 1");
  Stopwatch sw;
  LocusSplit direct = LocusSplit::direct(cfg.cv);
  SampleResult res = sample_locus(direct, cfg.n, cfg.seed);
  write_locus_csv(cfg, "locus.csv", res.points);
  write_records(cfg, res.points);

  double worst_p = 0.0, worst_n = 0.0;
  for (const auto& p : res.points) {
    worst_p = std::max(worst_p, p.p_residual);
    worst_n = std::max(worst_n, p.n_residual);
  }
  log << "sample: " << res.points.size() << "/" << cfg.n << " points, worst residuals "
      << fmt(worst_p) << " / " << fmt(worst_n) << "\n";

  json j;
  j["command"] = "sample";
  j["config"] = config_echo(cfg);
  j["points"] = res.points.size();
  j["failed_indices"] = res.failed_indices;
  j["max_p_residual"] = worst_p;
  j["max_n_residual"] = worst_n;

  bool ok = res.failed_indices.empty();
  if (cfg.cv == CoefficientVector::preset("eq8")) {
    LocusSplit alt = LocusSplit::alternate(cfg.cv);
    SampleResult ares = sample_locus(alt, cfg.n, cfg.seed ^ 0x9e3779b97f4a7c15ull);
    write_locus_csv(cfg, "locus_alt.csv", ares.points);
    double rescaled_worst = 0.0;
    for (const auto& p : ares.points) {
      double pd = eval_split_side(direct.pos, p.eta);
      double g = std::pow(pd, -1.0 / 8.0);
      std::array<double, 4> u2 = p.u, up2 = p.up;
      for (int i = 0; i < 4; ++i) {
        u2[i] *= g;
        up2[i] *= g;
      }
      auto eta2 = pluecker(Frame<double>{u2, up2});
      auto [rp, rn] = locus_residuals(direct, eta2);
      rescaled_worst = std::max({rescaled_worst, rp, rn});
    }
    json aj;
    aj["points"] = ares.points.size();
    aj["failed_indices"] = ares.failed_indices;
    aj["rescaled_max_residual"] = rescaled_worst;
    aj["note"] =
        "every alternate-normalized point rescales onto the direct locus (the defining "
        "polynomial vanishes on both), so the two normalizations cut out the same set of "
        "planes; sampled independently, no equivalence of measures is claimed";
    j["alternate_split"] = aj;
    ok = ok && ares.failed_indices.empty();
    log << "sample (alternate split): " << ares.points.size() << "/" << cfg.n
        << " points, rescaled worst residual " << fmt(rescaled_worst) << "\n";
  }

  j["pass"] = ok;
  j["elapsed_seconds"] = sw.seconds();
  write_report(cfg, j);
  return ok ? 0 : 2;
}

int cmd_verify(std::ostream& log, const RunConfig& cfg, const VerifyHooks& hooks) {
  if (cfg.n == 0) throw ConfigError("n must be at least 1");
  Stopwatch sw;
  const double ts = cfg.tol_scale;
  LocusSplit split = LocusSplit::direct(cfg.cv);
  SampleResult res = sample_locus(split, cfg.n, cfg.seed);
  if (!res.failed_indices.empty()) {
    json j;
    j["command"] = "verify";
    j["config"] = config_echo(cfg);
    j["failed_indices"] = res.failed_indices;
    j["pass"] = false;
    j["error"] = "sampler did not converge on all indices";
    write_report(cfg, j);
    log << "verify: sampler failed on " << res.failed_indices.size() << " indices\n";
    return 2;
  }

  std::vector<RealLocusPoint> pts = res.points;
  if (hooks.inject_off_locus && !pts.empty()) {
    pts[0].u[0] += 1e-3;
    pts[0].eta = pluecker(Frame<double>{pts[0].u, pts[0].up});
    log << "verify: off-locus corruption injected into point 0\n";
  }

  double worst_locus = 0.0, worst_rank = 0.0, worst_tangent = 0.0, worst_symp = 0.0;
  double worst_pivot = 0.0, worst_deviation = 0.0;
  std::vector<double> phases;
  std::vector<std::string> errors;

  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    try {
      auto eta = pluecker(Frame<double>{p.u, p.up});
      auto [rp, rn] = locus_residuals(split, eta);
      worst_locus = std::max({worst_locus, rp, rn});

      SubmersionReport sub = submersion_check(split, p);
      worst_rank = std::max(worst_rank, sub.sigma2 > 0 ? sub.sigma1 / sub.sigma2 : 1e300);

      auto basis = locus_tangent_basis(split, p);
      // residual of the differential on the basis, relative to sigma1
      {
        for (const auto& b : basis) {
          auto d = eta_differential(p, b);
          double jp = 0.0, jn = 0.0;
          for (int t = 0; t < 6; ++t) {
            double e3 = 4.0 * p.eta[t] * p.eta[t] * p.eta[t];
            jp += rat_d(split.pos[t]) * e3 * d[t];
            jn += rat_d(split.neg[t]) * e3 * d[t];
          }
          worst_tangent = std::max(worst_tangent,
                                   std::max(std::abs(jp), std::abs(jn)) / std::max(sub.sigma1, 1e-300));
        }
      }

      worst_symp = std::max(worst_symp, symplectic_residual(p, basis));

      VolumePhase vp = volume_form_phase(cfg.cv, split, p);
      phases.push_back(vp.phase);
      worst_deviation = std::max(worst_deviation, vp.deviation);
      worst_pivot = std::max(worst_pivot, vp.pivot_agreement);
    } catch (const std::exception& e) {
      errors.push_back("point " + std::to_string(i) + ": " + e.what());
    }
  }

  double phase_spread = 0.0;
  if (!phases.empty()) {
    std::vector<double> sorted = phases;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    for (double ph : phases) phase_spread = std::max(phase_spread, std::abs(ph - median));
  }

  // canonical form invariance under frame changes, plus idempotency
  double worst_canon = 0.0, worst_idem = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const auto& p = pts[i];
    try {
      RngStream rng(cfg.seed ^ 0xca11ab1e5eedull, i);
      double a, b, c, d, det;
      do {
        a = rng.gauss();
        b = rng.gauss();
        c = rng.gauss();
        d = rng.gauss();
        det = a * d - b * c;
      } while (std::abs(det) < 0.1);
      Frame<double> moved = frame_action(Frame<double>{p.u, p.up}, a, b, c, d);
      RealLocusPoint c1 = canonicalize(split, p.u, p.up);
      RealLocusPoint c2 = canonicalize(split, moved.u, moved.up);
      for (int t = 0; t < 6; ++t)
        worst_canon = std::max(worst_canon, std::abs(c1.eta[t] - c2.eta[t]));
      RealLocusPoint c3 = canonicalize(split, c1.u, c1.up);
      for (int t = 0; t < 6; ++t)
        worst_idem = std::max(worst_idem, std::abs(c1.eta[t] - c3.eta[t]));
    } catch (const std::exception& e) {
      errors.push_back("canonical form, point " + std::to_string(i) + ": " + e.what());
    }
  }

  // residue agreement across charts, on complex solutions in the overlap
  double worst_residue = 0.0;
  {
    Chart src{0, 1};
    std::array<Chart, 2> targets = {Chart{0, 2}, Chart{2, 3}};
    size_t want = std::min<size_t>(5, std::max<size_t>(1, cfg.n / 40));
    size_t found = 0;
    for (size_t idx = 0; idx < 40 && found < want; ++idx) {
      try {
        HypersurfacePoint hp = solve_on_hypersurface(cfg.cv, src, cfg.seed ^ 0x5e5,
                                                     idx);
        const auto& z = hp.zeta;
        std::complex<double> D = z[0] * z[3] - z[1] * z[2];
        double zmax = 0.0;
        for (const auto& x : z) zmax = std::max(zmax, std::abs(x));
        if (std::abs(z[0]) < 0.35 || std::abs(D) < 0.35 || zmax > 2.5) continue;
        for (Chart tgt : targets)
          worst_residue = std::max(worst_residue, residue_chart_consistency(cfg.cv, hp, tgt));
        ++found;
      } catch (const std::exception&) {
        continue;
      }
    }
    if (found == 0) errors.push_back("no overlap points found for the residue comparison");
  }

  // quotient structure, defined for the (1,1,1,-1,-1,-1) system
  bool eq1 = (cfg.cv == CoefficientVector::preset("eq1"));
  double worst_coset = 0.0, worst_base = 0.0;
  if (eq1) {
    for (size_t i = 0; i < pts.size(); ++i) {
      const auto& p = pts[i];
      try {
        auto [u, v] = uv_split(p.eta);
        Mat3 R = so3_matrix(u, v);
        Quat q = quaternion_lift(R);
        Mat3 Rq = quaternion_rotation(q);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c)
            worst_coset = std::max(worst_coset, std::abs(Rq[r][c] - R[r][c]));
        Quat qk = qmul(q, quat_k());
        Mat3 Rk = quaternion_rotation(qk);
        for (int r = 0; r < 3; ++r) {
          for (int c = 0; c < 3; ++c) {
            double expect = c < 2 ? -R[r][c] : R[r][c];
            worst_coset = std::max(worst_coset, std::abs(Rk[r][c] - expect));
          }
        }
        worst_coset = std::max(worst_coset, coset_distance(z4_coset(q), z4_coset(qk)));
        BundleCheck bc = bundle_projection_consistency(p);
        worst_base = std::max({worst_base, bc.base_discrepancy, bc.column_discrepancy});
      } catch (const std::exception& e) {
        errors.push_back("quotient, point " + std::to_string(i) + ": " + e.what());
      }
    }
  }

  json checks = json::array();
  checks.push_back(check_block("locus_residual", worst_locus, 1e-10 * ts));
  checks.push_back(check_block("submersion_condition", worst_rank, 1e8 * ts));
  checks.push_back(check_block("tangent_kernel_residual", worst_tangent, 1e-8 * ts));
  checks.push_back(check_block("symplectic_restriction", worst_symp, 1e-9 * ts));
  checks.push_back(check_block("volume_phase_spread", phase_spread, 1e-6 * ts));
  checks.push_back(check_block("volume_phase_deviation", worst_deviation, 1e-6 * ts));
  checks.push_back(check_block("residue_pivot_agreement", worst_pivot, 1e-8 * ts));
  checks.push_back(check_block("residue_chart_agreement", worst_residue, 1e-8 * ts));
  checks.push_back(check_block("canonical_form_invariance", worst_canon, 1e-9 * ts));
  checks.push_back(check_block("canonical_form_idempotency", worst_idem, 1e-12 * ts));
  if (eq1) {
    checks.push_back(check_block("quaternion_coset_closure", worst_coset, 1e-10 * ts));
    checks.push_back(check_block("base_projection_agreement", worst_base, 1e-9 * ts));
  }

  bool pass = errors.empty();
  for (const auto& c : checks) {
    log_check(log, c);
    if (!c["pass"].get<bool>()) pass = false;
  }
  for (const auto& e : errors) log << "[FAIL] " << e << "\n";

  json j;
  j["command"] = "verify";
  j["config"] = config_echo(cfg);
  j["points"] = pts.size();
  j["checks"] = checks;
  if (!eq1)
    j["quotient"] = "skipped: the rotation-group quotient is defined for the "
                    "(1,1,1,-1,-1,-1) system only";
  j["errors"] = errors;
  j["pass"] = pass;
  j["elapsed_seconds"] = sw.seconds();
  write_report(cfg, j);
  log << "verify: " << (pass ? "all checks passed" : "FAILED") << "\n";
  return pass ? 0 : 1;
}

int cmd_fibration(std::ostream& log, const RunConfig& cfg) {
  if (!(cfg.cv == CoefficientVector::preset("eq1")))
    throw ConfigError("fibration analysis requires the eq1 coefficient system");
  if (cfg.n == 0) throw ConfigError("n must be at least 1");
  if (cfg.m_fiber < 3) throw ConfigError("m_fiber must be at least 3");
  Stopwatch sw;
  const size_t bases = cfg.n, m = cfg.m_fiber;

  std::vector<std::array<double, 3>> w(bases), wp(bases);
  std::vector<std::vector<RealLocusPoint>> fibers(bases);
  std::vector<size_t> failed;
  for (size_t b = 0; b < bases; ++b) {
    bool got = false;
    for (int attempt = 0; attempt < 20 && !got; ++attempt) {
      RngStream rng(cfg.seed ^ 0xf1be5ull, b * 31ull + attempt);
      std::array<double, 3> x, y;
      for (int i = 0; i < 3; ++i) x[i] = rng.gauss();
      for (int i = 0; i < 3; ++i) y[i] = rng.gauss();
      try {
        normalize_base_pair(x, y);
        fibers[b] = fiber_samples(x, y, m);
        w[b] = x;
        wp[b] = y;
        got = true;
      } catch (const std::exception&) {
      }
    }
    if (!got) failed.push_back(b);
  }
  if (!failed.empty()) {
    json j;
    j["command"] = "fibration";
    j["config"] = config_echo(cfg);
    j["failed_bases"] = failed;
    j["pass"] = false;
    write_report(cfg, j);
    log << "fibration: base generation failed for " << failed.size() << " bases\n";
    return 2;
  }

  LocusSplit split = LocusSplit::direct(cfg.cv);
  double worst_locus = 0.0, worst_shared = 0.0, worst_closure = 0.0, worst_coset = 0.0;
  std::vector<std::array<double, 3>> reps(bases);
  for (size_t b = 0; b < bases; ++b) {
    reps[b] = base_projection(fibers[b][0]);
    for (const auto& p : fibers[b]) {
      worst_locus = std::max({worst_locus, p.p_residual, p.n_residual});
      auto bp = base_projection(p);
      double d = 0.0;
      for (int i = 0; i < 3; ++i) d += (bp[i] - reps[b][i]) * (bp[i] - reps[b][i]);
      worst_shared = std::max(worst_shared, std::sqrt(d));
      auto [uu, vv] = uv_split(p.eta);
      auto cs = z4_coset(quaternion_lift(so3_matrix(uu, vv)));
      std::array<Quat, 4> rk;
      for (int i = 0; i < 4; ++i) rk[i] = qmul(cs[i], quat_k());
      worst_coset = std::max(worst_coset, coset_distance(cs, rk));
    }
    RealLocusPoint a = fiber_point(w[b], wp[b], 0.0);
    RealLocusPoint c = fiber_point(w[b], wp[b], 2.0 * 3.14159265358979323846);
    RealLocusPoint ca = canonicalize(split, a.u, a.up);
    RealLocusPoint cc = canonicalize(split, c.u, c.up);
    for (int t = 0; t < 6; ++t)
      worst_closure = std::max(worst_closure, std::abs(ca.eta[t] - cc.eta[t]));
  }
  double min_sep = 1e300;
  for (size_t a = 0; a < bases; ++a)
    for (size_t b = a + 1; b < bases; ++b) {
      double d = 0.0;
      for (int i = 0; i < 3; ++i) d += (reps[a][i] - reps[b][i]) * (reps[a][i] - reps[b][i]);
      min_sep = std::min(min_sep, std::sqrt(d));
    }
  if (bases < 2) min_sep = 1.0;

  {
    auto f = open_out(cfg, "fibers.csv");
    f << "base,theta,x0,x1,x2,x3,xp0,xp1,xp2,xp3\n";
    for (size_t b = 0; b < bases; ++b)
      for (size_t k = 0; k < m; ++k) {
        const auto& p = fibers[b][k];
        double theta = 2.0 * 3.14159265358979323846 * double(k) / double(m);
        f << b << "," << fmt(theta);
        for (int i = 0; i < 4; ++i) f << "," << fmt(p.u[i]);
        for (int i = 0; i < 4; ++i) f << "," << fmt(p.up[i]);
        f << "\n";
      }
  }

  const double ts = cfg.tol_scale;
  json checks = json::array();
  checks.push_back(check_block("fiber_locus_residual", worst_locus, 1e-9 * ts));
  checks.push_back(check_block("fiber_closure", worst_closure, 1e-9 * ts));
  checks.push_back(check_block("fiber_shared_base", worst_shared, 1e-10 * ts));
  checks.push_back(check_block("fiber_coset_closure", worst_coset, 1e-10 * ts));
  checks.push_back(check_block("base_separation_margin", min_sep > 1e-3 ? 0.0 : 1.0, 0.5));

  bool pass = true;
  for (const auto& c : checks) {
    log_check(log, c);
    if (!c["pass"].get<bool>()) pass = false;
  }

  json j;
  j["command"] = "fibration";
  j["config"] = config_echo(cfg);
  j["bases"] = bases;
  j["points_per_fiber"] = m;
  j["checks"] = checks;
  j["min_base_separation"] = min_sep;
  j["pass"] = pass;
  j["elapsed_seconds"] = sw.seconds();
  write_report(cfg, j);
  log << "fibration: " << bases << " fibers of " << m << " points, "
      << (pass ? "all checks passed" : "FAILED") << "\n";
  return pass ? 0 : 1;
}

}  // namespace grasslag
