#include "subres/cli.hpp"

#include "subres/asymptotics.hpp"
#include "subres/errors.hpp"
#include "subres/field.hpp"
#include "subres/io.hpp"
#include "subres/resonances.hpp"
#include "subres/spectral.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

namespace subres::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Largest mesh handled with dense storage.
constexpr std::size_t kDenseLimit = 6000;

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ConfigError("unknown key '" + item.key() + "' in " + where);
}

template <class T>
T get(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing key '" + std::string(key) + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("key '" + std::string(key) + "' in " + where + " has the wrong type");
  }
}

template <class T>
void maybe(const json& obj, const char* key, const std::string& where, T& target) {
  if (obj.contains(key)) target = get<T>(obj, key, where);
}

Vec3 vec3(const json& obj, const char* key, const std::string& where) {
  const auto v = get<std::vector<double>>(obj, key, where);
  if (v.size() != 3) throw ConfigError("key '" + std::string(key) + "' in " + where + " needs 3 numbers");
  return {v[0], v[1], v[2]};
}

DomainKind parse_domain(const json& d) {
  const auto kind = get<std::string>(d, "kind", "domain");
  if (kind == "ball") {
    only_keys(d, {"kind", "radius", "resolution"}, "domain");
    BallKind b{1.0, 8};
    maybe(d, "radius", "domain", b.radius);
    maybe(d, "resolution", "domain", b.resolution);
    if (!(b.radius > 0.0)) throw ConfigError("ball radius must be positive");
    if (b.resolution < 4) throw ConfigError("ball resolution must be at least 4");
    return b;
  }
  if (kind == "box") {
    only_keys(d, {"kind", "extents", "resolution"}, "domain");
    BoxKind b{Vec3(1.0, 1.0, 1.0), 8};
    if (d.contains("extents")) b.extents = vec3(d, "extents", "domain");
    maybe(d, "resolution", "domain", b.resolution);
    if (!(b.extents.minCoeff() > 0.0)) throw ConfigError("box extents must be positive");
    if (b.resolution < 1) throw ConfigError("box resolution must be at least 1");
    return b;
  }
  if (kind == "voxels") {
    only_keys(d, {"kind", "path"}, "domain");
    return VoxelKind{get<std::string>(d, "path", "domain")};
  }
  throw ConfigError("unknown domain kind '" + kind + "'");
}

DomainKind with_resolution(const DomainKind& kind, int resolution) {
  if (const auto* b = std::get_if<BallKind>(&kind)) return BallKind{b->radius, resolution};
  if (const auto* b = std::get_if<BoxKind>(&kind)) return BoxKind{b->extents, resolution};
  throw ConfigError("resolutions cannot be combined with a voxel domain");
}

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

struct Outputs {
  std::filesystem::path dir;
  std::vector<std::pair<std::filesystem::path, std::string>> files;
  void add(const std::string& name, std::string contents) { files.emplace_back(dir / name, std::move(contents)); }
  void flush() const {
    for (const auto& [path, contents] : files) io::write_atomic(path, contents);
  }
};

struct Checks {
  std::vector<std::pair<std::string, bool>> lines;
  void add(const std::string& name, bool ok) { lines.emplace_back(name, ok); }
  bool all() const {
    return std::all_of(lines.begin(), lines.end(), [](const auto& l) { return l.second; });
  }
  std::string text() const {
    std::string out;
    for (const auto& [name, ok] : lines) out += std::string(ok ? "PASS " : "FAIL ") + name + '\n';
    return out;
  }
};

SpectralData spectrum_for(const DiscreteDomain& domain, const RunConfig& cfg) {
  if (domain.size() <= kDenseLimit) return eig_newton0(domain, cfg.cluster_tol);
  if (!domain.lattice()) throw ConfigError("mesh too large for dense storage and not on a lattice");
  return eig_newton0_partial(domain, cfg.partial_modes, cfg.cluster_tol);
}

SpectralData dense_spectrum(const DiscreteDomain& domain, const RunConfig& cfg) {
  if (domain.size() > kDenseLimit)
    throw ConfigError("mesh has " + std::to_string(domain.size()) + " cells; resonance work needs <= " +
                      std::to_string(kDenseLimit));
  return eig_newton0(domain, cfg.cluster_tol);
}

std::string eps_tag(std::size_t index) { return std::to_string(index); }

// ---- spectrum ----------------------------------------------------------------

void cmd_spectrum(const RunConfig& cfg, Outputs& out, Checks& checks) {
  std::vector<DomainKind> kinds;
  if (cfg.resolutions.empty()) kinds.push_back(cfg.domain);
  for (int res : cfg.resolutions) kinds.push_back(with_resolution(cfg.domain, res));

  const auto* ball = std::get_if<BallKind>(&cfg.domain);
  std::vector<BallOracleEigenvalue> oracle;
  double oracle_l1 = 0.0;
  if (ball) {
    oracle = ball_oracle(cfg.oracle_l_max, cfg.oracle_n_max);
    const double r2 = ball->radius * ball->radius;
    for (auto& o : oracle) o.lambda *= r2;
    oracle_l1 = oracle.front().lambda;
    out.add("oracle.csv", oracle_csv(oracle));
  }

  std::string table = ball ? "resolution,n,lambda1,oracle_lambda1,rel_error,second_cluster_multiplicity,"
                             "second_cluster_spread\n"
                           : "resolution,n,lambda1,second_cluster_multiplicity,second_cluster_spread\n";
  double prev_err = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  for (const DomainKind& kind : kinds) {
    const DiscreteDomain domain = build_domain(kind);
    const SpectralData s = spectrum_for(domain, cfg);
    const int res = std::visit(
        [](const auto& k) -> int {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, VoxelKind>) return 0;
          else return k.resolution;
        },
        kind);
    out.add("spectrum_" + std::to_string(res) + ".csv", spectrum_csv(s));
    long mult = 0;
    double spread = 0.0;
    if (s.clusters.size() > 1) {
      const Cluster& c = s.clusters[1];
      mult = c.multiplicity();
      spread = (s.eigenvalues[c.begin] - s.eigenvalues[c.end - 1]) / c.lambda;
    }
    table += std::to_string(res) + ',' + std::to_string(domain.size()) + ',' + io::fmt(s.lambda1()) + ',';
    if (ball) {
      const double err = std::abs(s.lambda1() - oracle_l1) / oracle_l1;
      decreasing = decreasing && err < prev_err;
      prev_err = err;
      table += io::fmt(oracle_l1) + ',' + io::fmt(err) + ',';
    }
    table += std::to_string(mult) + ',' + io::fmt(spread) + '\n';
  }
  out.add("convergence.csv", table);
  if (ball && kinds.size() > 1) checks.add("lambda1 error decreases with resolution", decreasing);
}

// ---- resonances --------------------------------------------------------------

ojson constants_json(const LocalizationConstants& c) {
  ojson j;
  j["r"] = c.r;
  j["r_circ"] = c.r_circ;
  j["r_plus"] = c.r_plus;
  j["c_r"] = c.c_r;
  j["eps_max"] = c.eps_max;
  j["volume"] = c.volume;
  j["diameter"] = c.diameter;
  j["lambda1"] = c.lambda1;
  return j;
}

ojson report_json(const LocalizationReport& report) {
  ojson j;
  j["epsilon"] = report.epsilon;
  j["status"] = report.all_pass() ? "pass" : "fail";
  j["disc_radius"] = report.disc_radius;
  ojson entries = ojson::array();
  for (const auto& e : report.entries) {
    ojson x;
    x["kappa_sq"] = complex_json(e.kappa_sq);
    x["assigned_lambda"] = e.assigned_lambda;
    x["distance"] = e.distance;
    x["discs_containing"] = e.discs_containing;
    x["pass"] = e.pass;
    entries.push_back(x);
  }
  j["entries"] = entries;
  return j;
}

ojson localization_entry(const std::vector<ResonanceResult>& found, const LocalizationConstants& constants,
                         double eps, Checks& checks) {
  try {
    const LocalizationReport report = check_localization(found, constants, eps);
    checks.add("localization at eps=" + io::fmt(eps), report.all_pass());
    return report_json(report);
  } catch (const HypothesisNotMet& e) {
    ojson j;
    j["epsilon"] = eps;
    j["status"] = "hypothesis not met";
    j["reason"] = e.what();
    return j;
  }
}

void cmd_resonances(const RunConfig& cfg, Outputs& out, Checks& checks) {
  const DiscreteDomain domain = build_domain(cfg.domain);
  const SpectralData spectral = dense_spectrum(domain, cfg);
  const double r = cfg.r_factor / spectral.lambda1();
  const LocalizationConstants constants = localization_constants(spectral, domain, r);

  std::vector<std::size_t> selected;
  for (std::size_t c = 0; c < spectral.clusters.size(); ++c) {
    const Cluster& cl = spectral.clusters[c];
    if (cl.lambda < spectral.trust_threshold() || 1.0 / cl.lambda > constants.r_plus) continue;
    if (!cfg.clusters.empty() &&
        std::find(cfg.clusters.begin(), cfg.clusters.end(), static_cast<int>(c)) == cfg.clusters.end())
      continue;
    selected.push_back(c);
  }
  for (int c : cfg.clusters)
    if (c < 0 || static_cast<std::size_t>(c) >= spectral.clusters.size())
      throw ConfigError("cluster index " + std::to_string(c) + " out of range");

  ContourOptions copts;
  copts.n_quad = cfg.contour.n_quad;
  copts.max_rank = cfg.contour.max_rank;
  copts.seed = cfg.seed;

  ojson loc;
  loc["mesh"] = domain.describe();
  loc["constants"] = constants_json(constants);
  ojson per_eps = ojson::array();
  std::map<std::size_t, std::vector<std::pair<double, cplx>>> tracked_samples;
  std::map<std::size_t, std::vector<std::pair<double, cplx>>> cluster_samples;

  for (std::size_t ei = 0; ei < cfg.epsilons.size(); ++ei) {
    const double eps = cfg.epsilons[ei];
    std::vector<ResonanceResult> rows, contour_all;
    bool agree = true, counts = true, residual_ok = true;
    for (std::size_t c : selected) {
      const Cluster& cl = spectral.clusters[c];
      const auto tracked = track_cluster(domain, eps, spectral, cl);
      ContourOptions o = copts;
      o.max_rank = std::max<int>(o.max_rank, static_cast<int>(cl.multiplicity()) + 2);
      auto contour = contour_solver(domain, eps, cplx(1.0 / std::sqrt(cl.lambda), 0.0),
                                    contour_radius_for(spectral, c), o);
      for (auto& x : contour) x.seed_lambda = cl.lambda;
      counts = counts && count_with_multiplicity(contour) == cl.multiplicity();
      for (const auto& x : contour) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& t : tracked) best = std::min(best, std::abs(t.kappa - x.kappa));
        agree = agree && best <= 1e-8 * std::max(1.0, std::abs(x.kappa));
      }
      for (const auto& x : tracked) residual_ok = residual_ok && x.residual < 1e-9;
      for (const auto& x : contour) residual_ok = residual_ok && x.residual < 1e-9;
      if (cl.multiplicity() == 1) tracked_samples[c].emplace_back(eps, tracked.front().kappa_sq);
      for (const auto& t : tracked) cluster_samples[c].emplace_back(eps, t.kappa_sq);
      rows.insert(rows.end(), tracked.begin(), tracked.end());
      contour_all.insert(contour_all.end(), contour.begin(), contour.end());
    }
    rows.insert(rows.end(), contour_all.begin(), contour_all.end());
    out.add("resonances_eps" + eps_tag(ei) + ".csv", resonances_csv(rows));
    const std::string at = " at eps=" + io::fmt(eps);
    checks.add("residuals below 1e-9" + at, residual_ok);
    checks.add("contour count equals cluster multiplicity" + at, counts);
    checks.add("newton_track and contour agree to 1e-8" + at, agree);
    per_eps.push_back(localization_entry(contour_all, constants, eps, checks));
  }
  loc["reports"] = per_eps;

  const auto samples = mk0_bound_samples(spectral, cfg.bound_samples, cfg.seed);
  ojson bound = ojson::array();
  bool bound_ok = true;
  for (const auto& s : samples) {
    bound_ok = bound_ok && s.holds();
    bound.push_back({{"kappa_sq", complex_json(s.kappa_sq)}, {"lhs", s.lhs}, {"rhs", s.rhs}});
  }
  loc["bound_samples"] = bound;
  if (!samples.empty()) checks.add("M_kappa(0)^{-1} norm bound on all samples", bound_ok);
  out.add("localization.json", loc.dump(2) + '\n');

  ojson exp = ojson::array();
  for (std::size_t c : selected) {
    const Cluster& cl = spectral.clusters[c];
    const auto preds = predict_first_order(spectral, c);
    ojson e;
    e["cluster"] = c;
    e["lambda"] = cl.lambda;
    e["multiplicity"] = cl.multiplicity();
    ojson pj = ojson::array();
    for (const auto& p : preds)
      pj.push_back({{"coupling_sq", p.coupling_sq}, {"cluster_summed", p.cluster_summed},
                    {"zeroth", p.zeroth}, {"first_coeff", complex_json(p.first_coeff)}});
    e["predictions"] = pj;
    ojson sj = ojson::array();
    for (const auto& [eps, k2] : cluster_samples[c]) sj.push_back({{"epsilon", eps}, {"kappa_sq", complex_json(k2)}});
    e["samples"] = sj;
    const auto& ts = tracked_samples[c];
    std::set<double> distinct;
    for (const auto& s : ts) distinct.insert(s.first);
    if (cl.multiplicity() == 1 && distinct.size() >= 3) {
      const ExpansionFit fit = fit_expansion(ts);
      e["zeroth_fit"] = complex_json(fit.zeroth_fit);
      e["first_fit"] = complex_json(fit.first_fit);
      e["second_fit"] = complex_json(fit.second_fit);
      e["remainder_order"] = fit.remainder_order;
      const cplx pred = preds.front().first_coeff;
      if (std::abs(pred) > 0.0) {
        const double rel = std::abs(fit.first_fit - pred) / std::abs(pred);
        e["first_fit_rel_error"] = rel;
        checks.add("first-order fit within 5% of prediction, cluster " + std::to_string(c), rel <= 0.05);
      }
    }
    exp.push_back(e);
  }
  out.add("expansion.json", exp.dump(2) + '\n');
}

// ---- sweep -------------------------------------------------------------------

ojson peaks_json(const std::vector<Peak>& peaks) {
  ojson a = ojson::array();
  for (const auto& p : peaks) a.push_back({{"kappa_sq", p.kappa_sq}, {"value", p.value}});
  return a;
}

void cmd_sweep(const RunConfig& cfg, Outputs& out, Checks& checks) {
  const DiscreteDomain domain = build_domain(cfg.domain);
  const SweepSettings& sw = cfg.sweep;
  ScatterScenario sc;
  sc.domain = &domain;
  sc.epsilon = sw.epsilon;
  sc.source = sw.source;
  sc.observations = {sw.observation};
  sc.kappa = 1.0;
  // Geometry is validated before any assembly.
  if (!(sw.epsilon > 0.0 && sw.epsilon <= 1.0)) throw ConfigError("sweep epsilon must lie in (0, 1]");
  const double limit = sw.epsilon * domain.circumradius();
  if (!(sw.source.norm() > limit)) throw GeometryError("source point lies inside the scaled inclusion");
  if (!(sw.observation.norm() > limit)) throw GeometryError("observation point lies inside the scaled inclusion");

  const SpectralData spectral = spectrum_for(domain, cfg);
  const double target = 1.0 / spectral.lambda1();
  std::vector<double> grid;
  const double lo = sw.kappa_sq_min_factor * target, hi = sw.kappa_sq_max_factor * target;
  if (sw.points == 1) grid.push_back(lo);
  for (int i = 0; sw.points > 1 && i < sw.points; ++i) grid.push_back(lo + (hi - lo) * i / (sw.points - 1));
  const double step = sw.points > 1 ? (hi - lo) / (sw.points - 1) : 0.0;

  double window = step;
  ojson constants = nullptr;
  try {
    const auto c = localization_constants(spectral, domain, cfg.r_factor / spectral.lambda1());
    window = std::max(step, c.c_r * sw.epsilon);
    constants = constants_json(c);
  } catch (const DomainError&) {
  }

  const SweepResult result = frequency_sweep(sc, grid);
  out.add("sweep.csv", sweep_csv(result));
  ojson j;
  j["epsilon"] = sw.epsilon;
  j["target_kappa_sq"] = target;
  j["grid_step"] = step;
  j["window"] = window;
  j["constants"] = constants;
  j["minv_peaks"] = peaks_json(result.minv_peaks);
  j["field_peaks"] = peaks_json(result.field_peaks);
  out.add("peaks.json", j.dump(2) + '\n');
  if (grid.size() >= 3) {
    checks.add("||M^{-1}|| peak within window of 1/lambda_1",
               !result.minv_peaks.empty() && std::abs(result.minv_peaks.front().kappa_sq - target) <= window);
    checks.add("field peak within window of 1/lambda_1",
               !result.field_peaks.empty() && std::abs(result.field_peaks.front().kappa_sq - target) <= window);
  }
}

// ---- localize ----------------------------------------------------------------

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParseError("bad number '" + s + "'", line);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("bad number '" + s + "'", line);
  }
}

void cmd_localize(const RunConfig& cfg, Outputs& out, Checks& checks) {
  if (cfg.resonances_file.empty()) throw ConfigError("localize needs 'resonances_file'");
  const std::string text = io::read_file(cfg.resonances_file);
  std::map<double, std::vector<ResonanceResult>> by_eps;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 9) throw ParseError("expected 9 columns", lineno);
    ResonanceResult r;
    r.epsilon = to_double(f[0], lineno);
    r.seed_lambda = to_double(f[1], lineno);
    r.kappa = {to_double(f[2], lineno), to_double(f[3], lineno)};
    r.kappa_sq = {to_double(f[4], lineno), to_double(f[5], lineno)};
    r.multiplicity = static_cast<int>(to_double(f[6], lineno));
    r.residual = to_double(f[7], lineno);
    if (f[8] != "contour" && f[8] != "newton_track") throw ParseError("unknown method '" + f[8] + "'", lineno);
    r.method = f[8] == "contour" ? SolverMethod::contour : SolverMethod::newton_track;
    by_eps[r.epsilon].push_back(r);
  }
  const DiscreteDomain domain = build_domain(cfg.domain);
  const SpectralData spectral = dense_spectrum(domain, cfg);
  const LocalizationConstants constants =
      localization_constants(spectral, domain, cfg.r_factor / spectral.lambda1());
  ojson loc;
  loc["mesh"] = domain.describe();
  loc["constants"] = constants_json(constants);
  ojson reports = ojson::array();
  for (const auto& [eps, list] : by_eps) reports.push_back(localization_entry(list, constants, eps, checks));
  loc["reports"] = reports;
  out.add("localization.json", loc.dump(2) + '\n');
}

void cmd_oracle(const RunConfig& cfg, Outputs& out, Checks&) {
  out.add("oracle.csv", oracle_csv(ball_oracle(cfg.oracle_l_max, cfg.oracle_n_max)));
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
  only_keys(root,
            {"schema_version", "domain", "resolutions", "epsilons", "r_factor", "cluster_tol", "clusters",
             "contour", "sweep", "oracle", "partial_modes", "output_dir", "seed", "bound_samples",
             "resonances_file"},
            "config");
  const int version = get<int>(root, "schema_version", "config");
  if (version != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + std::to_string(version));

  RunConfig cfg;
  if (root.contains("domain")) cfg.domain = parse_domain(root.at("domain"));
  maybe(root, "resolutions", "config", cfg.resolutions);
  maybe(root, "epsilons", "config", cfg.epsilons);
  maybe(root, "r_factor", "config", cfg.r_factor);
  maybe(root, "cluster_tol", "config", cfg.cluster_tol);
  maybe(root, "clusters", "config", cfg.clusters);
  maybe(root, "partial_modes", "config", cfg.partial_modes);
  maybe(root, "output_dir", "config", cfg.output_dir);
  maybe(root, "seed", "config", cfg.seed);
  maybe(root, "bound_samples", "config", cfg.bound_samples);
  maybe(root, "resonances_file", "config", cfg.resonances_file);
  if (root.contains("contour")) {
    const json& c = root.at("contour");
    only_keys(c, {"n_quad", "max_rank"}, "contour");
    maybe(c, "n_quad", "contour", cfg.contour.n_quad);
    maybe(c, "max_rank", "contour", cfg.contour.max_rank);
  }
  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    only_keys(s, {"epsilon", "kappa_sq_min_factor", "kappa_sq_max_factor", "points", "source", "observation"},
              "sweep");
    maybe(s, "epsilon", "sweep", cfg.sweep.epsilon);
    maybe(s, "kappa_sq_min_factor", "sweep", cfg.sweep.kappa_sq_min_factor);
    maybe(s, "kappa_sq_max_factor", "sweep", cfg.sweep.kappa_sq_max_factor);
    maybe(s, "points", "sweep", cfg.sweep.points);
    if (s.contains("source")) cfg.sweep.source = vec3(s, "source", "sweep");
    if (s.contains("observation")) cfg.sweep.observation = vec3(s, "observation", "sweep");
  }
  if (root.contains("oracle")) {
    const json& o = root.at("oracle");
    only_keys(o, {"l_max", "n_max"}, "oracle");
    maybe(o, "l_max", "oracle", cfg.oracle_l_max);
    maybe(o, "n_max", "oracle", cfg.oracle_n_max);
  }

  for (int r : cfg.resolutions)
    if (r < 1) throw ConfigError("resolutions must be positive");
  if (cfg.epsilons.empty()) throw ConfigError("epsilons must not be empty");
  for (double e : cfg.epsilons)
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("every epsilon must lie in [0, 1)");
  if (!(cfg.r_factor > 1.0)) throw ConfigError("r_factor must exceed 1 (r > 1/lambda_1)");
  if (!(cfg.cluster_tol > 0.0 && cfg.cluster_tol < 0.1)) throw ConfigError("cluster_tol must lie in (0, 0.1)");
  if (cfg.contour.n_quad < 32) throw ConfigError("contour.n_quad must be >= 32");
  if (cfg.contour.max_rank < 1) throw ConfigError("contour.max_rank must be >= 1");
  if (!(cfg.sweep.epsilon > 0.0 && cfg.sweep.epsilon <= 1.0)) throw ConfigError("sweep.epsilon must lie in (0, 1]");
  if (cfg.sweep.points < 1) throw ConfigError("sweep.points must be >= 1");
  if (!(cfg.sweep.kappa_sq_min_factor > 0.0) || !(cfg.sweep.kappa_sq_max_factor >= cfg.sweep.kappa_sq_min_factor))
    throw ConfigError("sweep factors must satisfy 0 < min <= max");
  if (cfg.sweep.points > 1 && !(cfg.sweep.kappa_sq_max_factor > cfg.sweep.kappa_sq_min_factor))
    throw ConfigError("sweep range is empty");
  if (cfg.oracle_l_max < 0 || cfg.oracle_n_max < 1) throw ConfigError("oracle limits out of range");
  if (cfg.partial_modes < 1) throw ConfigError("partial_modes must be >= 1");
  if (cfg.bound_samples < 0) throw ConfigError("bound_samples must be >= 0");
  if (!cfg.resolutions.empty()) (void)with_resolution(cfg.domain, cfg.resolutions.front());
  return cfg;
}

DiscreteDomain build_domain(const DomainKind& kind) {
  if (const auto* b = std::get_if<BallKind>(&kind)) return make_ball(b->radius, b->resolution);
  if (const auto* b = std::get_if<BoxKind>(&kind)) return make_box(b->extents, b->resolution);
  return load_voxels(std::get<VoxelKind>(kind).path);
}

int run(int argc, char** argv) {
  CLI::App app{"subres: Newton-potential spectra, subwavelength resonances and resolvent sweeps"};
  app.require_subcommand(1);
  std::string config_path, output_dir;
  int threads = 0;
  bool check = false;
  const std::map<std::string, void (*)(const RunConfig&, Outputs&, Checks&)> commands = {
      {"spectrum", cmd_spectrum}, {"resonances", cmd_resonances}, {"sweep", cmd_sweep},
      {"localize", cmd_localize}, {"oracle", cmd_oracle}};
  const std::map<std::string, std::string> help = {
      {"spectrum", "eigenpairs of the Newton operator, oracle comparison and convergence table"},
      {"resonances", "resonances per epsilon, localization report and expansion fit"},
      {"sweep", "real-frequency sweep of the scattered field and ||M^{-1}||"},
      {"localize", "localization check of cached resonances"},
      {"oracle", "analytic unit-ball spectrum"}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("-c,--config", config_path, "JSON config file")->required();
    sub->add_option("-o,--output-dir", output_dir, "output directory (overrides SUBRES_OUTPUT_DIR and config)");
    sub->add_option("-t,--threads", threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--check", check, "exit with code 4 when a check fails");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  try {
    const RunConfig cfg = parse_config(io::read_file(config_path));
    Outputs out;
    out.dir = cfg.output_dir;
    if (const char* env = std::getenv("SUBRES_OUTPUT_DIR"); env && *env) out.dir = env;
    if (!output_dir.empty()) out.dir = output_dir;
    Checks checks;
    const std::string name = app.get_subcommands().front()->get_name();
    commands.at(name)(cfg, out, checks);
    out.add("summary_" + name + ".txt", checks.text());
    out.flush();
    std::cout << checks.text();
    return check && !checks.all() ? 4 : 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const HypothesisNotMet& e) {
    std::cerr << "hypothesis not met: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "output error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace subres::cli
