#include <cmath>
#include <cstdio>
#include <filesystem>

#include "busemann/rng.hpp"
#include "config.hpp"
#include "json.hpp"

namespace busemann {

using nlohmann::ordered_json;

namespace {

constexpr const char* kBegin = "----- BEGIN JSON -----";
constexpr const char* kEnd = "----- END JSON -----";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(fmt(v)); }

ordered_json point(const Point& p) {
  ordered_json a = ordered_json::array();
  for (std::size_t i = 0; i < p.dim(); ++i) a.push_back(num(p[i]));
  return a;
}

ordered_json segment(const Segment& s) {
  if (s.a.dim() == 0) return nullptr;
  return ordered_json::array({point(s.a), point(s.b)});
}

ordered_json witness(const ScalarWitness& w) { return {{"value", num(w.value)}, {"witness", segment(w.witness)}}; }

ordered_json envelope(const EtaEnvelope& e) {
  ordered_json b = ordered_json::array();
  for (const auto& k : e.buckets) {
    b.push_back({{"tLo", num(k.t_lo)}, {"tHi", num(k.t_hi)}, {"count", k.count}, {"maxRatio", num(k.max_ratio)}});
  }
  return {{"buckets", b}, {"skipped", e.skipped}};
}

std::string join_path(const std::string& dir, const std::string& file) {
  namespace fs = std::filesystem;
  const fs::path p(file);
  if (p.is_absolute() || dir.empty()) return p.string();
  return (fs::path(dir) / p).string();
}

ordered_json calibration_json(const KmwConstant& c) {
  ordered_json fits = ordered_json::array();
  for (const auto& f : c.fits) {
    fits.push_back({{"radius", num(f.radius)}, {"value", num(f.value)}, {"stdError", num(f.std_error)}});
  }
  return {{"dim", c.dim},
          {"value", num(c.value)},
          {"halfWidth", num(c.half_width)},
          {"stdError", num(c.std_error)},
          {"provenance", c.provenance == KmwConstant::Provenance::Oracle ? "oracle" : "analytic"},
          {"consistent", c.consistent},
          {"independenceChecked", c.independence_checked},
          {"lowSampleWarning", c.low_sample_warning},
          {"budget", c.budget},
          {"seed", c.seed},
          {"fits", fits}};
}

std::string text_report(const Scenario& s, const RunConfig& cfg, const ValidationReport& v,
                        const DiagnosticsReport& d, const std::vector<Audit>& audits, bool passed) {
  std::string t;
  auto line = [&](const std::string& k, const std::string& val) { t += k + ": " + val + "\n"; };
  line("scenario", s.name);
  line("dim", std::to_string(s.dim));
  line("backend", backend_name(d.backend));
  line("seed", std::to_string(cfg.seed));
  line("transverse", tristate_name(s.transverse));
  for (const auto& n : s.notes) line("note", n);
  line("admissibility", v.no_violation_found() ? "no violation found" : "violation found");
  line("kappaHat", fmt(d.kappa.value));
  line("tauHat", fmt(d.tau.value));
  line("deltaHat", fmt(d.delta.value));
  line("cLow", fmt(d.bilip.c_low));
  line("cHigh", fmt(d.bilip.c_high));
  line("cubeRatio", fmt(d.cubes.worst_ratio) + " (bound " + fmt(d.cubes.bound) + ")");
  line("cycleWorst", fmt(d.cycles.worst_normalized));
  t += "audits:\n";
  for (const auto& a : audits) {
    t += std::string("  ") + (a.passed ? "PASS " : "FAIL ") + a.name + " value=" + fmt(a.value) +
         " threshold=" + fmt(a.threshold) + (a.detail.empty() ? "" : " " + a.detail) + "\n";
  }
  line("result", passed ? "PASS" : "FAIL");
  return t;
}

}  // namespace

std::string report_json_block(const std::string& text) {
  const auto b = text.find(kBegin);
  const auto e = text.find(kEnd);
  if (b == std::string::npos || e == std::string::npos || e < b) throw ConfigError("report has no JSON block");
  const auto start = b + std::string(kBegin).size() + 1;
  return text.substr(start, e - start);
}

RunOutcome run_config(const RunConfig& cfg, const std::string& out_dir) {
  const Scenario s = build_scenario(cfg);
  const Backend backend = cfg.backend.value_or(s.backend());
  const McOptions mc{cfg.plan.mc_budget, Rng(cfg.seed).split(11).next()};
  const EmbeddingMap f(s.measure, s.basepoint, backend, mc);

  std::vector<Audit> audits;

  ValidationPlan vp;
  vp.min_length = cfg.plan.min_length;
  vp.max_length = cfg.plan.max_length;
  vp.seed = Rng(cfg.seed).split(12).next();
  const ValidationReport v = validate(*s.measure, cfg.plan.region, vp);
  {
    Audit a{"admissibility", v.no_violation_found(), v.min_segment_mass, 0.0, ""};
    a.detail = "max point mass " + fmt(v.max_point_mass) + ", region mass " + fmt(v.region_mass);
    if (!v.point_violations.empty()) a.detail += ", atom-through-point violations " + std::to_string(v.point_violations.size());
    audits.push_back(a);
  }

  DiagnosticsReport d;
  d.backend = backend;
  try {
    d = run_diagnostics(f, cfg.plan);
    audits.insert(audits.end(), d.audits.begin(), d.audits.end());
  } catch (const Error& e) {
    audits.push_back({"diagnostics", false, 0.0, 0.0, e.what()});
  }

  if (cfg.kappa_min) {
    Audit a{"expect_kappa_min", d.kappa.value >= *cfg.kappa_min, d.kappa.value, *cfg.kappa_min, ""};
    if (d.kappa.witness.a.dim() > 0) {
      a.detail = "witness [" + fmt(d.kappa.witness.a[0]);
      for (std::size_t i = 1; i < s.dim; ++i) a.detail += "," + fmt(d.kappa.witness.a[i]);
      a.detail += "]-[" + fmt(d.kappa.witness.b[0]);
      for (std::size_t i = 1; i < s.dim; ++i) a.detail += "," + fmt(d.kappa.witness.b[i]);
      a.detail += "]";
    }
    audits.push_back(a);
  }

  ordered_json cal = nullptr;
  if (cfg.calibration) {
    const KmwConstant c = read_calibration(*cfg.calibration);
    if (c.dim != s.dim) throw ConfigError("calibration file is for dimension " + std::to_string(c.dim));
    const double analytic = kmw_constant_analytic(s.dim);
    const double gap = std::abs(c.value - analytic);
    const double tol = 4.0 * c.std_error;
    audits.push_back({"calibration_consistency", c.consistent && gap <= tol, gap, tol,
                      "oracle " + fmt(c.value) + " vs analytic " + fmt(analytic)});
    cal = calibration_json(c);
  }

  bool passed = true;
  for (const auto& a : audits) passed = passed && a.passed;

  ordered_json j;
  j["scenario"] = s.name;
  j["dim"] = s.dim;
  j["backend"] = backend_name(backend);
  j["seed"] = cfg.seed;
  j["transverse"] = tristate_name(s.transverse);
  j["notes"] = s.notes;
  j["admissibility"] = {{"noViolationFound", v.no_violation_found()},
                        {"maxPointMass", num(v.max_point_mass)},
                        {"minSegmentMass", num(v.min_segment_mass)},
                        {"minSegmentWitness", segment(v.min_segment_witness)},
                        {"regionMass", num(v.region_mass)},
                        {"regionMassFinite", v.region_mass_finite},
                        {"pointViolations", ordered_json::array()}};
  for (const auto& p : v.point_violations) j["admissibility"]["pointViolations"].push_back(point(p));
  j["kappaHat"] = witness(d.kappa);
  j["tauHat"] = witness(d.tau);
  j["deltaHat"] = witness(d.delta);
  j["bilip"] = {{"cLow", num(d.bilip.c_low)},
                {"cHigh", num(d.bilip.c_high)},
                {"lowWitness", segment(d.bilip.low_witness)},
                {"highWitness", segment(d.bilip.high_witness)}};
  j["eta"] = {{"busemann", envelope(d.eta_busemann)},
              {"euclidean", envelope(d.eta_euclidean)},
              {"identityProbe", envelope(d.id_probe)}};
  ordered_json cyc = ordered_json::array();
  for (const auto& p : d.cycles.witness) cyc.push_back(point(p));
  j["cycles"] = {{"worstNormalized", num(d.cycles.worst_normalized)},
                 {"worstSum", num(d.cycles.worst_sum)},
                 {"worstScale", num(d.cycles.worst_scale)},
                 {"witness", cyc}};
  j["cubes"] = {{"worstRatio", num(d.cubes.worst_ratio)},
                {"bound", num(d.cubes.bound)},
                {"witness", d.cubes.witness ? ordered_json{{"center", point(d.cubes.witness->center)},
                                                           {"edge", num(d.cubes.witness->edge)}}
                                            : ordered_json(nullptr)},
                {"witnessMass", num(d.cubes.witness_mass)},
                {"witnessDiameter", num(d.cubes.witness_diameter)},
                {"massBackend", backend_name(d.cubes.mass_backend)}};
  ordered_json pairs = ordered_json::array();
  for (const auto& p : d.pairs) {
    pairs.push_back({{"segment", segment(p.seg)},
                     {"mass", num(p.mass)},
                     {"massSe", num(p.mass_se)},
                     {"transversal", num(p.transversal)},
                     {"transversalSe", num(p.transversal_se)},
                     {"inner", num(p.inner)},
                     {"fdist", num(p.fdist)},
                     {"fdistSe", num(p.fdist_se)},
                     {"kappa", num(p.kappa)},
                     {"delta", num(p.delta)},
                     {"ratio", num(p.ratio)}});
  }
  j["pairs"] = pairs;
  ordered_json aj = ordered_json::array();
  for (const auto& a : audits) {
    aj.push_back({{"name", a.name}, {"passed", a.passed}, {"value", num(a.value)}, {"threshold", num(a.threshold)},
                  {"detail", a.detail}});
  }
  j["audits"] = aj;
  j["calibration"] = cal;
  j["passed"] = passed;

  RunOutcome out;
  out.report_json = j.dump(2);
  out.report = text_report(s, cfg, v, d, audits, passed) + kBegin + "\n" + out.report_json + "\n" + kEnd + "\n";
  out.report_path = join_path(out_dir, cfg.report_path);
  out.exit_code = passed ? 0 : 2;

  std::optional<GridImage> grid;
  if (cfg.grid) {
    try {
      grid = grid_export(s, cfg.grid->resolution, cfg.grid->window.value_or(cfg.plan.region), mc);
    } catch (const Error& e) {
      out.exit_code = 2;
      out.report += std::string("grid export failed: ") + e.what() + "\n";
    }
  }
  write_atomic(out.report_path, out.report);
  if (grid) {
    out.grid_path = join_path(out_dir, cfg.grid->path);
    write_atomic(*out.grid_path, grid_to_csv(*grid));
  }
  return out;
}

CalibrationOutcome run_calibration(std::size_t n, std::uint64_t budget, std::uint64_t seed, const std::string& out_path) {
  CalibrationOutcome out;
  out.constant = calibrate_kmw_constant(n, budget, seed);
  out.text = calibration_json(out.constant).dump(2) + "\n";
  out.exit_code = out.constant.consistent ? 0 : 2;
  if (!out_path.empty()) write_atomic(out_path, out.text);
  return out;
}

KmwConstant read_calibration(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
    KmwConstant c;
    c.dim = j.at("dim").get<std::size_t>();
    c.value = j.at("value").get<double>();
    c.half_width = j.at("halfWidth").get<double>();
    c.std_error = j.at("stdError").get<double>();
    c.provenance = j.at("provenance").get<std::string>() == "oracle" ? KmwConstant::Provenance::Oracle
                                                                    : KmwConstant::Provenance::Analytic;
    c.consistent = j.at("consistent").get<bool>();
    c.independence_checked = j.at("independenceChecked").get<bool>();
    c.low_sample_warning = j.at("lowSampleWarning").get<bool>();
    c.budget = j.at("budget").get<std::uint64_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& f : j.at("fits")) {
      c.fits.push_back({f.at("radius").get<double>(), f.at("value").get<double>(), f.at("stdError").get<double>()});
    }
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("calibration file '" + path + "' is malformed: " + e.what());
  }
}

}  // namespace busemann
