// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
// Usage: acceptance <configs dir> <scratch dir>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "busemann/diagnostics.hpp"
#include "busemann/evaluators.hpp"
#include "busemann/rng.hpp"
#include "busemann/scenarios.hpp"
#include "config.hpp"

using namespace busemann;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerances.
constexpr double kCroftonRatioTol = 1e-9;
constexpr double kCroftonEmbedTol = 1e-9;
constexpr double kSigmas = 4.0;
constexpr std::uint64_t kCroftonMcBudget = 1'000'000;
constexpr double kCroftonSeconds = 10.0;
constexpr double kIdentityRelTol = 1e-8;
constexpr double kBoundSlack = 1e-12;
constexpr double kCycleTol = 1e-10;
constexpr double kCubeSlack = 1e-10;
constexpr double kChainSlack = 1e-10;
constexpr double kCHighSlack = 1e-12;
constexpr double kCroftonKappaTol = 1e-3;
constexpr double kCroftonDeltaTol = 1e-9;
constexpr double kBaAxisTol = 1e-6;
constexpr double kBaNormalTol = 1e-8;
constexpr double kBaAngleSlack = 1e-12;
constexpr std::uint64_t kAgreementBudget = 100'000;
constexpr double kCalibrationRelWidth = 0.02;
constexpr std::uint64_t kCalibrationBudget = 10'000'000;

constexpr std::uint64_t kSeed = 20240611;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string describe(const Segment& s) {
  std::ostringstream o;
  o << '[';
  for (std::size_t i = 0; i < s.a.dim(); ++i) o << (i ? "," : "") << fmt(s.a[i]);
  o << "]-[";
  for (std::size_t i = 0; i < s.b.dim(); ++i) o << (i ? "," : "") << fmt(s.b[i]);
  o << ']';
  return o.str();
}

int failures = 0;

void verdict(int id, const std::string& title, bool pass, const std::string& detail) {
  std::printf("[%s] C%-2d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SamplingPlan plan_for(std::size_t n) {
  SamplingPlan p;
  p.region = centered_box(n, 0.9);
  p.pair_count = 1000;
  p.cycle_count = 1000;
  p.cube_count = 200;
  p.triple_count = 200;
  p.min_length = 1e-3;
  p.max_length = 0.8;
  p.seed = kSeed;
  return p;
}

struct Case {
  std::string name;
  Scenario scenario;
  DiagnosticsReport report;
};

Scenario from_config(const fs::path& dir, const char* file) {
  return build_scenario(load_config((dir / file).string()));
}

std::vector<Case> build_cases(const fs::path& configs) {
  const BaseMeasure1D lebesgue({}, {{-100.0, 100.0, 1.0}});
  std::vector<Case> cases;
  cases.push_back({"crofton2", build_crofton(2, centered_box(2, 1.0)), {}});
  cases.push_back({"crofton3", build_crofton(3, centered_box(3, 1.0)), {}});
  cases.push_back({"kmw2", from_config(configs, "kmw.json"), {}});
  cases.push_back({"kmw3", build_kmw(graded_lebesgue(3, 2.0, 6, 20.0, 2.0, 1, 2.5e-3), centered_box(3, 1.0)), {}});
  cases.push_back({"ba_lebesgue", build_beurling_ahlfors(lebesgue, centered_box(2, 1.0)), {}});
  cases.push_back({"ba_power", from_config(configs, "ba.json"), {}});
  cases.push_back({"degenerate", from_config(configs, "degenerate.json"), {}});
  for (auto& c : cases) c.report = run_diagnostics(c.scenario.embedding(), plan_for(c.scenario.dim));
  return cases;
}

// ---------------------------------------------------------------------------

void crofton_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario s = build_crofton(2, centered_box(2, 1.0));
  const EmbeddingMap f = s.embedding();
  SamplingPlan p = plan_for(2);
  const auto pairs = sample_pairs(p);
  double ratio_err = 0.0, embed_err = 0.0, worst_z = 0.0;
  std::string witness;
  std::vector<Query> queries;
  for (const auto& seg : pairs) {
    const double len = distance(seg.a, seg.b);
    const double d = seg_mass(*s.measure, seg.a, seg.b, Backend::ClosedForm).value;
    ratio_err = std::max(ratio_err, std::abs(d / len - 2.0 / kPi));
    for (const Point* x : {&seg.a, &seg.b}) {
      const Point fx = f(*x);
      for (std::size_t k = 0; k < 2; ++k) {
        embed_err = std::max(embed_err, std::abs(fx[k] - 0.5 * ((*x)[k] - s.basepoint[k])));
      }
    }
    queries.push_back(SegMassQuery{seg.a, seg.b});
  }
  const auto mc = mc_estimate_batch(*s.measure, queries, kCroftonMcBudget, kSeed);
  bool mc_ok = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double exact = 2.0 / kPi * distance(pairs[i].a, pairs[i].b);
    const double z = std::abs(mc[i].value[0] - exact) / mc[i].std_error[0];
    if (!(z <= kSigmas)) mc_ok = false;
    if (!(z <= worst_z)) {
      worst_z = z;
      witness = describe(pairs[i]);
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = ratio_err <= kCroftonRatioTol && embed_err <= kCroftonEmbedTol && mc_ok && elapsed < kCroftonSeconds;
  verdict(1, "crofton recovery", pass,
          std::to_string(pairs.size()) + " pairs, |d/|dx| - 2/pi| <= " + fmt(ratio_err) + ", |f - (x-o)/2| <= " +
              fmt(embed_err) + ", MC worst z " + fmt(worst_z) + " at " + witness + " (" +
              std::to_string(kCroftonMcBudget) + " samples), " + fmt(elapsed) + " s");
}

void identity_audit(const std::vector<Case>& cases) {
  double worst = 0.0;
  std::string witness = "none";
  std::size_t count = 0;
  for (const auto& c : cases) {
    const EmbeddingMap f = c.scenario.embedding();
    for (const auto& pr : c.report.pairs) {
      const Vec dx = pr.seg.a - pr.seg.b;
      const double target = norm(dx) * pr.transversal;
      const double rel = std::abs(dot(f(pr.seg.a) - f(pr.seg.b), dx) - target) / target;
      ++count;
      if (!(rel <= worst)) {
        worst = rel;
        witness = c.name + " " + describe(pr.seg);
      }
    }
  }
  verdict(2, "identity", worst <= kIdentityRelTol,
          std::to_string(count) + " pairs on " + std::to_string(cases.size()) + " exact scenarios, worst relative error " +
              fmt(worst) + " at " + witness);
}

void lipschitz_and_lower(const std::vector<Case>& cases) {
  double lower = -kInf, upper = -kInf;
  std::string lw = "none", uw = "none";
  for (const auto& c : cases) {
    for (const auto& pr : c.report.pairs) {
      if (!(pr.transversal - pr.fdist <= lower)) {
        lower = pr.transversal - pr.fdist;
        lw = c.name + " " + describe(pr.seg);
      }
      if (!(pr.fdist - pr.mass <= upper)) {
        upper = pr.fdist - pr.mass;
        uw = c.name + " " + describe(pr.seg);
      }
    }
  }
  verdict(3, "lipschitz and lower bounds", lower <= kBoundSlack && upper <= kBoundSlack,
          "max(T - |df|) = " + fmt(lower) + " at " + lw + ", max(|df| - d) = " + fmt(upper) + " at " + uw);
}

void cyclic_monotonicity(const std::vector<Case>& cases) {
  double worst = -kInf;
  std::string witness;
  for (const auto& c : cases) {
    if (!(c.report.cycles.worst_normalized <= worst)) {
      worst = c.report.cycles.worst_normalized;
      witness = c.name + " (" + std::to_string(c.report.cycles.witness.size()) + "-cycle)";
    }
  }
  verdict(4, "cyclic monotonicity", worst <= kCycleTol,
          "1000 cycles per scenario, max sum/scale " + fmt(worst) + " in " + witness);
}

void cube_lemma(const std::vector<Case>& cases) {
  double margin = kInf;
  std::string witness;
  for (const auto& c : cases) {
    const double n = static_cast<double>(c.scenario.dim);
    const double bound = std::pow(4.0, -n) / std::sqrt(n);
    const double m = c.report.cubes.worst_ratio - bound;
    if (!(m >= margin)) {
      margin = m;
      witness = c.name + " ratio " + fmt(c.report.cubes.worst_ratio) + " vs " + fmt(bound);
    }
  }
  verdict(5, "cube lemma", margin >= -kCubeSlack, "200 cubes per scenario, tightest " + witness);
}

void transversality_chain(const std::vector<Case>& cases) {
  bool pass = true;
  std::string detail, failure;
  for (const auto& c : cases) {
    const DiagnosticsReport& r = c.report;
    const double kappa = r.kappa.value, tau = r.tau.value;
    std::vector<std::string> bad;
    if (!(kappa >= tau * std::sin(tau) - kChainSlack)) bad.push_back("kappa < tau sin tau");
    for (const auto& pr : r.pairs) {
      if (!(pr.delta >= pr.kappa - kChainSlack)) {
        bad.push_back("delta < kappa at " + describe(pr.seg));
        break;
      }
    }
    if (!(r.bilip.c_low >= kappa - kChainSlack)) bad.push_back("cLow < kappa");
    if (!(r.bilip.c_high <= 1.0 + kCHighSlack)) bad.push_back("cHigh > 1");
    if (c.name == "crofton2") {
      if (!(std::abs(kappa - kPi / 4) <= kCroftonKappaTol)) bad.push_back("kappa != pi/4");
      if (!(std::abs(r.delta.value - 1.0) <= kCroftonDeltaTol)) bad.push_back("delta != 1");
      if (!(std::abs(r.bilip.c_low - kPi / 4) <= kCroftonKappaTol)) bad.push_back("cLow != pi/4");
      if (!(std::abs(r.bilip.c_high - kPi / 4) <= kCroftonKappaTol)) bad.push_back("cHigh != pi/4");
    }
    detail += (detail.empty() ? "" : "; ") + c.name + " kappa " + fmt(kappa) + " tau " + fmt(tau) + " delta " +
              fmt(r.delta.value) + " c " + fmt(r.bilip.c_low) + ".." + fmt(r.bilip.c_high);
    for (const auto& b : bad) failure += " [" + c.name + ": " + b + "]";
    pass = pass && bad.empty();
  }
  verdict(6, "transversality chain", pass, detail + failure);
}

void beurling_ahlfors(const std::vector<Case>& cases) {
  bool pass = true;
  std::string detail;
  for (const char* name : {"ba_lebesgue", "ba_power"}) {
    const auto it = std::find_if(cases.begin(), cases.end(), [&](const Case& c) { return c.name == name; });
    const Scenario& s = it->scenario;
    const auto* pd = s.measure->position_direction();
    const BaseMeasure1D& mu = pd->mu.lines().front().measure;
    const EmbeddingMap f = s.embedding();
    Rng rng = Rng(kSeed).split(7);
    double axis = 0.0, normal = 0.0;
    for (int k = 0; k < 200; ++k) {
      double a = rng.uniform(-0.9, 0.9), b = rng.uniform(-0.9, 0.9);
      if (a > b) std::swap(a, b);
      const Vec df = f(Point{b, 0.0}) - f(Point{a, 0.0});
      axis = std::max(axis, std::abs(df[0] - mu.mass(a, b)));
      normal = std::max(normal, std::abs(df[1]));
    }
    double min_alpha = kInf;
    for (const auto& h : sample_hyperplanes(*s.measure, 2000, kSeed)) {
      min_alpha = std::min(min_alpha, alpha(Vec{1.0, 0.0}, h.plane));
    }
    const double delta = it->report.delta.value;
    const bool ok = axis <= kBaAxisTol && normal <= kBaNormalTol && min_alpha >= kPi / 3 - kBaAngleSlack && delta > 0.0;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + " |df.e1 - mu| " + fmt(axis) + " |df.e2| " +
              fmt(normal) + " min alpha " + fmt(min_alpha) + " delta " + fmt(delta);
  }
  verdict(7, "beurling-ahlfors", pass, detail);
}

void backend_agreement(const std::vector<Case>& cases) {
  double worst = 0.0;
  std::string witness = "none";
  std::size_t compared = 0;
  for (const auto& c : cases) {
    SamplingPlan p = plan_for(c.scenario.dim);
    p.pair_count = 100;
    p.min_length = 0.1;
    p.max_length = 0.8;
    const auto segs = sample_pairs(p);
    const HyperplaneMeasure& nu = *c.scenario.measure;
    const Backend b = c.scenario.backend();
    const Point& o = c.scenario.basepoint;
    std::vector<Query> queries;
    std::vector<std::vector<double>> exact;
    std::vector<std::string> labels;
    for (const auto& seg : segs) {
      queries.push_back(SegMassQuery{seg.a, seg.b});
      exact.push_back({seg_mass(nu, seg.a, seg.b, b).value});
      labels.push_back("d " + describe(seg));
      queries.push_back(TransversalQuery{seg.a, seg.b});
      exact.push_back({transversal_integral(nu, seg.a, seg.b, b).value});
      labels.push_back("T " + describe(seg));
      queries.push_back(EmbedQuery{o, seg.a});
      exact.push_back(embed(nu, o, seg.a, b).value.data());
      labels.push_back("f " + describe(seg));
    }
    const auto mc = mc_estimate_batch(nu, queries, kAgreementBudget, kSeed);
    for (std::size_t i = 0; i < queries.size(); ++i) {
      for (std::size_t k = 0; k < exact[i].size(); ++k) {
        const double gap = std::abs(mc[i].value[k] - exact[i][k]);
        const double z = gap == 0.0 ? 0.0 : gap / mc[i].std_error[k];
        ++compared;
        if (!(z <= worst)) {
          worst = z;
          witness = c.name + " " + labels[i] + " exact " + fmt(exact[i][k]) + " mc " + fmt(mc[i].value[k]) + " +- " +
                    fmt(mc[i].std_error[k]);
        }
      }
    }
  }
  verdict(8, "backend agreement", worst <= kSigmas,
          std::to_string(compared) + " comparisons (100 segments per scenario, " + std::to_string(kAgreementBudget) +
              " samples), worst z " + fmt(worst) + " at " + witness);
}

void degeneracy_sweep(const fs::path& configs) {
  RunConfig cfg = load_config((configs / "degenerate.json").string());
  SamplingPlan p = plan_for(2);
  p.pair_count = 300;
  std::vector<double> kappas, lows;
  std::string detail;
  for (double theta0 : {kPi / 2, 0.4, 0.2, 0.1, 0.05}) {
    cfg.scenario.theta0 = theta0;
    const Scenario s = build_scenario(cfg);
    const auto pairs = evaluate_pairs(s.embedding(), sample_pairs(p), 0, p.seed);
    kappas.push_back(kappa_hat(pairs).value);
    lows.push_back(bilip_bounds(pairs).c_low);
    detail += (detail.empty() ? "" : "; ") + std::string("theta0 ") + fmt(theta0) + " kappa " + fmt(kappas.back()) +
              " cLow " + fmt(lows.back());
  }
  bool pass = true;
  for (std::size_t i = 1; i < kappas.size(); ++i) pass = pass && kappas[i] < kappas[i - 1] && lows[i] < lows[i - 1];
  verdict(9, "degeneracy sweep", pass, detail);
}

void calibration() {
  const KmwConstant a = calibrate_kmw_constant(2, kCalibrationBudget, kSeed);
  const KmwConstant b = calibrate_kmw_constant(2, kCalibrationBudget, kSeed);
  bool same = a.value == b.value && a.half_width == b.half_width && a.fits.size() == b.fits.size();
  for (std::size_t i = 0; same && i < a.fits.size(); ++i) {
    same = a.fits[i].value == b.fits[i].value && a.fits[i].std_error == b.fits[i].std_error;
  }
  const bool pass = a.half_width <= kCalibrationRelWidth * a.value && a.independence_checked && a.consistent && same;
  verdict(10, "calibration", pass,
          "C(2) = " + fmt(a.value) + " +- " + fmt(a.half_width) + " (" + fmt(100 * a.half_width / a.value) +
              "%), independence " + (a.independence_checked ? (a.consistent ? "passed" : "failed") : "unchecked") +
              ", rerun " + (same ? "bit-identical" : "differs"));
}

void determinism(const fs::path& configs, const fs::path& scratch) {
  bool pass = true;
  std::string detail;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(configs)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    const RunConfig cfg = load_config(file.string());
    const std::string stem = file.stem().string();
    const RunOutcome a = run_config(cfg, (scratch / (stem + "_a")).string());
    const RunOutcome b = run_config(cfg, (scratch / (stem + "_b")).string());
    const bool same = report_json_block(read_file(a.report_path)) == report_json_block(read_file(b.report_path));
    pass = pass && same;
    detail += (detail.empty() ? "" : ", ") + file.filename().string() + (same ? " identical" : " DIFFERS");
  }
  verdict(11, "determinism", pass && !files.empty(), detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <configs dir> <scratch dir>\n", argv[0]);
    return 2;
  }
  const fs::path configs = argv[1], scratch = argv[2];
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  try {
    crofton_recovery();
    const std::vector<Case> cases = build_cases(configs);
    identity_audit(cases);
    lipschitz_and_lower(cases);
    cyclic_monotonicity(cases);
    cube_lemma(cases);
    transversality_chain(cases);
    beurling_ahlfors(cases);
    backend_agreement(cases);
    degeneracy_sweep(configs);
    calibration();
    determinism(configs, scratch);
  } catch (const std::exception& e) {
    std::printf("[FAIL] aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
