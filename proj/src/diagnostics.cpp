#include "busemann/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sampling.hpp"

namespace busemann {

namespace {

enum Stream : std::uint64_t { kPairs = 1, kCycles = 2, kCubes = 3, kTriples = 4, kMcPairs = 5, kMcTriples = 6, kMcCubes = 7 };

constexpr int kTauSteps = 157;  // 0.01 * 157 <= pi/2

std::uint64_t derived_seed(std::uint64_t seed, Stream s, std::uint64_t index) {
  return Rng(seed).split(s).split(index).next();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string describe(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.dim(); ++i) s += (i ? ", " : "") + fmt(p[i]);
  return s + ")";
}

std::string describe(const Segment& s) { return "[" + describe(s.a) + ", " + describe(s.b) + "]"; }

double norm_of(const Vec& v) { return norm(v); }

}  // namespace

void SamplingPlan::check(std::size_t dim) const {
  if (region.dim() != dim) throw InvalidArgument("sampling region dimension does not match the measure");
  if (!(min_length > 0.0) || !(max_length >= min_length)) {
    throw InvalidArgument("scale range must satisfy 0 < minLength <= maxLength");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(region.hi[i] - region.lo[i] >= max_length)) {
      throw InvalidArgument("maxLength exceeds the sampling region");
    }
  }
  if (pair_count == 0) throw InvalidArgument("pairCount must be positive");
  if (mc_budget == 0) throw InvalidArgument("Monte Carlo budget must be positive");
}

std::vector<Segment> sample_pairs(const SamplingPlan& plan) {
  Rng rng = Rng(plan.seed).split(kPairs);
  std::vector<Segment> out;
  out.reserve(plan.pair_count);
  for (std::size_t i = 0; i < plan.pair_count; ++i) {
    const double u = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(plan.pair_count);
    out.push_back(detail::sample_segment(rng, plan.region, plan.min_length, plan.max_length, u));
  }
  return out;
}

std::vector<PairRecord> evaluate_pairs(const EmbeddingMap& f, const std::vector<Segment>& pairs,
                                       std::uint64_t mc_budget, std::uint64_t seed) {
  const auto& nu = f.measure();
  const Backend b = f.backend();
  std::vector<PairRecord> out;
  out.reserve(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const McOptions mc{mc_budget, derived_seed(seed, kMcPairs, i)};
    PairRecord r;
    r.seg = pairs[i];
    const Point &x = r.seg.a, &y = r.seg.b;
    const Estimate m = seg_mass(nu, x, y, b, mc);
    const Estimate t = transversal_integral(nu, x, y, b, mc);
    r.mass = m.value;
    r.mass_se = m.std_error;
    r.transversal = t.value;
    r.transversal_se = t.std_error;
    if (!(r.mass > 0.0)) throw DegenerateConfiguration("segment " + describe(r.seg) + " has zero mass");
    const VecEstimate inc = f.increment(x, y);
    const Vec& df = inc.value;
    const Vec dx = x - y;
    r.fdist = norm_of(df);
    r.fdist_se = norm_of(inc.std_error);
    if (b != Backend::MonteCarlo) {
      const Point fx = f(x), fy = f(y);
      const double scale = norm(fx) + norm(fy);
      r.cocycle_gap = scale > 0.0 ? norm_of((fx - fy) - df) / scale : 0.0;
    }
    if (!(r.fdist > 0.0)) throw DegenerateConfiguration("embedding is not injective on " + describe(r.seg));
    r.inner = dot(df, dx);
    r.kappa = r.transversal / r.mass;
    r.delta = r.inner / (r.fdist * norm(dx));
    r.ratio = r.fdist / r.mass;
    out.push_back(std::move(r));
  }
  return out;
}

ScalarWitness kappa_hat(const std::vector<PairRecord>& pairs) {
  ScalarWitness w{kInf, {}};
  for (const auto& p : pairs) {
    if (p.kappa < w.value) w = {p.kappa, p.seg};
  }
  return w;
}

ScalarWitness kappa_hat(const HyperplaneMeasure& nu, const SamplingPlan& plan) {
  plan.check(nu.dim());
  const Backend b = preferred_backend(nu);
  ScalarWitness w{kInf, {}};
  const auto pairs = sample_pairs(plan);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const McOptions mc{plan.mc_budget, derived_seed(plan.seed, kMcPairs, i)};
    const auto& s = pairs[i];
    const double m = seg_mass(nu, s.a, s.b, b, mc).value;
    if (!(m > 0.0)) throw DegenerateConfiguration("segment " + describe(s) + " has zero mass");
    const double k = transversal_integral(nu, s.a, s.b, b, mc).value / m;
    if (k < w.value) w = {k, s};
  }
  return w;
}

namespace {

double tau_segment_with_mass(const HyperplaneMeasure& nu, const Segment& s, double mass, Backend b,
                             const McOptions& mc) {
  auto holds = [&](int k) {
    const double tau = 0.01 * k;
    return restricted_mass(nu, s.a, s.b, tau, b, mc).value >= tau * mass * (1.0 - 1e-12);
  };
  if (holds(kTauSteps)) return 0.01 * kTauSteps;
  int lo = 0, hi = kTauSteps;  // holds(lo), !holds(hi)
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (holds(mid) ? lo : hi) = mid;
  }
  return 0.01 * lo;
}

}  // namespace

double tau_segment(const HyperplaneMeasure& nu, const Segment& s, Backend b, const McOptions& mc) {
  return tau_segment_with_mass(nu, s, seg_mass(nu, s.a, s.b, b, mc).value, b, mc);
}

ScalarWitness tau_hat(const HyperplaneMeasure& nu, const std::vector<Segment>& pairs, Backend b, const McOptions& mc) {
  ScalarWitness w{kInf, {}};
  for (const auto& s : pairs) {
    const double t = tau_segment(nu, s, b, mc);
    if (t < w.value) w = {t, s};
  }
  return w;
}

ScalarWitness tau_hat(const HyperplaneMeasure& nu, const SamplingPlan& plan) {
  plan.check(nu.dim());
  const Backend b = preferred_backend(nu);
  const auto pairs = sample_pairs(plan);
  ScalarWitness w{kInf, {}};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const McOptions mc{plan.mc_budget, derived_seed(plan.seed, kMcPairs, i)};
    const double t = tau_segment(nu, pairs[i], b, mc);
    if (t < w.value) w = {t, pairs[i]};
  }
  return w;
}

ScalarWitness delta_hat(const std::vector<PairRecord>& pairs) {
  ScalarWitness w{kInf, {}};
  for (const auto& p : pairs) {
    if (p.delta < w.value) w = {p.delta, p.seg};
  }
  return w;
}

ScalarWitness delta_hat(const EmbeddingMap& f, const SamplingPlan& plan) {
  plan.check(f.dim());
  ScalarWitness w{kInf, {}};
  for (const auto& s : sample_pairs(plan)) {
    const Vec df = f(s.a) - f(s.b);
    const double fd = norm(df);
    if (!(fd > 0.0)) throw DegenerateConfiguration("embedding is not injective on " + describe(s));
    const double d = dot(df, s.a - s.b) / (fd * s.length());
    if (d < w.value) w = {d, s};
  }
  return w;
}

BilipBounds bilip_bounds(const std::vector<PairRecord>& pairs) {
  BilipBounds b{kInf, -kInf, {}, {}};
  for (const auto& p : pairs) {
    if (p.ratio < b.c_low) b.c_low = p.ratio, b.low_witness = p.seg;
    if (p.ratio > b.c_high) b.c_high = p.ratio, b.high_witness = p.seg;
  }
  return b;
}

BilipBounds bilip_bounds(const EmbeddingMap& f, const SamplingPlan& plan) {
  plan.check(f.dim());
  return bilip_bounds(evaluate_pairs(f, sample_pairs(plan), plan.mc_budget, plan.seed));
}

namespace {

/// Triples (x, a, b) with |x - a|, |x - b| log-uniform in the scale range.
template <class Dist, class Ratio>
EtaEnvelope triple_envelope(const SamplingPlan& plan, Dist&& dist, Ratio&& ratio) {
  Rng rng = Rng(plan.seed).split(kTriples);
  const std::size_t n = plan.region.dim();
  std::vector<EtaBucket> all(kEtaBuckets);
  const double span = std::log(kEtaTMax / kEtaTMin);
  for (std::size_t k = 0; k < kEtaBuckets; ++k) {
    all[k].t_lo = kEtaTMin * std::exp(span * static_cast<double>(k) / kEtaBuckets);
    all[k].t_hi = kEtaTMin * std::exp(span * static_cast<double>(k + 1) / kEtaBuckets);
  }
  EtaEnvelope env;
  auto around = [&](const Point& x) -> std::optional<Point> {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const double r = std::exp(std::log(plan.min_length) +
                                rng.uniform() * (std::log(plan.max_length) - std::log(plan.min_length)));
      const Point p = x + detail::uniform_direction(rng, n) * r;
      if (plan.region.contains(p)) return p;
    }
    return std::nullopt;
  };
  for (std::size_t i = 0; i < plan.triple_count; ++i) {
    const Point x = detail::uniform_in_box(rng, plan.region);
    const auto a = around(x);
    const auto b = around(x);
    if (!a || !b) {
      ++env.skipped;
      continue;
    }
    const double da = dist(x, *a, i, 0), db = dist(x, *b, i, 1);
    const double t = da / db;
    if (!(db > 0.0) || !(t >= kEtaTMin) || !(t < kEtaTMax)) {
      ++env.skipped;
      continue;
    }
    const double q = ratio(x, *a, *b);
    if (!std::isfinite(q)) {
      ++env.skipped;
      continue;
    }
    const auto k = std::min<std::size_t>(kEtaBuckets - 1, static_cast<std::size_t>(std::log(t / kEtaTMin) / span * kEtaBuckets));
    all[k].count += 1;
    all[k].max_ratio = std::max(all[k].max_ratio, q);
  }
  for (const auto& bk : all) {
    if (bk.count > 0) env.buckets.push_back(bk);
  }
  return env;
}

}  // namespace

EtaEnvelope eta_hat(const EmbeddingMap& f, Metric metric, const SamplingPlan& plan) {
  plan.check(f.dim());
  const auto& nu = f.measure();
  auto dist = [&](const Point& x, const Point& y, std::size_t i, std::uint64_t j) {
    if (metric == Metric::Euclidean) return distance(x, y);
    const McOptions mc{plan.mc_budget, derived_seed(plan.seed, kMcTriples, 2 * i + j)};
    return seg_mass(nu, x, y, f.backend(), mc).value;
  };
  auto ratio = [&](const Point& x, const Point& a, const Point& b) {
    const Point fx = f(x);
    const double den = distance(fx, f(b));
    return den > 0.0 ? distance(fx, f(a)) / den : kInf;
  };
  return triple_envelope(plan, dist, ratio);
}

EtaEnvelope id_qs_probe(const HyperplaneMeasure& nu, const SamplingPlan& plan) {
  plan.check(nu.dim());
  const Backend b = preferred_backend(nu);
  auto dist = [&](const Point& x, const Point& y, std::size_t i, std::uint64_t j) {
    const McOptions mc{plan.mc_budget, derived_seed(plan.seed, kMcTriples, 2 * i + j)};
    return seg_mass(nu, x, y, b, mc).value;
  };
  auto ratio = [&](const Point& x, const Point& a, const Point& bb) {
    const double den = distance(x, bb);
    return den > 0.0 ? distance(x, a) / den : kInf;
  };
  return triple_envelope(plan, dist, ratio);
}

double cyclic_sum(const std::vector<Point>& pts, const std::vector<Point>& images) {
  const std::size_t m = pts.size();
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) s += dot(images[k], pts[(k + 1) % m] - pts[k]);
  return s;
}

double cycle_scale(const std::vector<Point>& pts, const std::vector<Point>& images) {
  const std::size_t m = pts.size();
  double s = 0.0;
  for (std::size_t k = 0; k < m; ++k) s += norm(images[k]) * distance(pts[(k + 1) % m], pts[k]);
  return s;
}

std::vector<std::vector<Point>> sample_cycles(const SamplingPlan& plan) {
  Rng rng = Rng(plan.seed).split(kCycles);
  const std::size_t n = plan.region.dim();
  std::vector<std::vector<Point>> out;
  out.reserve(plan.cycle_count);
  for (std::size_t c = 0; c < plan.cycle_count; ++c) {
    const std::size_t m = 2 + rng.below(7);
    const double r = std::exp(std::log(plan.min_length) +
                              rng.uniform() * (std::log(plan.max_length) - std::log(plan.min_length)));
    const Point center = detail::uniform_in_box(rng, plan.region);
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::max(plan.region.lo[i], center[i] - 0.5 * r);
      hi[i] = std::min(plan.region.hi[i], center[i] + 0.5 * r);
    }
    const Box cell{Point(lo), Point(hi)};
    std::vector<Point> pts;
    for (std::size_t k = 0; k < m; ++k) pts.push_back(detail::uniform_in_box(rng, cell));
    out.push_back(std::move(pts));
  }
  return out;
}

namespace {

CycleResult cyclic_impl(const EmbeddingMap& f, const SamplingPlan& plan, double& worst_excess) {
  CycleResult res;
  worst_excess = -kInf;
  for (const auto& pts : sample_cycles(plan)) {
    std::vector<Point> images;
    double slack = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      const VecEstimate e = f.evaluate(pts[k]);
      images.push_back(e.value);
      slack += 4.0 * norm(e.std_error) * distance(pts[(k + 1) % pts.size()], pts[k]);
    }
    const double scale = cycle_scale(pts, images);
    if (!(scale > 0.0)) continue;
    const double sum = cyclic_sum(pts, images);
    const double normalized = sum / scale;
    worst_excess = std::max(worst_excess, (sum - slack) / scale);
    if (normalized > res.worst_normalized) {
      res.worst_normalized = normalized;
      res.worst_sum = sum;
      res.worst_scale = scale;
      res.witness = pts;
    }
  }
  return res;
}

}  // namespace

CycleResult cyclic_audit(const EmbeddingMap& f, const SamplingPlan& plan) {
  plan.check(f.dim());
  double excess;
  return cyclic_impl(f, plan, excess);
}

double cube_lemma_constant(std::size_t n) {
  return std::pow(4.0, -static_cast<double>(n)) / std::sqrt(static_cast<double>(n));
}

std::vector<Cube> sample_cubes(const SamplingPlan& plan) {
  Rng rng = Rng(plan.seed).split(kCubes);
  const std::size_t n = plan.region.dim();
  std::vector<Cube> out;
  out.reserve(plan.cube_count);
  for (std::size_t c = 0; c < plan.cube_count; ++c) {
    const double u = (static_cast<double>(c) + rng.uniform()) / static_cast<double>(std::max<std::size_t>(1, plan.cube_count));
    const double e = std::exp(std::log(plan.min_length) + u * (std::log(plan.max_length) - std::log(plan.min_length)));
    std::vector<double> ctr(n);
    for (std::size_t i = 0; i < n; ++i) ctr[i] = rng.uniform(plan.region.lo[i] + 0.5 * e, plan.region.hi[i] - 0.5 * e);
    out.emplace_back(Point(std::move(ctr)), e);
  }
  return out;
}

CubeResult cube_audit(const EmbeddingMap& f, const SamplingPlan& plan) {
  plan.check(f.dim());
  const auto& nu = f.measure();
  const std::size_t n = f.dim();
  CubeResult res;
  res.bound = cube_lemma_constant(n);
  res.mass_backend = preferred_backend(nu, QueryShape::Box);
  const auto cubes = sample_cubes(plan);
  for (std::size_t c = 0; c < cubes.size(); ++c) {
    const Cube& q = cubes[c];
    const McOptions mc{plan.mc_budget, derived_seed(plan.seed, kMcCubes, c)};
    const Estimate m = cube_mass(nu, q, res.mass_backend, mc);
    const double mass = m.value + 4.0 * m.std_error;
    if (!(mass > 0.0)) continue;
    std::vector<Point> img;
    for (const auto& v : cube_vertices(q)) img.push_back(f(v));
    double diam = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
      for (std::size_t j = i + 1; j < img.size(); ++j) diam = std::max(diam, distance(img[i], img[j]));
    }
    const double ratio = diam / mass;
    if (ratio < res.worst_ratio) {
      res.worst_ratio = ratio;
      res.witness = q;
      res.witness_mass = mass;
      res.witness_diameter = diam;
    }
  }
  return res;
}

bool DiagnosticsReport::all_passed() const {
  return std::all_of(audits.begin(), audits.end(), [](const Audit& a) { return a.passed; });
}

DiagnosticsReport run_diagnostics(const EmbeddingMap& f, const SamplingPlan& plan) {
  plan.check(f.dim());
  const auto& nu = f.measure();
  const bool mc = f.backend() == Backend::MonteCarlo;
  DiagnosticsReport rep;
  rep.backend = f.backend();
  const auto pairs = sample_pairs(plan);
  rep.pairs = evaluate_pairs(f, pairs, plan.mc_budget, plan.seed);
  rep.kappa = kappa_hat(rep.pairs);
  rep.delta = delta_hat(rep.pairs);
  rep.bilip = bilip_bounds(rep.pairs);
  rep.tau = {kInf, {}};
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const McOptions opt{plan.mc_budget, derived_seed(plan.seed, kMcPairs, i)};
    const double t = tau_segment_with_mass(nu, rep.pairs[i].seg, rep.pairs[i].mass, f.backend(), opt);
    if (t < rep.tau.value) rep.tau = {t, rep.pairs[i].seg};
  }
  rep.eta_busemann = eta_hat(f, Metric::Busemann, plan);
  rep.eta_euclidean = eta_hat(f, Metric::Euclidean, plan);
  rep.id_probe = id_qs_probe(nu, plan);
  double cycle_excess = 0.0;
  rep.cycles = cyclic_impl(f, plan, cycle_excess);
  rep.cubes = cube_audit(f, plan);

  // Per-pair contracts; each audit keeps the worst pair.
  Audit identity{"identity", true, -kInf, mc ? 0.0 : 1e-8, ""};
  Audit lipschitz{"lipschitz_bound", true, -kInf, 1e-12, ""};
  Audit lower{"lower_bound", true, -kInf, 1e-12, ""};
  Audit dom{"delta_dominates_kappa", true, -kInf, 1e-10, ""};
  Audit cocycle{"basepoint_cocycle", true, 0.0, 1e-12, ""};
  for (const auto& p : rep.pairs) {
    if (p.cocycle_gap > cocycle.value) {
      cocycle.value = p.cocycle_gap;
      cocycle.detail = "pair " + describe(p.seg);
    }
    const double len = p.seg.length();
    const double target = len * p.transversal;
    const double err = std::abs(p.inner - target);
    const double rel = err / std::max(target, 1e-300);
    const double id_slack = 4.0 * len * std::hypot(p.fdist_se, p.transversal_se);
    const double id_excess = mc ? err - id_slack : (err <= 1e-12 ? 0.0 : rel);
    if (id_excess > identity.value) {
      identity.value = id_excess;
      identity.detail = "pair " + describe(p.seg) + ": <df, dx> = " + fmt(p.inner) + ", |dx| T = " + fmt(target);
    }
    const double mc_lip = mc ? 4.0 * std::hypot(p.fdist_se, p.mass_se) : 0.0;
    const double lip = p.fdist - p.mass - mc_lip;
    if (lip > lipschitz.value) {
      lipschitz.value = lip;
      lipschitz.detail = "pair " + describe(p.seg) + ": |df| = " + fmt(p.fdist) + ", d = " + fmt(p.mass);
    }
    const double mc_low = mc ? 4.0 * std::hypot(p.fdist_se, p.transversal_se) : 0.0;
    const double low = p.transversal - p.fdist - mc_low;
    if (low > lower.value) {
      lower.value = low;
      lower.detail = "pair " + describe(p.seg) + ": |df| = " + fmt(p.fdist) + ", T = " + fmt(p.transversal);
    }
    const double mc_dom =
        mc ? 4.0 * (p.transversal_se / p.mass + p.mass_se * p.transversal / (p.mass * p.mass) + 2.0 * p.fdist_se / p.fdist)
           : 0.0;
    const double d = p.kappa - p.delta - mc_dom;
    if (d > dom.value) {
      dom.value = d;
      dom.detail = "pair " + describe(p.seg) + ": delta = " + fmt(p.delta) + ", kappa = " + fmt(p.kappa);
    }
  }
  identity.passed = identity.value <= identity.threshold;
  lipschitz.passed = lipschitz.value <= lipschitz.threshold;
  lower.passed = lower.value <= lower.threshold;
  dom.passed = dom.value <= dom.threshold;
  cocycle.passed = cocycle.value <= cocycle.threshold;
  rep.audits = {identity, lipschitz, lower, dom, cocycle};

  Audit dnon{"delta_nonnegative", rep.delta.value >= -1e-12, rep.delta.value, -1e-12,
             "pair " + describe(rep.delta.witness) + ": delta = " + fmt(rep.delta.value)};
  if (mc) dnon.passed = true;  // sign noise only; the per-pair audits above carry the statistical check
  rep.audits.push_back(dnon);

  const double chain = rep.tau.value * std::sin(rep.tau.value);
  rep.audits.push_back({"kappa_tau_chain", mc || rep.kappa.value >= chain - 1e-10, rep.kappa.value, chain - 1e-10,
                        "kappa = " + fmt(rep.kappa.value) + ", tau = " + fmt(rep.tau.value) + " at " +
                            describe(rep.tau.witness)});
  rep.audits.push_back({"bilip_low", rep.bilip.c_low >= rep.kappa.value - 1e-10, rep.bilip.c_low,
                        rep.kappa.value - 1e-10,
                        "cLow = " + fmt(rep.bilip.c_low) + " at " + describe(rep.bilip.low_witness)});
  if (mc) rep.audits.back().passed = rep.audits[2].passed;
  rep.audits.push_back({"bilip_high", mc ? rep.audits[1].passed : rep.bilip.c_high <= 1.0 + 1e-12, rep.bilip.c_high,
                        1.0 + 1e-12, "cHigh = " + fmt(rep.bilip.c_high) + " at " + describe(rep.bilip.high_witness)});

  Audit cyc{"cyclic_monotonicity", true, rep.cycles.worst_normalized, 1e-10, ""};
  cyc.passed = (mc ? cycle_excess : rep.cycles.worst_normalized) <= 1e-10;
  cyc.detail = "worst sum " + fmt(rep.cycles.worst_sum) + " at scale " + fmt(rep.cycles.worst_scale) + " over " +
               std::to_string(rep.cycles.witness.size()) + " points";
  if (!rep.cycles.witness.empty()) {
    cyc.detail += ":";
    for (const auto& p : rep.cycles.witness) cyc.detail += " " + describe(p);
  }
  rep.audits.push_back(cyc);

  Audit cube{"cube_lemma", rep.cubes.worst_ratio >= rep.cubes.bound - 1e-10, rep.cubes.worst_ratio,
             rep.cubes.bound - 1e-10, ""};
  if (rep.cubes.witness) {
    cube.detail = "cube center " + describe(rep.cubes.witness->center) + " edge " + fmt(rep.cubes.witness->edge) +
                  ": diam = " + fmt(rep.cubes.witness_diameter) + ", mass = " + fmt(rep.cubes.witness_mass);
  }
  rep.audits.push_back(cube);
  return rep;
}

}  // namespace busemann
