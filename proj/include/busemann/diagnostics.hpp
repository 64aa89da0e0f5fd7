#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "busemann/evaluators.hpp"
#include "busemann/geometry.hpp"
#include "busemann/measure.hpp"

namespace busemann {

struct SamplingPlan {
  Box region;
  std::size_t pair_count = 1000;
  std::size_t cycle_count = 1000;
  std::size_t cube_count = 200;
  std::size_t triple_count = 1000;
  double min_length = 1e-3;
  double max_length = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t mc_budget = 100000;  // per query, when a Monte Carlo backend is used

  void check(std::size_t dim) const;
};

/// Stratified segments: log-length stratum i of `pair_count`, uniform midpoint
/// and direction. Identical for identical plans.
std::vector<Segment> sample_pairs(const SamplingPlan& plan);

/// Per-pair record shared by the pair-based estimators.
struct PairRecord {
  Segment seg;
  double mass = 0.0;         // d_nu(x, y)
  double transversal = 0.0;  // integral of sin alpha
  double mass_se = 0.0;
  double transversal_se = 0.0;
  double inner = 0.0;   // <f(x) - f(y), x - y>
  double fdist = 0.0;   // |f(x) - f(y)|
  double fdist_se = 0.0;
  double kappa = 0.0;   // transversal / mass
  double delta = 0.0;   // inner / (fdist |x - y|)
  double ratio = 0.0;   // fdist / mass
  // |(f(x) - f(y)) - increment| / (|f(x)| + |f(y)|); zero under Monte Carlo
  double cocycle_gap = 0.0;
};

/// Evaluates every per-pair quantity. Throws DegenerateConfiguration on a
/// pair with zero mass or |f(x) - f(y)| = 0, naming the pair.
std::vector<PairRecord> evaluate_pairs(const EmbeddingMap& f, const std::vector<Segment>& pairs,
                                       std::uint64_t mc_budget, std::uint64_t seed);

struct ScalarWitness {
  double value = 0.0;
  Segment witness;
};

ScalarWitness kappa_hat(const HyperplaneMeasure& nu, const SamplingPlan& plan);
ScalarWitness kappa_hat(const std::vector<PairRecord>& pairs);

/// Largest grid value tau = 0.01 k for which the restricted-mass inequality
/// holds on every sampled segment.
ScalarWitness tau_hat(const HyperplaneMeasure& nu, const SamplingPlan& plan);
ScalarWitness tau_hat(const HyperplaneMeasure& nu, const std::vector<Segment>& pairs, Backend b,
                      const McOptions& mc);
/// Per-segment grid maximum.
double tau_segment(const HyperplaneMeasure& nu, const Segment& s, Backend b, const McOptions& mc);

ScalarWitness delta_hat(const EmbeddingMap& f, const SamplingPlan& plan);
ScalarWitness delta_hat(const std::vector<PairRecord>& pairs);

enum class Metric { Busemann, Euclidean };

struct EtaBucket {
  double t_lo = 0.0;
  double t_hi = 0.0;
  std::size_t count = 0;
  double max_ratio = 0.0;
};

struct EtaEnvelope {
  std::vector<EtaBucket> buckets;  // non-empty buckets only, increasing t
  std::size_t skipped = 0;         // degenerate or out-of-range triples
};

inline constexpr std::size_t kEtaBuckets = 32;
inline constexpr double kEtaTMin = 1e-2;
inline constexpr double kEtaTMax = 1e2;

/// Empirical envelope of |f(x) - f(a)| / |f(x) - f(b)| against t = d(x, a) / d(x, b).
EtaEnvelope eta_hat(const EmbeddingMap& f, Metric metric, const SamplingPlan& plan);
/// Same envelope for the identity from (region, d_nu) to (region, d_e).
EtaEnvelope id_qs_probe(const HyperplaneMeasure& nu, const SamplingPlan& plan);

struct BilipBounds {
  double c_low = 0.0;
  double c_high = 0.0;
  Segment low_witness;
  Segment high_witness;
};

BilipBounds bilip_bounds(const EmbeddingMap& f, const SamplingPlan& plan);
BilipBounds bilip_bounds(const std::vector<PairRecord>& pairs);

struct CycleResult {
  double worst_normalized = -kInf;  // max over cycles of sum / scale
  double worst_sum = 0.0;
  double worst_scale = 0.0;
  std::vector<Point> witness;
};

/// Cyclic sum sum_k <f(x_k), x_{k+1} - x_k>, indices mod m.
double cyclic_sum(const std::vector<Point>& pts, const std::vector<Point>& images);
/// sum_k |f(x_k)| |x_{k+1} - x_k|.
double cycle_scale(const std::vector<Point>& pts, const std::vector<Point>& images);

std::vector<std::vector<Point>> sample_cycles(const SamplingPlan& plan);
CycleResult cyclic_audit(const EmbeddingMap& f, const SamplingPlan& plan);

struct CubeResult {
  double worst_ratio = kInf;
  double bound = 0.0;  // 4^-n n^-1/2
  std::optional<Cube> witness;
  double witness_mass = 0.0;
  double witness_diameter = 0.0;
  Backend mass_backend = Backend::ClosedForm;
};

double cube_lemma_constant(std::size_t n);
std::vector<Cube> sample_cubes(const SamplingPlan& plan);
/// diam f(vertices) / cube mass, minimized over sampled cubes. A Monte Carlo
/// cube mass is replaced by its value + 4 standard errors, which only lowers
/// the ratio.
CubeResult cube_audit(const EmbeddingMap& f, const SamplingPlan& plan);

struct Audit {
  std::string name;
  bool passed = true;
  double value = 0.0;     // worst observed quantity
  double threshold = 0.0;
  std::string detail;     // witness and comparison, human-readable
};

struct DiagnosticsReport {
  ScalarWitness kappa;
  ScalarWitness tau;
  ScalarWitness delta;
  BilipBounds bilip;
  EtaEnvelope eta_busemann;
  EtaEnvelope eta_euclidean;
  EtaEnvelope id_probe;
  CycleResult cycles;
  CubeResult cubes;
  std::vector<PairRecord> pairs;
  std::vector<Audit> audits;
  Backend backend = Backend::ClosedForm;

  bool all_passed() const;
};

/// Runs every estimator on the shared pair sample and evaluates the contracts
/// (identity, Lipschitz and lower bounds, transversality chain, cyclic
/// monotonicity, cube lemma).
DiagnosticsReport run_diagnostics(const EmbeddingMap& f, const SamplingPlan& plan);

}  // namespace busemann
