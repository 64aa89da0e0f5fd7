#include "config.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace busemann {

using nlohmann::json;

namespace {

/// Object reader that records which keys were consumed.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Obj child(const std::string& key) { return Obj(raw(key), sub(key)); }

  template <class T>
  T req(const std::string& key) {
    if (!has(key)) throw ConfigError("missing key '" + sub(key) + "'");
    return as<T>(raw(key), sub(key));
  }

  template <class T>
  T opt(const std::string& key, T fallback) {
    return has(key) ? as<T>(raw(key), sub(key)) : fallback;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.count(k)) throw ConfigError("unknown key '" + sub(k) + "'");
    }
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "configuration" : "'" + path_ + "'"; }

  template <class T>
  static T as(const json& v, const std::string& path) {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError("");
        if constexpr (std::is_unsigned_v<T>) {
          if (v.is_number_integer() && v.get<long long>() < 0) throw ConfigError("");
        }
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("key '" + path + "' has the wrong type");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<double> number_list(const json& v, const std::string& path, std::size_t n) {
  if (!v.is_array() || v.size() != n) {
    throw ConfigError("key '" + path + "' must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const auto& x : v) out.push_back(Obj::as<double>(x, path));
  return out;
}

Box parse_box(Obj o, std::size_t n) {
  auto lo = number_list(o.raw("lo"), o.sub("lo"), n);
  auto hi = number_list(o.raw("hi"), o.sub("hi"), n);
  o.finish();
  try {
    return Box(Point(std::move(lo)), Point(std::move(hi)));
  } catch (const Error& e) {
    throw ConfigError(o.where() + ": " + e.what());
  }
}

GradedGridSpec parse_grid(Obj o) {
  GradedGridSpec g;
  g.extent = o.opt("extent", g.extent);
  g.inner = o.opt("inner", g.inner);
  g.inner_cells = o.opt("innerCells", g.inner_cells);
  g.growth = o.opt("growth", g.growth);
  g.quadrature = o.opt("quadrature", g.quadrature);
  g.density = o.opt("density", g.density);
  o.finish();
  return g;
}

/// mu for kmw / degenerate: {"lebesgue": {...}} and/or {"atoms": [{"at": [...], "w": w}]}
void parse_mu_nd(Obj o, ScenarioSpec& s) {
  if (o.has("lebesgue")) s.lebesgue = parse_grid(o.child("lebesgue"));
  if (o.has("atoms")) {
    const json& arr = o.raw("atoms");
    if (!arr.is_array()) throw ConfigError("key '" + o.sub("atoms") + "' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj a(arr[i], o.sub("atoms") + "[" + std::to_string(i) + "]");
      s.atoms.push_back({Point(number_list(a.raw("at"), a.sub("at"), s.dim)), a.req<double>("w")});
      a.finish();
    }
  }
  o.finish();
  if (!s.lebesgue && s.atoms.empty()) throw ConfigError("'" + o.where() + "' needs 'lebesgue' or 'atoms'");
}

void parse_mu_1d(Obj o, ScenarioSpec& s) {
  if (o.has("atoms")) {
    const json& arr = o.raw("atoms");
    if (!arr.is_array()) throw ConfigError("key '" + o.sub("atoms") + "' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj a(arr[i], o.sub("atoms") + "[" + std::to_string(i) + "]");
      s.atoms1d.push_back({a.req<double>("at"), a.req<double>("w")});
      a.finish();
    }
  }
  if (o.has("pieces")) {
    const json& arr = o.raw("pieces");
    if (!arr.is_array()) throw ConfigError("key '" + o.sub("pieces") + "' must be an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Obj a(arr[i], o.sub("pieces") + "[" + std::to_string(i) + "]");
      s.pieces1d.push_back({a.req<double>("lo"), a.req<double>("hi"), a.req<double>("density")});
      a.finish();
    }
  }
  if (o.has("powerLaw")) {
    Obj p = o.child("powerLaw");
    PowerLawSpec pl;
    pl.exponent = p.opt("exponent", pl.exponent);
    pl.extent = p.opt("extent", pl.extent);
    pl.pieces = p.opt("pieces", pl.pieces);
    pl.innermost = p.opt("innermost", pl.innermost);
    p.finish();
    s.power_law = pl;
  }
  o.finish();
  if (s.atoms1d.empty() && s.pieces1d.empty() && !s.power_law) {
    throw ConfigError("'" + o.where() + "' needs 'atoms', 'pieces' or 'powerLaw'");
  }
}

ScenarioSpec parse_scenario(Obj o) {
  ScenarioSpec s;
  s.builder = o.req<std::string>("builder");
  s.dim = o.opt<std::size_t>("dim", 2);
  if (s.dim < 2 || s.dim > 8) throw ConfigError("key 'scenario.dim' must lie in [2, 8]");
  if (s.builder == "crofton") {
  } else if (s.builder == "kmw") {
    s.doubling_samples = o.opt<std::size_t>("doublingSamples", s.doubling_samples);
    if (o.has("mu")) {
      parse_mu_nd(o.child("mu"), s);
    } else {
      s.lebesgue = GradedGridSpec{};
      if (s.dim >= 3) s.lebesgue->inner_cells = 6, s.lebesgue->growth = 2.0, s.lebesgue->quadrature = 1;
    }
  } else if (s.builder == "beurling_ahlfors") {
    if (s.dim != 2) throw ConfigError("beurling_ahlfors is planar; 'scenario.dim' must be 2");
    s.cap_half_angle = o.opt("capHalfAngle", s.cap_half_angle);
    if (o.has("mu")) {
      parse_mu_1d(o.child("mu"), s);
    } else {
      s.pieces1d.push_back({-100.0, 100.0, 1.0});
    }
  } else if (s.builder == "degenerate") {
    if (s.dim != 2) throw ConfigError("degenerate is planar; 'scenario.dim' must be 2");
    s.theta0 = o.req<double>("theta0");
    if (o.has("mu")) {
      parse_mu_nd(o.child("mu"), s);
    } else {
      s.lebesgue = GradedGridSpec{};
    }
  } else {
    throw ConfigError("unknown builder '" + s.builder + "' (expected crofton, kmw, beurling_ahlfors or degenerate)");
  }
  o.finish();
  return s;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  Obj root(j, "");
  RunConfig cfg;
  if (!root.has("seed")) throw ConfigError("missing key 'seed' (a fixed seed is mandatory)");
  cfg.seed = root.req<std::uint64_t>("seed");
  if (!root.has("scenario")) throw ConfigError("missing key 'scenario'");
  cfg.scenario = parse_scenario(root.child("scenario"));
  const std::size_t n = cfg.scenario.dim;
  cfg.domain = root.has("domain") ? parse_box(root.child("domain"), n) : centered_box(n, 1.0);

  SamplingPlan& p = cfg.plan;
  // default region: the domain shrunk by 5% on every side
  {
    std::vector<double> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = 0.05 * (cfg.domain.hi[i] - cfg.domain.lo[i]);
      lo[i] = cfg.domain.lo[i] + m;
      hi[i] = cfg.domain.hi[i] - m;
    }
    p.region = Box(Point(lo), Point(hi));
  }
  double min_edge = kInf;
  if (root.has("plan")) {
    Obj o = root.child("plan");
    p.pair_count = o.opt<std::size_t>("pairCount", p.pair_count);
    p.cycle_count = o.opt<std::size_t>("cycleCount", p.cycle_count);
    p.cube_count = o.opt<std::size_t>("cubeCount", p.cube_count);
    p.triple_count = o.opt<std::size_t>("tripleCount", 500);
    p.mc_budget = o.opt<std::uint64_t>("mcBudget", 20000);
    if (o.has("region")) p.region = parse_box(o.child("region"), n);
    for (std::size_t i = 0; i < n; ++i) min_edge = std::min(min_edge, p.region.hi[i] - p.region.lo[i]);
    p.min_length = o.opt("minLength", 1e-3);
    p.max_length = o.opt("maxLength", 0.5 * min_edge);
    o.finish();
  } else {
    p.triple_count = 500;
    p.mc_budget = 20000;
    for (std::size_t i = 0; i < n; ++i) min_edge = std::min(min_edge, p.region.hi[i] - p.region.lo[i]);
    p.max_length = 0.5 * min_edge;
  }
  p.seed = cfg.seed;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p.region.lo[i] > cfg.domain.lo[i] && p.region.hi[i] < cfg.domain.hi[i])) {
      throw ConfigError("'plan.region' must lie strictly inside 'domain'");
    }
  }
  try {
    p.check(n);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }

  if (root.has("backend")) {
    const auto name = root.req<std::string>("backend");
    cfg.backend = parse_backend(name);
    if (!cfg.backend) throw ConfigError("unknown backend '" + name + "'");
  }
  if (root.has("expect")) {
    Obj o = root.child("expect");
    if (o.has("kappaMin")) cfg.kappa_min = o.req<double>("kappaMin");
    o.finish();
  }
  if (root.has("calibration")) cfg.calibration = root.req<std::string>("calibration");
  if (root.has("outputs")) {
    Obj o = root.child("outputs");
    cfg.report_path = o.opt<std::string>("report", cfg.report_path);
    if (o.has("grid")) {
      Obj g = o.child("grid");
      GridSpec gs;
      gs.path = g.req<std::string>("path");
      gs.resolution = g.opt<std::size_t>("resolution", gs.resolution);
      if (g.has("window")) gs.window = parse_box(g.child("window"), n);
      g.finish();
      cfg.grid = gs;
    }
    o.finish();
  }
  root.finish();
  return cfg;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out.flush()) throw ConfigError("cannot write '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

Scenario build_scenario(const RunConfig& cfg) {
  const ScenarioSpec& s = cfg.scenario;
  const std::size_t n = s.dim;
  auto base_nd = [&] {
    if (s.lebesgue) {
      const auto& g = *s.lebesgue;
      BaseMeasureND leb = graded_lebesgue(n, g.inner, g.inner_cells, g.extent, g.growth, g.quadrature, g.density);
      if (s.atoms.empty()) return leb;
      return BaseMeasureND(n, s.atoms, leb.cells(), {}, g.quadrature);
    }
    return BaseMeasureND(n, s.atoms);
  };
  if (s.builder == "crofton") return build_crofton(n, cfg.domain);
  if (s.builder == "kmw") return build_kmw(base_nd(), cfg.domain, KmwChecks{s.doubling_samples, cfg.seed});
  if (s.builder == "beurling_ahlfors") {
    std::vector<DensityPiece> pieces = s.pieces1d;
    if (s.power_law) {
      const auto& p = *s.power_law;
      const BaseMeasure1D pl = power_law_pieces(p.exponent, p.extent, p.pieces, p.innermost);
      pieces.insert(pieces.end(), pl.pieces().begin(), pl.pieces().end());
    }
    return build_beurling_ahlfors(BaseMeasure1D(s.atoms1d, pieces), cfg.domain, s.cap_half_angle);
  }
  return build_degenerate_family(s.theta0, cfg.domain, base_nd());
}

}  // namespace busemann
