#include "busemann/busemann.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "busemann/rng.hpp"
#include "config.hpp"

using namespace busemann;

struct bm_scenario {
  RunConfig cfg;
  Scenario scenario;
  Backend backend;
  McOptions mc;
};

namespace {

thread_local std::string g_error;

bm_status fail(bm_status s, const char* msg) {
  g_error = msg;
  return s;
}

template <class F>
bm_status guard(F&& f) {
  try {
    f();
    g_error.clear();
    return BM_OK;
  } catch (const ConfigError& e) {
    return fail(BM_ERR_CONFIG, e.what());
  } catch (const InvalidArgument& e) {
    return fail(BM_ERR_INVALID_ARGUMENT, e.what());
  } catch (const DegenerateConfiguration& e) {
    return fail(BM_ERR_DEGENERATE, e.what());
  } catch (const UnsupportedBackend& e) {
    return fail(BM_ERR_UNSUPPORTED_BACKEND, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(BM_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(BM_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BM_ERR_INTERNAL, "unknown error");
  }
}

bm_scenario* make(RunConfig cfg) {
  Scenario s = build_scenario(cfg);
  const Backend b = cfg.backend.value_or(s.backend());
  if (!supports(*s.measure, b)) throw UnsupportedBackend(std::string("backend ") + backend_name(b) + " does not support this measure");
  const McOptions mc{cfg.plan.mc_budget, Rng(cfg.seed).split(11).next()};
  return new bm_scenario{std::move(cfg), std::move(s), b, mc};
}

Point to_point(const bm_scenario* s, const double* x) {
  if (!x) throw InvalidArgument("null coordinate array");
  return Point(std::vector<double>(x, x + s->scenario.dim));
}

}  // namespace

extern "C" {

const char* bm_last_error(void) { return g_error.c_str(); }
const char* bm_version(void) { return "1.0.0"; }

bm_status bm_scenario_from_file(const char* config_path, bm_scenario** out) {
  if (!config_path || !out) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { *out = make(load_config(config_path)); });
}

bm_status bm_scenario_from_json(const char* config_json, bm_scenario** out) {
  if (!config_json || !out) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] { *out = make(parse_config(config_json)); });
}

void bm_scenario_free(bm_scenario* s) { delete s; }

size_t bm_scenario_dim(const bm_scenario* s) { return s ? s->scenario.dim : 0; }

bm_status bm_scenario_basepoint(const bm_scenario* s, double* out) {
  if (!s || !out) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  for (std::size_t i = 0; i < s->scenario.dim; ++i) out[i] = s->scenario.basepoint[i];
  g_error.clear();
  return BM_OK;
}

const char* bm_scenario_backend(const bm_scenario* s) { return s ? backend_name(s->backend) : ""; }

bm_status bm_seg_mass(const bm_scenario* s, const double* x, const double* y, double* value, double* std_error) {
  if (!s || !value) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const Estimate e = seg_mass(*s->scenario.measure, to_point(s, x), to_point(s, y), s->backend, s->mc);
    *value = e.value;
    if (std_error) *std_error = e.std_error;
  });
}

bm_status bm_transversal_integral(const bm_scenario* s, const double* x, const double* y, double* value,
                                  double* std_error) {
  if (!s || !value) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const Estimate e = transversal_integral(*s->scenario.measure, to_point(s, x), to_point(s, y), s->backend, s->mc);
    *value = e.value;
    if (std_error) *std_error = e.std_error;
  });
}

bm_status bm_embed(const bm_scenario* s, const double* x, double* out, double* std_error) {
  if (!s || !out) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const VecEstimate e = embed(*s->scenario.measure, s->scenario.basepoint, to_point(s, x), s->backend, s->mc);
    for (std::size_t i = 0; i < s->scenario.dim; ++i) {
      out[i] = e.value[i];
      if (std_error) std_error[i] = e.std_error[i];
    }
  });
}

bm_status bm_grid_export(const bm_scenario* s, size_t resolution, const double* lo, const double* hi,
                         const char* csv_path) {
  if (!s || !csv_path) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const Box window = lo && hi ? Box(to_point(s, lo), to_point(s, hi)) : s->cfg.plan.region;
    write_atomic(csv_path, grid_to_csv(grid_export(s->scenario, resolution, window, s->mc)));
  });
}

bm_status bm_run_config(const char* config_path, const char* out_dir, int* exit_code, char* report_path,
                        size_t report_path_size) {
  if (!config_path || !exit_code) return fail(BM_ERR_INVALID_ARGUMENT, "null argument");
  return guard([&] {
    const RunOutcome r = run_config(load_config(config_path), out_dir ? out_dir : "");
    *exit_code = r.exit_code;
    if (report_path && report_path_size > 0) {
      std::strncpy(report_path, r.report_path.c_str(), report_path_size - 1);
      report_path[report_path_size - 1] = '\0';
    }
  });
}

bm_status bm_calibrate(size_t dim, uint64_t budget, uint64_t seed, const char* out_path, double* value,
                       double* half_width, int* low_sample_warning, int* exit_code) {
  return guard([&] {
    const CalibrationOutcome c = run_calibration(dim, budget, seed, out_path ? out_path : "");
    if (value) *value = c.constant.value;
    if (half_width) *half_width = c.constant.half_width;
    if (low_sample_warning) *low_sample_warning = c.constant.low_sample_warning ? 1 : 0;
    if (exit_code) *exit_code = c.exit_code;
  });
}

}  // extern "C"
