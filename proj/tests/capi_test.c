/* Exercises the C interface from plain C. */
#include <math.h>
#include <stdio.h>
#include <string.h>

#include "busemann/busemann.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static const char* kCrofton =
    "{\"seed\": 1, \"scenario\": {\"builder\": \"crofton\", \"dim\": 2},"
    " \"plan\": {\"pairCount\": 50, \"cycleCount\": 50, \"cubeCount\": 10, \"tripleCount\": 50}}";

int main(int argc, char** argv) {
  bm_scenario* s = NULL;
  EXPECT(strlen(bm_version()) > 0);
  EXPECT(bm_scenario_from_json(kCrofton, &s) == BM_OK);
  EXPECT(strcmp(bm_last_error(), "") == 0);
  EXPECT(bm_scenario_dim(s) == 2);
  EXPECT(strcmp(bm_scenario_backend(s), "closed_form") == 0);

  const double x[2] = {0.0, 0.0}, y[2] = {1.0, 0.0};
  double d = -1.0, se = -1.0;
  EXPECT(bm_seg_mass(s, x, y, &d, &se) == BM_OK);
  EXPECT(fabs(d - 2.0 / 3.14159265358979323846) < 1e-15);
  EXPECT(se == 0.0);
  EXPECT(bm_seg_mass(s, x, x, &d, NULL) == BM_OK);
  EXPECT(d == 0.0);
  double t = 0.0;
  EXPECT(bm_transversal_integral(s, x, y, &t, NULL) == BM_OK);
  EXPECT(fabs(t - 0.5) < 1e-15);

  double o[2], f[2], fse[2];
  EXPECT(bm_scenario_basepoint(s, o) == BM_OK);
  EXPECT(bm_embed(s, o, f, fse) == BM_OK);
  EXPECT(f[0] == 0.0 && f[1] == 0.0);
  const double p[2] = {0.5, -0.3};
  EXPECT(bm_embed(s, p, f, NULL) == BM_OK);
  EXPECT(fabs(f[0] - 0.25) < 1e-15 && fabs(f[1] + 0.15) < 1e-15);

  EXPECT(bm_seg_mass(s, NULL, y, &d, NULL) == BM_ERR_INVALID_ARGUMENT);
  EXPECT(strlen(bm_last_error()) > 0);
  EXPECT(bm_seg_mass(NULL, x, y, &d, NULL) == BM_ERR_INVALID_ARGUMENT);
  bm_scenario_free(s);
  bm_scenario_free(NULL);

  s = NULL;
  EXPECT(bm_scenario_from_json("{\"seed\": 1, \"scenario\": {\"builder\": \"crofton\", \"dimm\": 2}}", &s) ==
         BM_ERR_CONFIG);
  EXPECT(s == NULL);
  EXPECT(strstr(bm_last_error(), "scenario.dimm") != NULL);
  EXPECT(bm_scenario_from_file("/nonexistent/config.json", &s) == BM_ERR_CONFIG);

  /* atom on the query segment */
  EXPECT(bm_scenario_from_json("{\"seed\": 1, \"scenario\": {\"builder\": \"kmw\", \"mu\": {\"atoms\": ["
                               "{\"at\": [0.5, 0], \"w\": 1}, {\"at\": [3, 2], \"w\": 1}, {\"at\": [-2, 4], \"w\": 1}]}}}",
                               &s) == BM_OK);
  EXPECT(bm_seg_mass(s, x, y, &d, NULL) == BM_ERR_DEGENERATE);
  bm_scenario_free(s);

  EXPECT(bm_scenario_from_json("{\"seed\": 1, \"backend\": \"exact2d\", \"scenario\": {\"builder\": \"crofton\","
                               " \"dim\": 3}}",
                               &s) == BM_ERR_UNSUPPORTED_BACKEND);

  double value = 0.0, half = 0.0;
  int warn = 0, code = -1;
  EXPECT(bm_calibrate(2, 10, 1, NULL, &value, &half, &warn, &code) == BM_OK);
  EXPECT(warn == 1);
  EXPECT(code == 0);
  EXPECT(bm_calibrate(1, 10, 1, NULL, &value, &half, &warn, &code) == BM_ERR_INVALID_ARGUMENT);

  if (argc > 2) {
    /* argv[1]: config file, argv[2]: output directory */
    char path[1024];
    EXPECT(bm_run_config(argv[1], argv[2], &code, path, sizeof path) == BM_OK);
    EXPECT(code == 0);
    EXPECT(strlen(path) > 0);
    FILE* fh = fopen(path, "r");
    EXPECT(fh != NULL);
    if (fh) fclose(fh);
  }

  if (failures) fprintf(stderr, "%d failures\n", failures);
  return failures ? 1 : 0;
}
