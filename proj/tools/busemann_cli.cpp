// busemann: run audits, evaluate d and f pointwise, calibrate the kmw constant.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "busemann/busemann.h"
#include "json.hpp"

namespace {

using Handle = std::unique_ptr<bm_scenario, decltype(&bm_scenario_free)>;

std::vector<double> parse_coords(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) throw CLI::ValidationError("bad coordinate list '" + text + "'");
    out.push_back(v);
  }
  return out;
}

int report_error(bm_status s) {
  std::cerr << "error: " << bm_last_error() << "\n";
  return s == BM_ERR_DEGENERATE ? 2 : 1;
}

std::string csv_list(const std::vector<double>& v) {
  std::string out;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out += (i ? "," : "") + std::string(buf);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Busemann-type hyperplane metrics: audits, pointwise evaluation, calibration"};
  app.require_subcommand(1);
  std::string out_dir = ".";
  std::string format = "json";
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--format", format, "eval output format")->check(CLI::IsMember({"json", "csv"}));

  std::string config;
  auto* run = app.add_subcommand("run", "run the audits of a configuration and write the report");
  run->add_option("config", config, "configuration file")->required();
  run->fallthrough();

  std::string eval_config;
  std::vector<std::vector<std::string>> pair_args;
  std::vector<std::string> point_args;
  auto* ev = app.add_subcommand("eval", "print d(x,y) and f(x) as JSON lines");
  ev->add_option("config", eval_config, "configuration file")->required();
  ev->add_option("--pair", pair_args, "x1,y1 x2,y2")->expected(2);
  ev->add_option("--point", point_args, "x,y");
  ev->fallthrough();

  std::size_t dim = 2;
  std::uint64_t budget = 0, seed = 0;
  std::string cal_file;
  auto* cal = app.add_subcommand("calibrate", "estimate the kmw constant by Monte Carlo");
  cal->add_option("--dim", dim, "dimension")->required()->check(CLI::Range(2, 8));
  cal->add_option("--budget", budget, "sample budget")->required();
  cal->add_option("--seed", seed, "seed")->required();
  cal->add_option("--file", cal_file, "calibration file name (default calibration_n<dim>.json under --out)");
  cal->fallthrough();

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    int code = 0;
    char path[4096];
    const bm_status s = bm_run_config(config.c_str(), out_dir.c_str(), &code, path, sizeof path);
    if (s != BM_OK) {
      std::cerr << "error: " << bm_last_error() << "\n";
      return 1;
    }
    std::cout << (code == 0 ? "PASS" : "FAIL") << " report " << path << "\n";
    return code;
  }

  if (*ev) {
    if (pair_args.empty() && point_args.empty()) {
      std::cerr << "error: eval needs --pair or --point\n";
      return 1;
    }
    bm_scenario* raw = nullptr;
    if (const bm_status s = bm_scenario_from_file(eval_config.c_str(), &raw); s != BM_OK) {
      std::cerr << "error: " << bm_last_error() << "\n";
      return 1;
    }
    Handle h(raw, &bm_scenario_free);
    const std::size_t n = bm_scenario_dim(h.get());
    const std::string backend = bm_scenario_backend(h.get());
    bool csv_header = false;
    try {
      for (const auto& pr : pair_args) {
        if (pr.size() != 2) throw CLI::ValidationError("--pair takes two points");
        const auto x = parse_coords(pr.at(0));
        const auto y = parse_coords(pr.at(1));
        if (x.size() != n || y.size() != n) throw CLI::ValidationError("pair coordinates must have " + std::to_string(n) + " entries");
        double d = 0.0, se = 0.0, t = 0.0, tse = 0.0;
        if (auto s = bm_seg_mass(h.get(), x.data(), y.data(), &d, &se); s != BM_OK) return report_error(s);
        if (auto s = bm_transversal_integral(h.get(), x.data(), y.data(), &t, &tse); s != BM_OK) return report_error(s);
        if (format == "json") {
          nlohmann::ordered_json j{{"x", x}, {"y", y}, {"d", d}, {"stderr", se}, {"transversal", t},
                                   {"transversalStderr", tse}, {"backend", backend}};
          std::cout << j.dump() << "\n";
        } else {
          if (!csv_header) std::cout << "kind,coords,d,stderr,transversal,transversal_stderr,backend\n";
          csv_header = true;
          std::cout << "pair,\"" << csv_list(x) << ";" << csv_list(y) << "\"," << csv_list({d, se, t, tse}) << ","
                    << backend << "\n";
        }
      }
      for (const auto& p : point_args) {
        const auto x = parse_coords(p);
        if (x.size() != n) throw CLI::ValidationError("point coordinates must have " + std::to_string(n) + " entries");
        std::vector<double> f(n), se(n);
        if (auto s = bm_embed(h.get(), x.data(), f.data(), se.data()); s != BM_OK) return report_error(s);
        if (format == "json") {
          nlohmann::ordered_json j{{"x", x}, {"f", f}, {"stderr", se}, {"backend", backend}};
          std::cout << j.dump() << "\n";
        } else {
          std::cout << "point,\"" << csv_list(x) << "\",\"" << csv_list(f) << "\",\"" << csv_list(se) << "\"," << backend
                    << "\n";
        }
      }
    } catch (const CLI::ValidationError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
    return 0;
  }

  if (cal_file.empty()) cal_file = "calibration_n" + std::to_string(dim) + ".json";
  const std::string path = (std::filesystem::path(out_dir) / cal_file).string();
  double value = 0.0, half = 0.0;
  int warn = 0, code = 0;
  if (bm_calibrate(dim, budget, seed, path.c_str(), &value, &half, &warn, &code) != BM_OK) {
    std::cerr << "error: " << bm_last_error() << "\n";
    return 1;
  }
  std::printf("C(%zu) = %.10g +- %.3g%s -> %s\n", dim, value, half, warn ? " (low sample warning)" : "", path.c_str());
  if (code != 0) std::cerr << "error: fit depends on |x| beyond its confidence interval\n";
  return code;
}
