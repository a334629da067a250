#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "uamo/core_model.hpp"
#include "uamo/spectral.hpp"

namespace uamo::cli {

using json = nlohmann::json;

inline constexpr int format_version = 1;

// One flat document for every command; each command reads the fields it needs.
struct RunConfig {
  std::string command;
  std::string figure;  // reproduce only

  double lambda1 = 0.25;
  double lambda2 = 0.5;
  double eta = 0.0;
  double theta = 0.0;
  std::vector<double> etas;  // spectrum / winding sweeps; empty means {eta}

  std::string boundary = "auto";  // auto | open | periodic
  std::string flux = "auto";      // auto | golden | fibonacci | p/q
  int size = 0;                   // 0: command default
  std::string variant = "standard";

  int steps = 6;
  std::string initial = "default";  // default | no_loss | min_loss | random
  double poisson_counts = 0.0;      // > 0 enables shot-noise resampling
  std::uint64_t seed = 1;

  int grid = 32;

  int z_count = 32;
  int m_initial = 256;
  int m_cap = 8192;
  double gap_threshold = 0.01;
  std::vector<int> scan_sizes;  // winding bisection sizes; empty means {89, 144}
  double scan_step = 0.01;
  double scan_resolution = 1e-3;

  double tol_unit_scale = 1e-6;
  double tol_gap = 1e-4;
  double tol_no_loss = 1e-4;

  std::vector<std::string> checks;  // validate; empty means all
  bool inject_fault = false;

  std::string format = "csv";

  // run environment, never embedded in outputs
  std::string out = "out";
  int threads = 1;
};

json to_json(const RunConfig& c);
// Overlays the keys of `j` on `base`; unknown keys and wrong types are errors.
RunConfig from_json(const json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

Tolerances tolerances(const RunConfig& c);
FluxSpec parse_flux(const std::string& text, int size);

// Resolves "auto" fields and command defaults, then validates against the
// library preconditions. Throws uamo::Error(InvalidArgument).
RunConfig resolve(RunConfig c);

ModelParams model_params(const RunConfig& c);
Lattice lattice(const RunConfig& c);

}  // namespace uamo::cli
