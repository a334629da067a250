#include "uamo/cli/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace uamo::cli {

namespace {

using Setter = std::function<void(RunConfig&, const json&)>;

template <class T>
Setter field(T RunConfig::*member) {
  return [member](RunConfig& c, const json& v) { c.*member = v.get<T>(); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"command", field(&RunConfig::command)},
      {"figure", field(&RunConfig::figure)},
      {"lambda1", field(&RunConfig::lambda1)},
      {"lambda2", field(&RunConfig::lambda2)},
      {"eta", field(&RunConfig::eta)},
      {"theta", field(&RunConfig::theta)},
      {"etas", field(&RunConfig::etas)},
      {"boundary", field(&RunConfig::boundary)},
      {"flux", field(&RunConfig::flux)},
      {"size", field(&RunConfig::size)},
      {"variant", field(&RunConfig::variant)},
      {"steps", field(&RunConfig::steps)},
      {"initial", field(&RunConfig::initial)},
      {"poisson_counts", field(&RunConfig::poisson_counts)},
      {"seed", field(&RunConfig::seed)},
      {"grid", field(&RunConfig::grid)},
      {"z_count", field(&RunConfig::z_count)},
      {"m_initial", field(&RunConfig::m_initial)},
      {"m_cap", field(&RunConfig::m_cap)},
      {"gap_threshold", field(&RunConfig::gap_threshold)},
      {"scan_sizes", field(&RunConfig::scan_sizes)},
      {"scan_step", field(&RunConfig::scan_step)},
      {"scan_resolution", field(&RunConfig::scan_resolution)},
      {"tol_unit_scale", field(&RunConfig::tol_unit_scale)},
      {"tol_gap", field(&RunConfig::tol_gap)},
      {"tol_no_loss", field(&RunConfig::tol_no_loss)},
      {"checks", field(&RunConfig::checks)},
      {"inject_fault", field(&RunConfig::inject_fault)},
      {"format", field(&RunConfig::format)},
  };
  return table;
}

bool is_spectral(const std::string& command) { return command == "spectrum" || command == "winding"; }

void check_one_of(const std::string& value, std::initializer_list<const char*> allowed, const std::string& key) {
  for (const char* a : allowed)
    if (value == a) return;
  require(false, "unsupported value for " + key, key + "=" + value);
}

}  // namespace

json to_json(const RunConfig& c) {
  return json{{"command", c.command},
              {"figure", c.figure},
              {"lambda1", c.lambda1},
              {"lambda2", c.lambda2},
              {"eta", c.eta},
              {"theta", c.theta},
              {"etas", c.etas},
              {"boundary", c.boundary},
              {"flux", c.flux},
              {"size", c.size},
              {"variant", c.variant},
              {"steps", c.steps},
              {"initial", c.initial},
              {"poisson_counts", c.poisson_counts},
              {"seed", c.seed},
              {"grid", c.grid},
              {"z_count", c.z_count},
              {"m_initial", c.m_initial},
              {"m_cap", c.m_cap},
              {"gap_threshold", c.gap_threshold},
              {"scan_sizes", c.scan_sizes},
              {"scan_step", c.scan_step},
              {"scan_resolution", c.scan_resolution},
              {"tol_unit_scale", c.tol_unit_scale},
              {"tol_gap", c.tol_gap},
              {"tol_no_loss", c.tol_no_loss},
              {"checks", c.checks},
              {"inject_fault", c.inject_fault},
              {"format", c.format}};
}

RunConfig from_json(const json& j, RunConfig base) {
  require(j.is_object(), "config must be a JSON object");
  const auto& table = setters();
  for (const auto& [key, value] : j.items()) {
    auto it = table.find(key);
    require(it != table.end(), "unknown config key", key);
    try {
      it->second(base, value);
    } catch (const json::exception& e) {
      throw Error(ErrorKind::InvalidArgument, "config value has the wrong type", key + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  require(bool(in), "cannot open config file", path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::InvalidArgument, "config file is not valid JSON", path + ": " + e.what());
  }
  return from_json(j, std::move(base));
}

Tolerances tolerances(const RunConfig& c) {
  Tolerances t;
  t.unit_scale = c.tol_unit_scale;
  t.gap = c.tol_gap;
  t.no_loss = c.tol_no_loss;
  return t;
}

FluxSpec parse_flux(const std::string& text, int size) {
  if (text == "golden") return FluxSpec::golden();
  if (text == "fibonacci") return FluxSpec::fibonacci(size);
  auto slash = text.find('/');
  require(slash != std::string::npos, "flux must be golden, fibonacci or p/q", "flux=" + text);
  try {
    size_t used_p = 0, used_q = 0;
    long p = std::stol(text.substr(0, slash), &used_p);
    long q = std::stol(text.substr(slash + 1), &used_q);
    require(used_p == slash && used_q == text.size() - slash - 1, "malformed flux", "flux=" + text);
    return FluxSpec::approximant(p, q);
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::InvalidArgument, "malformed flux", "flux=" + text);
  }
}

RunConfig resolve(RunConfig c) {
  check_one_of(c.command,
               {"evolve", "spectrum", "winding", "phase-diagram", "critical", "validate", "reproduce"},
               "command");
  check_one_of(c.format, {"csv", "json"}, "format");
  check_one_of(c.boundary, {"auto", "open", "periodic"}, "boundary");
  check_one_of(c.variant, {"standard", "symmetrized", "dual", "lossy"}, "variant");
  check_one_of(c.initial, {"default", "no_loss", "min_loss", "random"}, "initial");
  require(c.threads >= 1, "threads must be positive", "threads=" + std::to_string(c.threads));
  require(c.steps >= 0, "steps must be non-negative", "steps=" + std::to_string(c.steps));
  require(c.poisson_counts >= 0.0, "poisson_counts must be non-negative");
  require(c.grid >= 1, "grid must be at least 1", "grid=" + std::to_string(c.grid));
  require(c.z_count >= 1, "z_count must be positive");
  require(c.m_initial >= 2 && c.m_cap >= c.m_initial, "need 2 <= m_initial <= m_cap");
  require(c.gap_threshold > 0.0, "gap_threshold must be positive");
  require(c.scan_step > 0.0 && c.scan_resolution > 0.0, "scan step and resolution must be positive");
  require(c.tol_unit_scale > 0.0 && c.tol_gap > 0.0 && c.tol_no_loss > 0.0, "tolerances must be positive");

  if (c.command == "reproduce") {
    check_one_of(c.figure, {"fig1a", "fig2g", "fig2h", "fig3", "fig4", "figS3"}, "figure");
    return c;
  }
  if (c.command == "validate") return c;
  if (c.command == "critical") {
    require(c.lambda1 > 0.0 && c.lambda1 <= 1.0, "lambda1 must lie in (0,1]", "lambda1=" + std::to_string(c.lambda1));
    require(c.lambda2 >= 0.0 && c.lambda2 <= 1.0, "lambda2 must lie in [0,1]", "lambda2=" + std::to_string(c.lambda2));
    return c;
  }

  if (c.boundary == "auto")
    c.boundary = (is_spectral(c.command) || c.initial == "no_loss" || c.initial == "min_loss") ? "periodic" : "open";
  if (is_spectral(c.command)) require(c.boundary == "periodic", "spectra need a periodic ring", c.command);
  if (c.command == "phase-diagram") require(c.boundary == "open", "phase diagrams run on open chains");
  if (c.initial == "no_loss" || c.initial == "min_loss")
    require(c.boundary == "periodic", "eigenstate preparation needs a periodic ring");
  if (c.size == 0) c.size = c.boundary == "open" ? 2 * c.steps + 5 : 89;
  if (c.flux == "auto") c.flux = c.boundary == "open" ? "golden" : "fibonacci";
  if (c.etas.empty()) c.etas = {c.eta};
  if (c.command == "winding" && c.scan_sizes.empty()) c.scan_sizes = {89, 144};

  ModelParams p = model_params(c);
  Lattice lat = lattice(c);
  for (double e : c.etas) {
    p.eta = e;
    p.validate();
  }
  p.eta = c.eta;
  p.validate();
  lat.validate_for(p);
  if (c.boundary == "open")
    require(c.size >= 2 * c.steps + 5, "open lattice too small for the number of steps",
            "size=" + std::to_string(c.size) + " steps=" + std::to_string(c.steps));
  for (int n : c.scan_sizes) FluxSpec::fibonacci(n);
  return c;
}

ModelParams model_params(const RunConfig& c) {
  ModelParams p;
  p.lambda1 = c.lambda1;
  p.lambda2 = c.lambda2;
  p.eta = c.eta;
  p.theta = c.theta;
  p.flux = parse_flux(c.flux, c.size);
  return p;
}

Lattice lattice(const RunConfig& c) {
  require(c.size >= 1, "size must be positive", "size=" + std::to_string(c.size));
  return c.boundary == "periodic" ? Lattice::ring(c.size) : Lattice::open(c.size);
}

}  // namespace uamo::cli
