#include "uamo/cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "uamo/analytics.hpp"
#include "uamo/cli/output.hpp"
#include "uamo/dynamics.hpp"
#include "uamo/optics.hpp"
#include "uamo/parallel.hpp"
#include "uamo/spectral.hpp"

namespace uamo::cli {

namespace fs = std::filesystem;

namespace {

Variant parse_variant(const std::string& v) {
  if (v == "symmetrized") return Variant::Symmetrized;
  if (v == "dual") return Variant::Dual;
  if (v == "lossy") return Variant::LossyRealized;
  return Variant::Standard;
}

std::string time_column(const std::string& stem, int steps) { return stem + "_t" + std::to_string(steps); }

SpinorState random_state(const Lattice& lat, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  SpinorState s(lat.dim());
  for (int k = 0; k < lat.dim(); ++k) {
    double re = g(rng);
    double im = g(rng);
    s(k) = cplx(re, im);
  }
  return s / s.norm();
}

json classification_json(const Classification& c) {
  return json{{"phase", to_string(c.phase)},
              {"boundary_zone", c.boundary_zone},
              {"max_unit_deviation", c.max_unit_deviation},
              {"min_abs_log_modulus", c.min_abs_log_modulus},
              {"max_abs_im_e", c.max_abs_im_e},
              {"near_unit_count", c.near_unit_count},
              {"tol_unit", c.tol_unit},
              {"tol_gap", c.tol_gap}};
}

json estimate_json(const TransitionEstimate& t) {
  json j;
  j["first"] = t.first_found ? json(t.first) : json(nullptr);
  j["second"] = t.second_found ? json(t.second) : json(nullptr);
  return j;
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  std::vector<bool> used(b.size(), false);
  double worst = 0.0;
  for (cplx x : a) {
    double best = INFINITY;
    size_t arg = 0;
    for (size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(x - b[j]);
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<cplx> eigenvalues(const CMatrix& m) {
  std::vector<cplx> v;
  CMatrix unused;
  dense_eigen(m, false, v, unused);
  return v;
}

ModelParams make_params(double l1, double l2, double eta, double theta, FluxSpec flux) {
  ModelParams p;
  p.lambda1 = l1;
  p.lambda2 = l2;
  p.eta = eta;
  p.theta = theta;
  p.flux = flux;
  return p;
}

}  // namespace

CommandOutput cmd_evolve(const RunConfig& c) {
  ModelParams p = model_params(c);
  Lattice lat = lattice(c);
  FloquetOperator op = build_floquet(p, lat, parse_variant(c.variant));
  CommandOutput r;
  SpinorState init;
  if (c.initial == "no_loss" || c.initial == "min_loss") {
    EigenOptions o;
    o.vectors = true;
    o.tol = tolerances(c);
    NoLossState chosen;
    SpectrumResult spectrum = eigendecompose(build_floquet(p, lat), o);
    init = c.initial == "no_loss" ? prepare_no_loss_initial(spectrum, lat, c.tol_no_loss, &chosen)
                                  : prepare_min_loss_initial(spectrum, lat, &chosen);
    r.summary["no_loss_state"] = {{"re_E", chosen.quasienergy.real()},
                                  {"im_E", chosen.quasienergy.imag()},
                                  {"center", chosen.center},
                                  {"participation_ratio", chosen.participation_ratio}};
  } else if (c.initial == "random") {
    init = random_state(lat, c.seed);
  } else {
    init = default_initial_state(lat);
  }
  auto traj = evolve(init, op, c.steps);
  ObservableSeries obs = observe(traj, lat);

  CsvTable dist({"t", "x", "p"});
  CsvTable series({"t", "sigma", "x2", "overallP", "mean"});
  for (int t = 0; t <= c.steps; ++t) {
    const Distribution& d = obs.distributions[t];
    for (size_t i = 0; i < d.p.size(); ++i) dist.add({double(t), double(d.x[i]), d.p[i]});
    series.add({double(t), obs.sigma[t], obs.second_moment[t], obs.overall_p[t], obs.mean[t]});
  }
  r.files.push_back(write_table(c.out, "distribution", dist, c));
  r.files.push_back(write_table(c.out, "observables", series, c));

  if (c.poisson_counts > 0.0) {
    std::mt19937_64 rng(c.seed);
    CsvTable resampled({"t", "x", "p"});
    CsvTable sim({"t", "similarity"});
    for (int t = 0; t <= c.steps; ++t) {
      const Distribution& d = obs.distributions[t];
      auto q = poisson_resample(d.p, c.poisson_counts, rng);
      for (size_t i = 0; i < q.size(); ++i) resampled.add({double(t), double(d.x[i]), q[i]});
      sim.add({double(t), similarity(d.p, q)});
    }
    r.files.push_back(write_table(c.out, "resampled", resampled, c));
    r.files.push_back(write_table(c.out, "similarity", sim, c));
  }
  r.summary["sigma_final"] = obs.sigma.back();
  r.summary["overallP_final"] = obs.overall_p.back();
  if (!op.warnings().empty()) r.summary["warnings"] = op.warnings();
  return r;
}

CommandOutput cmd_spectrum(const RunConfig& c) {
  Lattice lat = lattice(c);
  const int count = int(c.etas.size());
  std::vector<SpectrumResult> results(count);
  std::vector<std::vector<NoLossState>> no_loss(count);
  parallel_for(count, c.threads, [&](int k) {
    RunConfig ck = c;
    ck.eta = c.etas[k];
    EigenOptions o;
    o.vectors = true;
    o.tol = tolerances(c);
    results[k] = eigendecompose(build_floquet(model_params(ck), lat, parse_variant(c.variant)), o);
    no_loss[k] = find_no_loss_states(results[k], lat, c.tol_no_loss);
  });

  CsvTable table({"eta", "re_z", "im_z", "re_E", "im_E"});
  json classes = json::array();
  for (int k = 0; k < count; ++k) {
    const SpectrumResult& s = results[k];
    for (int m = 0; m < s.size(); ++m)
      table.add({c.etas[k], s.eigenvalues[m].real(), s.eigenvalues[m].imag(), s.quasienergies[m].real(),
                 s.quasienergies[m].imag()});
    json entry = classification_json(s.classification);
    entry["eta"] = c.etas[k];
    json states = json::array();
    for (const auto& n : no_loss[k])
      states.push_back({{"re_E", n.quasienergy.real()},
                        {"im_E", n.quasienergy.imag()},
                        {"center", n.center},
                        {"participation_ratio", n.participation_ratio}});
    entry["no_loss_states"] = states;
    classes.push_back(entry);
  }
  CommandOutput r;
  r.files.push_back(write_table(c.out, "eigenvalues", table, c));
  r.files.push_back(write_document(c.out, "classification.json", json{{"spectra", classes}}, c));
  json phases = json::array();
  for (const auto& e : classes) phases.push_back(e["phase"]);
  r.summary["phases"] = phases;
  return r;
}

CommandOutput cmd_winding(const RunConfig& c) {
  Lattice lat = lattice(c);
  WindingOptions wo;
  wo.m_initial = c.m_initial;
  wo.m_cap = c.m_cap;
  wo.gap_threshold = c.gap_threshold;
  std::vector<std::vector<WindingResult>> profiles;
  for (double eta : c.etas) {
    RunConfig ck = c;
    ck.eta = eta;
    profiles.push_back(winding_profile(model_params(ck), lat, c.z_count, wo, c.threads));
  }

  CsvTable table({"eta", "re_z", "im_z", "nu_raw", "nu_quantized", "valid"});
  json regimes = json::array();
  for (size_t k = 0; k < c.etas.size(); ++k) {
    int valid = 0, wound = 0;
    for (const auto& w : profiles[k]) {
      table.add({c.etas[k], w.z.real(), w.z.imag(), w.nu, double(w.nu_hat), w.valid ? 1.0 : 0.0});
      if (!w.valid) continue;
      ++valid;
      if (w.nu_hat != 0) ++wound;
    }
    std::string pattern = valid == 0 ? "undetermined" : wound == 0 ? "all_zero" : wound == valid ? "all_wound" : "mixed";
    regimes.push_back({{"eta", c.etas[k]}, {"valid", valid}, {"wound", wound}, {"pattern", pattern}});
  }

  ScanOptions so;
  so.coarse_step = c.scan_step;
  so.resolution = c.scan_resolution;
  so.tol = tolerances(c);
  so.threads = c.threads;
  TransitionScan scan = locate_transitions(c.lambda1, c.lambda2, c.theta, c.scan_sizes, so);
  json per_size = json::array();
  for (const auto& s : scan.per_size) {
    json e = estimate_json(s.estimate);
    e["size"] = s.size;
    per_size.push_back(e);
  }

  json summary{{"regimes", regimes},
               {"profile_transitions", estimate_json(transitions_from_profiles(c.etas, profiles))},
               {"bisection", {{"per_size", per_size}, {"estimate", estimate_json(scan.estimate)}}}};
  CommandOutput r;
  r.files.push_back(write_table(c.out, "winding", table, c));
  r.files.push_back(write_document(c.out, "summary.json", summary, c));
  r.summary = summary;
  return r;
}

CommandOutput cmd_phase_diagram(const RunConfig& c) {
  const int n = c.grid;
  Lattice lat = lattice(c);
  FluxSpec flux = parse_flux(c.flux, c.size);
  std::vector<double> sigma(n * n), x2(n * n);
  parallel_for(n * n, c.threads, [&](int k) {
    double a = (k / n + 0.5) / n, b = (k % n + 0.5) / n;
    auto traj = evolve(default_initial_state(lat), build_floquet(make_params(a, b, c.eta, c.theta, flux), lat), c.steps);
    Distribution d = position_distribution(traj.back(), lat);
    sigma[k] = standard_deviation(d);
    x2[k] = second_moment(d);
  });
  CsvTable table({"lambda1", "lambda2", time_column("sigma", c.steps), time_column("x2", c.steps), "boundary_lambda2"});
  for (int k = 0; k < n * n; ++k) {
    double a = (k / n + 0.5) / n, b = (k % n + 0.5) / n;
    table.add({a, b, sigma[k], x2[k], localization_boundary(a, c.eta)});
  }
  CommandOutput r;
  r.files.push_back(write_table(c.out, "phase", table, c));
  r.summary["points"] = n * n;
  return r;
}

CommandOutput cmd_critical(const RunConfig& c) {
  CriticalPoints cp = critical_points(c.lambda1, c.lambda2);
  json doc{{"lambda1", c.lambda1}, {"lambda2", c.lambda2}, {"lambda0", cp.lambda0},
           {"L", cp.L_hermitian},  {"eta_pt", cp.eta_pt},    {"eta0", cp.eta0}};
  CommandOutput r;
  r.files.push_back(write_document(c.out, "critical.json", doc, c));
  r.summary = doc;
  return r;
}

const std::vector<std::string>& validation_check_names() {
  static const std::vector<std::string> names = {
      "unitarity",        "coin_decomposition", "shift_decomposition",     "skin_similarity", "duality",
      "pt_relation",      "spin_swap_inverse",  "bloch_dispersion",        "hatano_nelson_lyapunov"};
  return names;
}

namespace {

ValidationCheck run_check(const std::string& name, bool fault) {
  ValidationCheck v;
  v.name = name;
  if (name == "unitarity") {
    v.tolerance = 1e-12;
    v.detail = "max |W^dag W - I| at eta=0, rings N=55 and N=89";
    for (int n : {55, 89}) {
      Lattice lat = Lattice::ring(n);
      FluxSpec flux = FluxSpec::fibonacci(n);
      for (auto [l1, l2] : {std::pair{0.25, 0.5}, std::pair{0.67, 0.2}, std::pair{1.0, 1.0}}) {
        CMatrix w = build_floquet(make_params(l1, l2, 0.0, 0.13, flux), lat).dense();
        v.residual = std::max(v.residual, max_abs(w.adjoint() * w - CMatrix::Identity(w.rows(), w.cols())));
      }
    }
  } else if (name == "coin_decomposition") {
    v.tolerance = 1e-12;
    v.detail = "max |q(phi3) h(phi2) q(phi1) - Q_x| over x in [-20,20]";
    for (auto [l1, l2, th] : {std::tuple{0.25, 0.5, 0.0}, std::tuple{0.5, 0.9, 0.37}, std::tuple{0.7, 1.0, 0.8}})
      for (int x = -20; x <= 20; ++x)
        v.residual = std::max(v.residual, coin_decomposition(x, make_params(l1, l2, 0.1, th, FluxSpec::golden()), fault).residual);
  } else if (name == "shift_decomposition") {
    v.tolerance = 1e-12;
    v.detail = "max |e^{2 pi eta} M_E S'2 h S'1 h M_E - S|, open N=21 and ring N=34";
    for (double eta : {0.0, 0.1, -0.2}) {
      v.residual = std::max(v.residual,
                            shift_decomposition(make_params(0.6, 0.4, eta, 0.0, FluxSpec::golden()), Lattice::open(21), fault).residual);
      v.residual = std::max(v.residual,
                            shift_decomposition(make_params(0.3, 0.4, eta, 0.0, FluxSpec::fibonacci(34)), Lattice::ring(34), fault).residual);
    }
  } else if (name == "skin_similarity") {
    v.tolerance = 1e-10;
    v.detail = "max |V W_0 V^-1 - W_eta| on an open chain N=41";
    Lattice lat = Lattice::open(41);
    for (double eta : {0.05, 0.1, -0.15}) {
      CMatrix w0 = build_floquet(make_params(0.4, 0.6, 0.0, 0.2, FluxSpec::golden()), lat).dense();
      CMatrix we = build_floquet(make_params(0.4, 0.6, eta, 0.2, FluxSpec::golden()), lat).dense();
      CMatrix s = skin_matrix(lat, eta) * w0 * skin_matrix(lat, eta, true);
      v.residual = std::max(v.residual, max_abs(s - we));
    }
  } else if (name == "duality") {
    v.tolerance = 1e-9;
    v.detail = "spectral distance: standard vs dual at eta=0 and theta=0, standard vs complexified dual at eta=0.2, ring N=55";
    Lattice lat = Lattice::ring(55);
    ModelParams p = make_params(0.3, 0.7, 0.0, 0.0, FluxSpec::fibonacci(55));
    auto base = eigenvalues(build_floquet(p, lat).dense());
    v.residual = multiset_distance(base, eigenvalues(build_floquet(p, lat, Variant::Dual).dense()));
    p.eta = 0.2;
    v.residual = std::max(v.residual, multiset_distance(eigenvalues(build_floquet(p, lat).dense()),
                                                        eigenvalues(build_complexified_dual(p, lat).dense())));
  } else if (name == "pt_relation") {
    v.tolerance = 1e-10;
    v.detail = "(PT) W (PT)^-1 - W^-1 with PT = sum |x><-x| (x) sigma_z K, theta=0, open N=21";
    for (double eta : {0.0, 0.1})
      v.residual = std::max(v.residual, verify_pt_symmetry(make_params(0.25, 0.5, eta, 0.0, FluxSpec::golden()),
                                                           Lattice::open(21)).max_deviation);
  } else if (name == "spin_swap_inverse") {
    v.tolerance = 1e-10;
    v.detail = "sigma_x W sigma_x - W^-1 on a ring N=55";
    for (double eta : {0.0, 0.2})
      v.residual = std::max(v.residual, verify_spin_swap_inverse(make_params(0.25, 0.5, eta, 0.3, FluxSpec::fibonacci(55)),
                                                                 Lattice::ring(55)).max_deviation);
  } else if (name == "bloch_dispersion") {
    v.tolerance = 1e-9;
    v.detail = "lambda2=0 spectrum vs -l1 sin k +- i sqrt(1 - l1^2 sin^2 k), ring N=34";
    const int n = 34;
    const double l1 = 0.6;
    std::vector<cplx> expected;
    for (int j = 0; j < n; ++j) {
      double sk = std::sin(two_pi * j / n);
      double im = std::sqrt(1.0 - l1 * l1 * sk * sk);
      expected.push_back({-l1 * sk, im});
      expected.push_back({-l1 * sk, -im});
    }
    auto got = eigenvalues(build_floquet(make_params(l1, 0.0, 0.0, 0.0, FluxSpec::fibonacci(n)), Lattice::ring(n)).dense());
    v.residual = multiset_distance(got, expected);
  } else if (name == "hatano_nelson_lyapunov") {
    v.tolerance = 1e-2;
    v.detail = "transfer-matrix rate (n=1e5) vs log(lambda)+2 pi |eta| on spectrum energies, ring N=233";
    for (auto [lambda, eta] : {std::pair{2.0, 0.0}, std::pair{1.5, 0.05}}) {
      HatanoNelsonParams hp;
      hp.lambda = lambda;
      hp.eta = eta;
      hp.size = 233;
      hp.flux = FluxSpec::fibonacci(233);
      std::vector<double> energies;
      for (cplx e : eigenvalues(hatano_nelson_matrix(hp, Boundary::Periodic)))
        if (std::abs(e.imag()) < 1e-6) energies.push_back(e.real());
      HatanoNelsonParams golden = hp;
      golden.flux = FluxSpec::golden();
      for (size_t k = 0; k < energies.size(); k += 29)
        v.residual = std::max(v.residual, std::abs(transfer_matrix_lyapunov_hn(golden, energies[k], 100000) -
                                                   hatano_nelson_lyapunov(lambda, eta)));
    }
  }
  v.passed = v.residual <= v.tolerance;
  return v;
}

}  // namespace

std::vector<ValidationCheck> run_validation(bool inject_fault, const std::vector<std::string>& only) {
  const auto& names = validation_check_names();
  for (const auto& n : only)
    require(std::find(names.begin(), names.end(), n) != names.end(), "unknown validation check", n);
  std::vector<ValidationCheck> out;
  for (const auto& n : names)
    if (only.empty() || std::find(only.begin(), only.end(), n) != only.end()) out.push_back(run_check(n, inject_fault));
  return out;
}

CommandOutput cmd_validate(const RunConfig& c) {
  auto checks = run_validation(c.inject_fault, c.checks);
  json list = json::array();
  bool ok = true;
  std::string failed;
  for (const auto& v : checks) {
    list.push_back({{"name", v.name},
                    {"residual", v.residual},
                    {"tolerance", v.tolerance},
                    {"passed", v.passed},
                    {"detail", v.detail}});
    ok = ok && v.passed;
    if (!v.passed) failed += (failed.empty() ? "" : ",") + v.name;
  }
  json report{{"checks", list}, {"passed", ok}, {"injected_fault", c.inject_fault}};
  CommandOutput r;
  r.files.push_back(write_document(c.out, "report.json", report, c));
  r.summary = report;
  if (!ok) {
    r.exit_code = exit_validation;
    r.summary["failed"] = failed;
  }
  return r;
}

std::vector<std::pair<std::string, RunConfig>> figure_configs(const std::string& figure) {
  std::vector<std::pair<std::string, RunConfig>> out;
  auto make = [](const std::string& command, double l1, double l2, double eta) {
    RunConfig c;
    c.command = command;
    c.lambda1 = l1;
    c.lambda2 = l2;
    c.eta = eta;
    return c;
  };
  if (figure == "fig1a") {
    RunConfig c = make("spectrum", 0.25, 0.5, 0.0);
    for (int k = 0; k <= 10; ++k) c.etas.push_back(0.05 * k);
    out.emplace_back("spectrum", c);
  } else if (figure == "fig2g") {
    out.emplace_back("ballistic", make("evolve", 0.67, 0.2, 0.0));
    out.emplace_back("critical", make("evolve", 0.5, 0.5, 0.0));
    out.emplace_back("localized", make("evolve", 0.2, 0.67, 0.0));
  } else if (figure == "fig2h") {
    out.emplace_back("phase", make("phase-diagram", 0.5, 0.5, 0.0));
  } else if (figure == "figS3") {
    out.emplace_back("phase", make("phase-diagram", 0.5, 0.5, 0.1));
  } else if (figure == "fig3") {
    out.emplace_back("pt_broken", make("evolve", 0.5, 0.25, 0.05));
    out.emplace_back("pt_unbroken", make("evolve", 0.25, 0.5, 0.05));
  } else if (figure == "fig4") {
    RunConfig s = make("spectrum", 0.25, 0.5, 0.0);
    s.etas = {0.0, 0.05, 0.119, 0.135, 0.2, 0.328, 0.335, 0.4};
    out.emplace_back("spectrum", s);
    RunConfig w = make("winding", 0.25, 0.5, 0.0);
    w.etas = {0.0, 0.05, 0.2, 0.4};
    w.scan_sizes = {89, 144};
    out.emplace_back("winding", w);
    for (double eta : {0.135, 0.335}) {
      std::string tag = eta < 0.2 ? "0135" : "0335";
      RunConfig d = make("evolve", 0.25, 0.5, eta);
      d.boundary = "periodic";
      out.emplace_back("default_" + tag, d);
      RunConfig n = d;
      if (eta < 0.2) {
        n.initial = "no_loss";
        n.size = 144;  // the odd N=89 ring has no state inside the no-loss tolerance at 0.135
      } else {
        n.initial = "min_loss";  // fully complex: no state is loss-free
      }
      out.emplace_back(n.initial + "_" + tag, n);
    }
  } else {
    require(false, "unknown figure", figure);
  }
  return out;
}

CommandOutput cmd_reproduce(const RunConfig& c) {
  CommandOutput r;
  json runs = json::object();
  for (auto [name, sub] : figure_configs(c.figure)) {
    sub.out = (fs::path(c.out) / c.figure / name).string();
    sub.threads = c.threads;
    sub.format = c.format;
    sub.seed = c.seed;
    CommandOutput o = run_command(resolve(sub));
    r.files.insert(r.files.end(), o.files.begin(), o.files.end());
    runs[name] = o.summary;
    r.exit_code = std::max(r.exit_code, o.exit_code);
  }
  r.summary = json{{"figure", c.figure}, {"runs", runs}};
  r.files.push_back(write_document((fs::path(c.out) / c.figure).string(), "summary.json", r.summary, c));
  return r;
}

CommandOutput run_command(const RunConfig& c) {
  if (c.command == "evolve") return cmd_evolve(c);
  if (c.command == "spectrum") return cmd_spectrum(c);
  if (c.command == "winding") return cmd_winding(c);
  if (c.command == "phase-diagram") return cmd_phase_diagram(c);
  if (c.command == "critical") return cmd_critical(c);
  if (c.command == "validate") return cmd_validate(c);
  if (c.command == "reproduce") return cmd_reproduce(c);
  throw Error(ErrorKind::InvalidArgument, "unknown command", c.command);
}

namespace {

const char* code_name(int exit_code) {
  switch (exit_code) {
    case exit_validation: return "validation_failure";
    case exit_invalid_config: return "invalid_config";
    default: return "numerical_failure";
  }
}

int report_error(std::ostream& err, int exit_code, const std::string& message, const std::string& context) {
  err << json{{"code", code_name(exit_code)}, {"message", message}, {"context", context}}.dump() << "\n";
  return exit_code;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return exit_invalid_config;
    case ErrorKind::Validation: return exit_validation;
    default: return exit_numerical;
  }
}

struct Flags {
  std::optional<std::string> config, out, format, boundary, flux, variant, initial;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, size, steps, grid, z_count;
  std::optional<double> lambda1, lambda2, eta, theta, poisson_counts;
  std::vector<double> etas;
  std::vector<int> scan_sizes;
  std::vector<std::string> checks;
  std::string figure;
  bool inject_fault = false;
};

template <class T>
void overlay(T& target, const std::optional<T>& v) {
  if (v) target = *v;
}

int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n ? int(n) : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Floquet quasiperiodic quantum-walk laboratory", "uamo_lab"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config, "JSON config file; command-line flags override it");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--seed", f.seed, "RNG seed for resampling and random initial states");
  app.add_option("--threads", f.threads, "worker threads (UAMO_LAB_THREADS overrides)");
  app.add_option("--format", f.format, "table format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--lambda1", f.lambda1, "shift coupling");
  app.add_option("--lambda2", f.lambda2, "coin coupling");
  app.add_option("--eta", f.eta, "non-reciprocity");
  app.add_option("--etas", f.etas, "eta sweep")->delimiter(',');
  app.add_option("--theta", f.theta, "quasiperiodic phase in [0,1)");
  app.add_option("--size", f.size, "lattice size N");
  app.add_option("--boundary", f.boundary, "auto, open or periodic");
  app.add_option("--flux", f.flux, "golden, fibonacci or p/q");
  app.add_option("--variant", f.variant, "standard, symmetrized, dual or lossy");
  app.add_option("--steps", f.steps, "time steps");
  app.add_option("--initial", f.initial, "default, no_loss, min_loss or random");
  app.add_option("--poisson-counts", f.poisson_counts, "counts per step for shot-noise resampling (0 disables)");
  app.add_option("--grid", f.grid, "phase-diagram resolution per axis");
  app.add_option("--z-count", f.z_count, "winding base points per eta");
  app.add_option("--scan-sizes", f.scan_sizes, "ring sizes for transition bisection")->delimiter(',');
  app.add_option("--checks", f.checks, "subset of validation checks")->delimiter(',');
  app.add_flag("--inject-fault", f.inject_fault, "flip a sign in the half-wave plate (self-test)");

  app.add_subcommand("evolve", "time evolution, distribution.csv and observables.csv");
  app.add_subcommand("spectrum", "ring spectrum and PT classification");
  app.add_subcommand("winding", "spectral winding profiles and transition estimates");
  app.add_subcommand("phase-diagram", "sigma / <x^2> grid over (lambda1, lambda2)");
  auto* critical = app.add_subcommand("critical", "closed-form critical values");
  critical->add_option("lambda1", f.lambda1, "shift coupling");
  critical->add_option("lambda2", f.lambda2, "coin coupling");
  app.add_subcommand("validate", "identity suite; exit 1 if any check fails");
  auto* reproduce = app.add_subcommand("reproduce", "canned figure configurations");
  reproduce->add_option("figure", f.figure, "fig1a, fig2g, fig2h, fig3, fig4 or figS3")->required();

  std::vector<const char*> argv{"uamo_lab"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, exit_invalid_config, e.what(), "command line");
  }

  try {
    RunConfig c;
    c.threads = default_threads();
    if (f.config) c = load_config(*f.config, c);
    c.command = app.get_subcommands().front()->get_name();
    overlay(c.out, f.out);
    overlay(c.format, f.format);
    overlay(c.boundary, f.boundary);
    overlay(c.flux, f.flux);
    overlay(c.variant, f.variant);
    overlay(c.initial, f.initial);
    overlay(c.seed, f.seed);
    overlay(c.threads, f.threads);
    overlay(c.size, f.size);
    overlay(c.steps, f.steps);
    overlay(c.grid, f.grid);
    overlay(c.z_count, f.z_count);
    overlay(c.lambda1, f.lambda1);
    overlay(c.lambda2, f.lambda2);
    overlay(c.eta, f.eta);
    overlay(c.theta, f.theta);
    overlay(c.poisson_counts, f.poisson_counts);
    if (!f.etas.empty()) c.etas = f.etas;
    if (!f.scan_sizes.empty()) c.scan_sizes = f.scan_sizes;
    if (!f.checks.empty()) c.checks = f.checks;
    if (!f.figure.empty()) c.figure = f.figure;
    if (f.inject_fault) c.inject_fault = true;
    if (const char* env = std::getenv("UAMO_LAB_THREADS")) {
      try {
        c.threads = std::stoi(env);
      } catch (const std::logic_error&) {
        throw Error(ErrorKind::InvalidArgument, "UAMO_LAB_THREADS must be an integer", env);
      }
    }

    CommandOutput r = run_command(resolve(c));
    json summary{{"command", c.command}, {"exit_code", r.exit_code}, {"files", r.files}, {"result", r.summary}};
    out << summary.dump(2) << "\n";
    if (r.exit_code != exit_ok)
      return report_error(err, r.exit_code, "validation checks failed", r.summary.value("failed", std::string{}));
    return exit_ok;
  } catch (const Error& e) {
    return report_error(err, exit_code_for(e.kind()), e.what(), e.context());
  } catch (const std::exception& e) {
    return report_error(err, exit_numerical, e.what(), "unexpected");
  }
}

}  // namespace uamo::cli
