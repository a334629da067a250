// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "uamo/analytics.hpp"
#include "uamo/cli/commands.hpp"
#include "uamo/dynamics.hpp"
#include "uamo/spectral.hpp"

using namespace uamo;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

ModelParams params(double l1, double l2, double eta, FluxSpec flux) {
  ModelParams p;
  p.lambda1 = l1;
  p.lambda2 = l2;
  p.eta = eta;
  p.flux = flux;
  return p;
}

std::vector<double> overall_probabilities(const SpinorState& init, const ModelParams& p, const Lattice& lat, int t) {
  auto traj = evolve(init, build_floquet(p, lat), t);
  std::vector<double> out;
  for (const auto& s : traj) out.push_back(overall_probability(s));
  return out;
}

double spread(const std::vector<double>& v) {
  return *std::max_element(v.begin(), v.end()) / *std::min_element(v.begin(), v.end());
}

Outcome critical_values() {
  CriticalPoints c = critical_points(0.25, 0.5);
  bool closed = std::abs(c.eta_pt - 0.119) <= 5e-4 && std::abs(c.eta0 - 0.328) <= 5e-4;
  auto start = std::chrono::steady_clock::now();
  TransitionScan scan = locate_transitions(0.25, 0.5, 0.0, {89, 144});
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& e = scan.estimate;
  bool first = e.first_found && std::abs(e.first - c.eta_pt) <= 5e-3;
  bool second = e.second_found && std::abs(e.second - c.eta0) <= 5e-3;
  Outcome o;
  o.passed = closed && first && second && secs < 300;
  o.detail = "closed form eta_pt=" + fmt("%.4f", c.eta_pt) + " eta0=" + fmt("%.4f", c.eta0) +
             "; bisection (N=89 -> 144) first=" + fmt("%.4f", e.first) + " second=" + fmt("%.4f", e.second) +
             " (tol 5e-3); " + fmt("%.0f s", secs);
  return o;
}

Outcome three_regimes() {
  const int n = 89;
  Lattice ring = Lattice::ring(n);
  EigenOptions o;
  o.vectors = true;
  auto spec = [&](double eta) { return eigendecompose(build_floquet(params(0.25, 0.5, eta, FluxSpec::fibonacci(n)), ring), o); };
  SpectrumResult a = spec(0.05), b = spec(0.135), c = spec(0.335);
  bool unbroken = a.classification.max_unit_deviation < a.classification.tol_unit &&
                  a.classification.phase == PtPhase::Unbroken;
  int localized_no_loss = 0;
  for (const auto& s : find_no_loss_states(b, ring, 1e-4))
    if (s.participation_ratio < n / 10.0) ++localized_no_loss;
  bool mixed = localized_no_loss >= 1;
  bool complex = c.classification.min_abs_log_modulus > 1e-4;
  Outcome r;
  r.passed = unbroken && mixed && complex;
  r.detail = "N=89: eta=0.05 max||z|-1|=" + fmt("%.1e", a.classification.max_unit_deviation) +
             " (" + to_string(a.classification.phase) + "); eta=0.135 localized no-loss states=" +
             std::to_string(localized_no_loss) + " (min|ln|z||=" + fmt("%.1e", b.classification.min_abs_log_modulus) +
             "); eta=0.335 min|ln|z||=" + fmt("%.3f", c.classification.min_abs_log_modulus);
  return r;
}

Outcome winding_quantization() {
  const int n = 89;
  Lattice ring = Lattice::ring(n);
  std::vector<std::string> patterns;
  bool quantized = true;
  for (double eta : {0.05, 0.2, 0.4}) {
    auto prof = winding_profile(params(0.25, 0.5, eta, FluxSpec::fibonacci(n)), ring, 32);
    int valid = 0, wound = 0;
    for (const auto& w : prof) {
      if (!w.valid) continue;
      ++valid;
      if (std::abs(w.nu - std::round(w.nu)) >= 1e-6 || std::abs(w.nu_hat) > 1) quantized = false;
      if (w.nu_hat != 0) ++wound;
    }
    patterns.push_back(valid == 0 ? "none" : wound == 0 ? "all0" : wound == valid ? "all" : "some");
  }
  Outcome o;
  o.passed = quantized && patterns[0] == "all0" && patterns[1] == "some" && patterns[2] == "all";
  o.detail = std::string("quantized=") + (quantized ? "yes" : "no") + ", pattern " + patterns[0] + " -> " +
             patterns[1] + " -> " + patterns[2];
  return o;
}

Outcome metal_insulator() {
  Lattice chain = Lattice::open(128);
  auto sigma = [&](double l1, double l2) {
    auto traj = evolve(default_initial_state(chain), build_floquet(params(l1, l2, 0.0, FluxSpec::golden()), chain), 50);
    return observe(traj, chain).sigma;
  };
  auto fast = sigma(0.67, 0.2), slow = sigma(0.2, 0.67);
  std::vector<double> t, s;
  for (int k = 5; k <= 50; ++k) {
    t.push_back(k);
    s.push_back(fast[k]);
  }
  LinearFit fit = linear_fit(t, s);
  double slow_max = *std::max_element(slow.begin(), slow.end());
  Outcome o;
  o.passed = fit.r2 > 0.99 && fit.slope > 0.3 && slow_max < 2 * slow[6];
  o.detail = "(0.67,0.2) slope=" + fmt("%.3f", fit.slope) + " R2=" + fmt("%.5f", fit.r2) +
             "; (0.2,0.67) max sigma / sigma(6)=" + fmt("%.3f", slow_max / slow[6]);
  return o;
}

Outcome phase_separation() {
  const int n = 32, steps = 6;
  Lattice chain = Lattice::open(2 * steps + 5);
  std::vector<double> sigma(n * n);
  for (int k = 0; k < n * n; ++k) {
    double a = (k / n + 0.5) / n, b = (k % n + 0.5) / n;
    auto traj = evolve(default_initial_state(chain), build_floquet(params(a, b, 0.0, FluxSpec::golden()), chain), steps);
    sigma[k] = standard_deviation(position_distribution(traj.back(), chain));
  }
  int pairs = 0, ok = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = (i + 0.5) / n, b = (j + 0.5) / n;
      if (a - b <= 0.1) continue;
      ++pairs;
      if (sigma[i * n + j] > sigma[j * n + i]) ++ok;
    }
  Outcome o;
  o.passed = ok >= 0.95 * pairs;
  o.detail = std::to_string(ok) + "/" + std::to_string(pairs) + " pairs with sigma(a,b) > sigma(b,a)";
  return o;
}

Outcome pt_broken_dynamics() {
  const int steps = 6;
  Lattice chain = Lattice::open(2 * steps + 5);
  auto traj = evolve(default_initial_state(chain), build_floquet(params(0.5, 0.25, 0.05, FluxSpec::golden()), chain), steps);
  auto obs = observe(traj, chain);
  bool monotone = true, drift = true;
  for (int t = 1; t <= steps; ++t) monotone = monotone && obs.overall_p[t] > obs.overall_p[t - 1];
  for (int t = 2; t <= steps; ++t) drift = drift && obs.mean[t] > obs.mean[t - 1];
  double growth = obs.overall_p[steps] / obs.overall_p[0];
  double bounded = spread(overall_probabilities(default_initial_state(chain), params(0.25, 0.5, 0.05, FluxSpec::golden()), chain, steps));
  Outcome o;
  o.passed = monotone && drift && growth > 5 && bounded < 1.5;
  o.detail = std::string("(0.5,0.25) monotone=") + (monotone ? "yes" : "no") + " <x> increasing=" +
             (drift ? "yes" : "no") + " P(6)/P(0)=" + fmt("%.3f", growth) + " (need > 5); (0.25,0.5) max/min P=" +
             fmt("%.3f", bounded);
  return o;
}

Outcome no_loss_dynamics() {
  const int steps = 6;
  std::string detail;
  bool first = false;
  // the no-loss preparation is attempted on the default ring, then the next Fibonacci ring
  for (int n : {89, 144}) {
    Lattice ring = Lattice::ring(n);
    ModelParams p = params(0.25, 0.5, 0.135, FluxSpec::fibonacci(n));
    EigenOptions eo;
    eo.vectors = true;
    SpectrumResult s = eigendecompose(build_floquet(p, ring), eo);
    double base = spread(overall_probabilities(default_initial_state(ring), p, ring, steps));
    try {
      double prepared = spread(overall_probabilities(prepare_no_loss_initial(s, ring), p, ring, steps));
      first = prepared < 3 && base > 10;
      detail += "eta=0.135 N=" + std::to_string(n) + ": prepared " + fmt("%.3f", prepared) + ", default " +
                fmt("%.3f", base) + "; ";
      break;
    } catch (const Error&) {
      detail += "eta=0.135 N=" + std::to_string(n) + ": no no-loss state (default " + fmt("%.3f", base) + "); ";
    }
  }
  const int n = 89;
  Lattice ring = Lattice::ring(n);
  ModelParams p = params(0.25, 0.5, 0.335, FluxSpec::fibonacci(n));
  EigenOptions eo;
  eo.vectors = true;
  std::vector<SpinorState> inits{prepare_min_loss_initial(eigendecompose(build_floquet(p, ring), eo), ring)};
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  for (int k = 0; k < 5; ++k) {
    SpinorState r(ring.dim());
    for (int i = 0; i < ring.dim(); ++i) {
      double re = g(rng);
      double im = g(rng);
      r(i) = cplx(re, im);
    }
    inits.push_back(r / r.norm());
  }
  double weakest = INFINITY;
  for (const auto& s : inits) weakest = std::min(weakest, spread(overall_probabilities(s, p, ring, steps)));
  Outcome o;
  o.passed = first && weakest > 10;
  o.detail = detail + "eta=0.335 smallest growth over 6 states=" + fmt("%.1f", weakest);
  return o;
}

Outcome identity_suite() {
  auto checks = cli::run_validation(false);
  Outcome o;
  o.passed = true;
  for (const auto& c : checks) {
    o.passed = o.passed && c.passed;
    o.detail += c.name + "=" + fmt("%.1e", c.residual) + (c.passed ? "" : "(FAIL)") + " ";
  }
  return o;
}

Outcome localization_boundary_contrast() {
  const double eta = 0.1, offset = 0.05;
  const int steps = 6;
  double lo = 0.1, hi = 1.0;
  for (int k = 0; k < 100; ++k) {
    double mid = 0.5 * (lo + hi);
    (localization_boundary(mid, eta) + offset <= 1.0 ? lo : hi) = mid;
  }
  Lattice chain = Lattice::open(2 * steps + 5);
  auto x2 = [&](double l1, double l2) {
    auto traj = evolve(default_initial_state(chain), build_floquet(params(l1, l2, eta, FluxSpec::golden()), chain), steps);
    return second_moment(position_distribution(traj.back(), chain));
  };
  double below = 0.0, above = 0.0;
  for (int k = 0; k < 10; ++k) {
    double l1 = 0.1 + (lo - 0.1) * k / 9.0;
    double b = localization_boundary(l1, eta);
    below += x2(l1, b - offset) / 10.0;
    above += x2(l1, b + offset) / 10.0;
  }
  Outcome o;
  o.passed = below / above > 5;
  o.detail = "lambda1 in [0.1," + fmt("%.3f", lo) + "], mean <x2> below=" + fmt("%.3f", below) +
             " above=" + fmt("%.3f", above) + " ratio=" + fmt("%.2f", below / above) + " (need > 5)";
  return o;
}

Outcome poisson_similarity() {
  const int steps = 6;
  Lattice chain = Lattice::open(2 * steps + 5);
  auto traj = evolve(default_initial_state(chain), build_floquet(params(0.67, 0.2, 0.0, FluxSpec::golden()), chain), steps);
  auto obs = observe(traj, chain);
  std::mt19937_64 rng(99);
  double worst = INFINITY;
  for (int t = 0; t <= steps; ++t) {
    double sum = 0, sq = 0;
    for (int k = 0; k < 100; ++k) {
      double s = similarity(obs.distributions[t].p, poisson_resample(obs.distributions[t].p, 20000, rng));
      sum += s;
      sq += s * s;
    }
    double mean = sum / 100, sd = std::sqrt(std::max(0.0, sq / 100 - mean * mean));
    worst = std::min(worst, mean - 3 * sd);
  }
  Outcome o;
  o.passed = worst > 0.9;
  o.detail = "min over t of mean - 3 sd similarity = " + fmt("%.5f", worst);
  return o;
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 critical values", critical_values},
      {"2 three-regime spectrum", three_regimes},
      {"3 winding quantization", winding_quantization},
      {"4 metal-insulator dynamics", metal_insulator},
      {"5 phase-diagram separation", phase_separation},
      {"6 PT-broken dynamics", pt_broken_dynamics},
      {"7 no-loss-state dynamics", no_loss_dynamics},
      {"8 identity suite", identity_suite},
      {"9 localization boundary contrast", localization_boundary_contrast},
      {"note Poisson resampling similarity", poisson_similarity},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.passed) ++failed;
    std::printf("%s [%s] %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
