#include "uamo/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "uamo/parallel.hpp"

namespace uamo {

std::string to_string(PtPhase p) {
  switch (p) {
    case PtPhase::Unbroken: return "PTUnbroken";
    case PtPhase::Broken: return "PTBroken";
    case PtPhase::FullyComplex: return "FullyComplex";
  }
  return "unknown";
}

cplx quasienergy(cplx z) { return {std::arg(z), -std::log(std::abs(z))}; }

Eigen::VectorXd balance(CMatrix& a) {
  const int n = int(a.rows());
  const double radix = 2.0, sqrdx = radix * radix;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix, f = 1.0, s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        d(i) *= f;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
  return d;
}

void dense_eigen(const CMatrix& a, bool vectors, std::vector<cplx>& values, CMatrix& vecs) {
  CMatrix b = a;
  Eigen::VectorXd d = balance(b);
  Eigen::ComplexEigenSolver<CMatrix> ces(b, vectors);
  if (ces.info() != Eigen::Success) {
    double n1 = a.cwiseAbs().colwise().sum().maxCoeff();
    throw Error(ErrorKind::Numerical, "dense eigensolve did not converge",
                "dim=" + std::to_string(a.rows()) + " norm1=" + std::to_string(n1) +
                    " balance_range=" + std::to_string(d.maxCoeff() / d.minCoeff()));
  }
  const int n = int(a.rows());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& ev = ces.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    double ai = std::arg(ev(i)), aj = std::arg(ev(j));
    if (ai != aj) return ai < aj;
    return std::abs(ev(i)) < std::abs(ev(j));
  });
  values.resize(n);
  for (int k = 0; k < n; ++k) values[k] = ev(order[k]);
  if (vectors) {
    vecs.resize(n, n);
    for (int k = 0; k < n; ++k) {
      CVector v = d.asDiagonal() * ces.eigenvectors().col(order[k]);
      vecs.col(k) = v / v.norm();
    }
  } else {
    vecs.resize(0, 0);
  }
}

Classification classify_pt_phase(const std::vector<cplx>& eigenvalues, double norm1,
                                 const Tolerances& tol) {
  require(!eigenvalues.empty(), "empty spectrum");
  Classification c;
  c.tol_unit = tol.unit_scale * std::max(1.0, norm1);
  c.tol_gap = tol.gap;
  c.min_abs_log_modulus = INFINITY;
  for (cplx z : eigenvalues) {
    double m = std::abs(z), l = std::abs(std::log(m));
    c.max_unit_deviation = std::max(c.max_unit_deviation, std::abs(m - 1.0));
    c.min_abs_log_modulus = std::min(c.min_abs_log_modulus, l);
    c.max_abs_im_e = std::max(c.max_abs_im_e, l);
    if (l <= c.tol_gap) ++c.near_unit_count;
  }
  if (c.max_unit_deviation < c.tol_unit)
    c.phase = PtPhase::Unbroken;
  else if (c.min_abs_log_modulus > c.tol_gap)
    c.phase = PtPhase::FullyComplex;
  else
    c.phase = PtPhase::Broken;
  auto straddles = [](double v, double t) { return v >= 0.1 * t && v <= 10.0 * t; };
  c.boundary_zone = straddles(c.max_unit_deviation, c.tol_unit) ||
                    straddles(c.min_abs_log_modulus, c.tol_gap);
  return c;
}

SpectrumResult eigendecompose(const FloquetOperator& op, const EigenOptions& options) {
  require(op.lattice().boundary == Boundary::Periodic, "eigendecompose needs a periodic approximant ring");
  require(op.dim() <= options.dense_cap, "operator exceeds the dense eigensolve cap",
          "dim=" + std::to_string(op.dim()) + " cap=" + std::to_string(options.dense_cap));
  CMatrix w = op.dense();
  SpectrumResult r;
  r.norm1 = w.cwiseAbs().colwise().sum().maxCoeff();
  dense_eigen(w, options.vectors, r.eigenvalues, r.eigenvectors);
  r.quasienergies.reserve(r.eigenvalues.size());
  for (cplx z : r.eigenvalues) r.quasienergies.push_back(quasienergy(z));
  r.classification = classify_pt_phase(r.eigenvalues, r.norm1, options.tol);
  return r;
}

double participation_ratio(const SpinorState& state) {
  auto w = site_weights(state);
  double s = 0.0, s2 = 0.0;
  for (double p : w) {
    s += p;
    s2 += p * p;
  }
  require(s2 > 0.0, "participation ratio of a zero state");
  return s * s / s2;
}

int localization_center(const SpinorState& state, const Lattice& lattice) {
  auto w = site_weights(state);
  int best = int(std::max_element(w.begin(), w.end()) - w.begin());
  return lattice.site(best);
}

std::vector<NoLossState> find_no_loss_states(const SpectrumResult& spectrum, const Lattice& lattice,
                                             double tol) {
  require(spectrum.has_vectors(), "no-loss search needs eigenvectors");
  std::vector<NoLossState> out;
  for (int k = 0; k < spectrum.size(); ++k) {
    cplx e = spectrum.quasienergies[k];
    if (std::abs(e.imag()) >= tol) continue;
    NoLossState s;
    s.state = spectrum.eigenvectors.col(k);
    s.quasienergy = e;
    s.center = localization_center(s.state, lattice);
    s.participation_ratio = participation_ratio(s.state);
    s.index = k;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct SideFit {
  double rate = 0.0, orders = 0.0;
  int points = 0;
};

// log p = a - rate * d over the samples above the noise floor
SideFit fit_side(const std::vector<double>& p, double peak) {
  const double floor = peak * 1e-26;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, pmin = peak;
  int n = 0;
  for (size_t d = 1; d < p.size(); ++d) {
    if (p[d] < floor || p[d] <= 0.0) continue;
    double y = std::log(p[d]);
    sx += double(d);
    sy += y;
    sxx += double(d) * double(d);
    sxy += double(d) * y;
    pmin = std::min(pmin, p[d]);
    ++n;
  }
  SideFit f;
  f.points = n;
  if (n >= 2) {
    double den = n * sxx - sx * sx;
    f.rate = -(n * sxy - sx * sy) / den;
    f.orders = std::log10(peak / pmin);
  }
  return f;
}

}  // namespace

DecayFit eigenstate_decay_fit(const SpinorState& state, const Lattice& lattice, int center,
                              double min_orders) {
  auto w = site_weights(state);
  const int n = lattice.size;
  int ci = center + lattice.origin;
  require(ci >= 0 && ci < n, "decay-fit center outside lattice");
  std::vector<double> right{w[ci]}, left{w[ci]};
  if (lattice.boundary == Boundary::Periodic) {
    for (int d = 1; d <= (n - 1) / 2; ++d) {
      right.push_back(w[(ci + d) % n]);
      left.push_back(w[((ci - d) % n + n) % n]);
    }
  } else {
    for (int i = ci + 1; i < n; ++i) right.push_back(w[i]);
    for (int i = ci - 1; i >= 0; --i) left.push_back(w[i]);
  }
  double peak = *std::max_element(w.begin(), w.end());
  SideFit l = fit_side(left, peak), r = fit_side(right, peak);
  DecayFit f;
  f.left_rate = l.rate;
  f.right_rate = r.rate;
  f.left_orders = l.orders;
  f.right_orders = r.orders;
  f.left_points = l.points;
  f.right_points = r.points;
  f.sufficient_range = l.orders >= min_orders && r.orders >= min_orders;
  return f;
}

std::vector<cplx> winding_reference_spectrum(const ModelParams& params, const Lattice& lattice) {
  ModelParams p0 = params;
  p0.eta = 0.0;
  std::vector<cplx> values;
  CMatrix unused;
  dense_eigen(build_floquet(p0, lattice).dense(), false, values, unused);
  return values;
}

namespace {

double det_phase(const ModelParams& params, const Lattice& lattice, double theta, cplx z) {
  ModelParams p = params;
  p.theta = theta - std::floor(theta);
  if (p.theta >= 1.0) p.theta = 0.0;
  CMatrix a = build_complexified_dual(p, lattice).dense();
  a.diagonal().array() -= z;
  Eigen::PartialPivLU<CMatrix> lu(a);
  const CMatrix& m = lu.matrixLU();
  double phase = lu.permutationP().determinant() < 0 ? pi : 0.0;
  for (int i = 0; i < m.rows(); ++i) phase += std::arg(m(i, i));
  return phase;
}

double wrap(double d) { return d - two_pi * std::round(d / two_pi); }

}  // namespace

WindingResult winding_number(const ModelParams& params, const Lattice& lattice, cplx z,
                             const WindingOptions& options, const std::vector<cplx>* reference) {
  lattice.validate_for(params);
  require(lattice.boundary == Boundary::Periodic, "winding number needs a periodic approximant ring");
  require(std::abs(std::abs(z) - 1.0) < 1e-12, "winding base point must lie on the unit circle");
  require(options.m_initial >= 1 && options.m_cap >= options.m_initial, "invalid winding grid sizes");
  std::vector<cplx> own;
  if (!reference) {
    own = winding_reference_spectrum(params, lattice);
    reference = &own;
  }
  double gap = INFINITY;
  for (cplx e : *reference) gap = std::min(gap, std::abs(e - z));
  if (gap <= options.gap_threshold)
    throw Error(ErrorKind::InvalidArgument, "winding base point lies inside the spectrum",
                "distance=" + std::to_string(gap));

  // det(W(θ)-z) has period 1/q in θ on the ring; wind over one period, scale by q
  const long q = params.flux.q;
  int m = options.m_initial;
  int per = int((m + q - 1) / q);
  const double period = 1.0 / double(q);
  std::vector<double> phases(per + 1);
  for (int k = 0; k <= per; ++k)
    phases[k] = det_phase(params, lattice, params.theta + period * k / per, z);

  WindingResult r;
  r.z = z;
  while (true) {
    double total = 0.0, jump = 0.0;
    for (int k = 0; k < per; ++k) {
      double d = wrap(phases[k + 1] - phases[k]);
      total += d;
      jump = std::max(jump, std::abs(d));
    }
    r.m = m;
    r.max_jump = jump;
    if (jump < options.max_jump) {
      r.nu = double(q) * total / two_pi / double(lattice.size);
      r.nu_hat = int(std::lround(r.nu));
      r.valid = std::abs(r.nu - r.nu_hat) < 1e-6 && std::abs(r.nu_hat) <= 1;
      if (!r.valid) r.note = "winding not quantized to {-1,0,1}";
      return r;
    }
    if (2 * m > options.m_cap)
      throw Error(ErrorKind::Numerical, "phase tracking failed at the theta-grid cap",
                  "M=" + std::to_string(m) + " max_jump=" + std::to_string(jump));
    m *= 2;
    std::vector<double> refined(2 * per + 1);
    for (int k = 0; k <= per; ++k) refined[2 * k] = phases[k];
    for (int k = 0; k < per; ++k)
      refined[2 * k + 1] = det_phase(params, lattice, params.theta + period * (2 * k + 1) / (2 * per), z);
    per *= 2;
    phases.swap(refined);
  }
}

std::vector<WindingResult> winding_profile(const ModelParams& params, const Lattice& lattice,
                                           int z_count, const WindingOptions& options, int threads) {
  require(z_count >= 1, "winding profile needs at least one base point");
  auto reference = winding_reference_spectrum(params, lattice);
  std::vector<WindingResult> out(z_count);
  parallel_for(z_count, threads, [&](int j) {
    cplx z = std::polar(1.0, two_pi * j / z_count);
    double gap = INFINITY;
    for (cplx e : reference) gap = std::min(gap, std::abs(e - z));
    if (gap <= options.gap_threshold) {
      out[j].z = z;
      out[j].valid = false;
      out[j].note = "base point in spectrum";
      return;
    }
    out[j] = winding_number(params, lattice, z, options, &reference);
  });
  return out;
}

TransitionEstimate transitions_from_profiles(const std::vector<double>& etas,
                                             const std::vector<std::vector<WindingResult>>& profiles) {
  require(etas.size() == profiles.size(), "eta list and profiles differ in length");
  TransitionEstimate t;
  for (size_t k = 0; k < etas.size(); ++k) {
    int valid = 0, wound = 0;
    for (const auto& w : profiles[k]) {
      if (!w.valid) continue;
      ++valid;
      if (std::abs(w.nu_hat) == 1) ++wound;
    }
    if (!t.first_found && wound > 0) {
      t.first = etas[k];
      t.first_found = true;
    }
    if (!t.second_found && valid > 0 && wound == valid) {
      t.second = etas[k];
      t.second_found = true;
    }
  }
  return t;
}

namespace {

PtPhase classify_at(const ModelParams& base, const Lattice& lattice, double eta, const Tolerances& tol) {
  ModelParams p = base;
  p.eta = eta;
  EigenOptions o;
  o.tol = tol;
  return eigendecompose(build_floquet(p, lattice), o).classification.phase;
}

template <class Pred>
double bisect(const ModelParams& base, const Lattice& lattice, double lo, double hi, double resolution,
              const Tolerances& tol, Pred pred) {
  while (hi - lo > resolution) {
    double mid = 0.5 * (lo + hi);
    if (pred(classify_at(base, lattice, mid, tol)))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TransitionScan locate_transitions(double lambda1, double lambda2, double theta,
                                  const std::vector<int>& sizes, const ScanOptions& options) {
  require(!sizes.empty(), "transition scan needs at least one ring size");
  require(options.coarse_step > 0 && options.resolution > 0 && options.eta_max > options.eta_min,
          "invalid transition scan range");
  TransitionScan scan;
  for (int n : sizes) {
    ModelParams base;
    base.lambda1 = lambda1;
    base.lambda2 = lambda2;
    base.theta = theta;
    base.flux = FluxSpec::fibonacci(n);
    Lattice lattice = Lattice::ring(n);
    int count = int(std::floor((options.eta_max - options.eta_min) / options.coarse_step + 1e-9)) + 1;
    std::vector<double> grid(count);
    std::vector<PtPhase> phases(count);
    for (int k = 0; k < count; ++k) grid[k] = options.eta_min + k * options.coarse_step;
    parallel_for(count, options.threads,
                 [&](int k) { phases[k] = classify_at(base, lattice, grid[k], options.tol); });

    SizeScan s;
    s.size = n;
    auto locate = [&](auto pred, double& where, bool& found) {
      for (int k = 0; k < count; ++k) {
        if (!pred(phases[k])) continue;
        found = true;
        where = k == 0 ? grid[0]
                       : bisect(base, lattice, grid[k - 1], grid[k], options.resolution, options.tol, pred);
        return;
      }
    };
    locate([](PtPhase p) { return p != PtPhase::Unbroken; }, s.estimate.first, s.estimate.first_found);
    locate([](PtPhase p) { return p == PtPhase::FullyComplex; }, s.estimate.second, s.estimate.second_found);
    scan.per_size.push_back(s);
  }
  scan.estimate = scan.per_size.back().estimate;
  return scan;
}

}  // namespace uamo
