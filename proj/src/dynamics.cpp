#include "uamo/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace uamo {

std::vector<SpinorState> evolve(const SpinorState& initial, const FloquetOperator& op, int t_max) {
  require(t_max >= 0, "t_max must be non-negative");
  require(initial.size() == op.dim(), "state dimension does not match the operator");
  const Lattice& lat = op.lattice();
  if (lat.boundary == Boundary::Open)
    require(lat.size >= 2 * t_max + 5, "open lattice too small for the number of steps",
            "N=" + std::to_string(lat.size) + " t_max=" + std::to_string(t_max));
  std::vector<SpinorState> traj;
  traj.reserve(t_max + 1);
  traj.push_back(initial);
  CVector next(initial.size());
  for (int t = 1; t <= t_max; ++t) {
    op.apply(traj.back(), next);
    if (!next.allFinite()) throw Error(ErrorKind::Numerical, "evolution overflowed", "t=" + std::to_string(t));
    traj.push_back(next);
  }
  return traj;
}

Distribution position_distribution(const SpinorState& state, const Lattice& lattice) {
  require(state.size() == lattice.dim(), "state dimension does not match lattice");
  auto w = site_weights(state);
  double total = 0.0;
  for (double v : w) total += v;
  require(total > 0.0, "position distribution of a zero state");
  Distribution d;
  d.x.resize(w.size());
  d.p.resize(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    d.x[i] = lattice.site(int(i));
    d.p[i] = w[i] / total;
  }
  return d;
}

double mean_position(const Distribution& d) {
  double m = 0.0;
  for (size_t i = 0; i < d.p.size(); ++i) m += d.p[i] * d.x[i];
  return m;
}

double second_moment(const Distribution& d) {
  double m = 0.0;
  for (size_t i = 0; i < d.p.size(); ++i) m += d.p[i] * double(d.x[i]) * d.x[i];
  return m;
}

double standard_deviation(const Distribution& d) {
  double m = mean_position(d);
  double c = 0.0;
  for (size_t i = 0; i < d.p.size(); ++i) c += d.p[i] * (d.x[i] - m) * (d.x[i] - m);
  return std::sqrt(std::max(0.0, c));
}

double overall_probability(const SpinorState& state) {
  double p = state.squaredNorm();
  require(p > 0.0, "overall probability of a zero state");
  return p;
}

double similarity(const std::vector<double>& pa, const std::vector<double>& pb) {
  require(pa.size() == pb.size(), "similarity needs distributions on the same lattice");
  double sa = 0.0, sb = 0.0, s = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) {
    require(pa[i] >= 0.0 && pb[i] >= 0.0, "negative probability");
    sa += pa[i];
    sb += pb[i];
    s += std::sqrt(pa[i] * pb[i]);
  }
  require(std::abs(sa - 1.0) < 1e-9 && std::abs(sb - 1.0) < 1e-9, "similarity inputs must be normalized");
  return std::min(1.0, s * s);
}

std::vector<double> poisson_resample(const std::vector<double>& p, double total_counts, std::mt19937_64& rng) {
  require(total_counts > 0.0, "count budget must be positive");
  std::vector<double> out(p.size(), 0.0);
  double sum = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double mu = total_counts * p[i];
    if (mu <= 0.0) continue;
    std::poisson_distribution<long> dist(mu);
    out[i] = double(dist(rng));
    sum += out[i];
  }
  require(sum > 0.0, "resampled distribution recorded no counts");
  for (double& v : out) v /= sum;
  return out;
}

ObservableSeries observe(const std::vector<SpinorState>& trajectory, const Lattice& lattice,
                         const std::vector<Distribution>* reference) {
  if (reference) require(reference->size() == trajectory.size(), "reference trajectory length mismatch");
  ObservableSeries s;
  for (size_t t = 0; t < trajectory.size(); ++t) {
    Distribution d = position_distribution(trajectory[t], lattice);
    s.sigma.push_back(standard_deviation(d));
    s.second_moment.push_back(second_moment(d));
    s.mean.push_back(mean_position(d));
    s.overall_p.push_back(overall_probability(trajectory[t]));
    if (reference) s.similarity.push_back(similarity(d.p, (*reference)[t].p));
    s.distributions.push_back(std::move(d));
  }
  return s;
}

namespace {

SpinorState project_on_peak(const NoLossState& s, const Lattice& lattice) {
  int i = s.center + lattice.origin;
  SpinorState init = SpinorState::Zero(lattice.dim());
  init.segment<2>(2 * i) = s.state.segment<2>(2 * i);
  return init / init.norm();
}

}  // namespace

SpinorState prepare_no_loss_initial(const SpectrumResult& spectrum, const Lattice& lattice, double tol,
                                    NoLossState* chosen) {
  auto states = find_no_loss_states(spectrum, lattice, tol);
  if (states.empty())
    throw Error(ErrorKind::Numerical, "no no-loss state found: every |Im E| exceeds the tolerance",
                "tol=" + std::to_string(tol));
  auto concentration = [](const NoLossState& s) {
    auto w = site_weights(s.state);
    double total = 0.0;
    for (double v : w) total += v;
    return *std::max_element(w.begin(), w.end()) / total;
  };
  size_t best = 0;
  double best_c = -1.0;
  for (size_t k = 0; k < states.size(); ++k) {
    double c = concentration(states[k]);
    if (c > best_c) {
      best_c = c;
      best = k;
    }
  }
  if (chosen) *chosen = states[best];
  return project_on_peak(states[best], lattice);
}

SpinorState prepare_min_loss_initial(const SpectrumResult& spectrum, const Lattice& lattice, NoLossState* chosen) {
  require(spectrum.size() > 0, "empty spectrum");
  double best = INFINITY;
  for (cplx e : spectrum.quasienergies) best = std::min(best, std::abs(e.imag()));
  // every state within rounding of the smallest |Im E|, then the usual selection
  NoLossState s;
  prepare_no_loss_initial(spectrum, lattice, best * (1.0 + 1e-9) + 1e-300, &s);
  if (chosen) *chosen = s;
  return project_on_peak(s, lattice);
}

ProjectionReport short_time_projection_check(const SpinorState& initial, const SpectrumResult& spectrum,
                                             int index, int t_max, double cond_limit) {
  require(spectrum.has_vectors(), "projection check needs eigenvectors");
  require(index >= 0 && index < spectrum.size(), "eigenstate index out of range");
  const CMatrix& v = spectrum.eigenvectors;
  Eigen::JacobiSVD<CMatrix> svd(v);
  const auto& sv = svd.singularValues();
  ProjectionReport r;
  r.condition_number = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  r.ill_conditioned = !(r.condition_number < cond_limit);
  CVector c = v.partialPivLu().solve(initial);
  for (int t = 0; t <= t_max; ++t) {
    double total = 0.0, mine = 0.0;
    for (int m = 0; m < spectrum.size(); ++m) {
      double w = std::norm(c(m)) * std::pow(std::abs(spectrum.eigenvalues[m]), 2.0 * t);
      total += w;
      if (m == index) mine = w;
    }
    r.weight.push_back(total > 0 ? mine / total : 0.0);
  }
  return r;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "linear fit needs at least two points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double my = sy / n, ss_tot = 0, ss_res = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

}  // namespace uamo
