#include "uamo/optics.hpp"

#include <cmath>

namespace uamo {

Mat2 hwp(double phi, bool faulty) {
  double c = std::cos(2 * phi), s = std::sin(2 * phi);
  Mat2 h;
  h << c, s, s, faulty ? c : -c;
  return h;
}

Mat2 qwp(double phi) {
  double c = std::cos(phi), s = std::sin(phi);
  const cplx i(0, 1);
  cplx off = (1.0 - i) * s * c;
  Mat2 q;
  q << c * c + i * s * s, off, off, s * s + i * c * c;
  return q;
}

WavePlateAngles wave_plate_angles(int x, const ModelParams& params) {
  double a = coin_phase(x, params.flux, params.theta).real();
  WavePlateAngles w;
  w.phi1 = pi / 4 - a * pi;
  w.phi2 = pi / 4 - std::acos(params.lambda2) / 2;
  w.phi3 = pi / 4 + a * pi;
  w.theta1 = 0.0;
  w.theta2 = std::acos(params.lambda1) / 2;
  return w;
}

CoinDecomposition coin_decomposition(int x, const ModelParams& params, bool faulty) {
  params.validate();
  CoinDecomposition d;
  d.angles = wave_plate_angles(x, params);
  d.product = qwp(d.angles.phi3) * hwp(d.angles.phi2, faulty) * qwp(d.angles.phi1);
  d.residual = (d.product - coin_at(x, params)).cwiseAbs().maxCoeff();
  return d;
}

namespace {

struct OpticalShift {
  int n;
  bool ring;
  double loss;  // e^{-2πη} on V
  Mat2 h1, h2;

  void plates(CVector& v, const Mat2& h) const {
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2cd b = h * v.segment<2>(2 * i);
      v.segment<2>(2 * i) = b;
    }
  }
  void displace(CVector& v, int spin, int step) const {
    CVector out = v;
    for (int i = 0; i < n; ++i) out(2 * i + spin) = 0.0;
    for (int i = 0; i < n; ++i) {
      int j = i + step;
      if (ring) j = (j + n) % n;
      if (j >= 0 && j < n) out(2 * j + spin) = v(2 * i + spin);
    }
    v.swap(out);
  }
  void attenuate(CVector& v) const {
    for (int i = 0; i < n; ++i) v(2 * i + 1) *= loss;
  }
  // S'_2 h(θ2) S'_1 h(θ1): the lossless middle
  void middle(CVector& v) const {
    plates(v, h1);
    displace(v, 0, +1);
    plates(v, h2);
    displace(v, 1, -1);
  }
};

}  // namespace

ShiftDecomposition shift_decomposition(const ModelParams& params, const Lattice& lattice, bool faulty) {
  lattice.validate_for(params);
  require(lattice.size >= 2, "shift decomposition needs at least two sites");
  const bool ring = lattice.boundary == Boundary::Periodic;
  const int pad = ring ? 0 : 1;
  const int wide = lattice.size + 2 * pad;
  WavePlateAngles a = wave_plate_angles(0, params);
  OpticalShift s{wide, ring, std::exp(-two_pi * params.eta), hwp(a.theta1, faulty), hwp(a.theta2, faulty)};
  const double prefactor = std::exp(two_pi * params.eta);

  const int d = lattice.dim();
  ShiftDecomposition out;
  out.op.resize(d, d);
  for (int k = 0; k < d; ++k) {
    CVector v = CVector::Zero(2 * wide);
    v(k + 2 * pad) = 1.0;
    s.attenuate(v);
    s.middle(v);
    s.attenuate(v);
    out.op.col(k) = prefactor * v.segment(2 * pad, d);
  }
  out.residual = (out.op - build_shift(params, lattice)).cwiseAbs().maxCoeff();
  return out;
}

LossyWalk simulate_lossy_walk(const SpinorState& initial, const ModelParams& params,
                              const Lattice& lattice, int t_max) {
  lattice.validate_for(params);
  require(params.eta >= 0.0, "lossy realization needs eta >= 0 (loss, not gain)",
          "eta=" + std::to_string(params.eta));
  require(t_max >= 0, "t_max must be non-negative");
  require(initial.size() == lattice.dim(), "state dimension does not match lattice");
  if (lattice.boundary == Boundary::Open)
    require(lattice.size >= 2 * t_max + 5, "open lattice too small for the number of steps",
            "N=" + std::to_string(lattice.size) + " t_max=" + std::to_string(t_max));

  const int n = lattice.size;
  WavePlateAngles a = wave_plate_angles(0, params);
  OpticalShift s{n, lattice.boundary == Boundary::Periodic, std::exp(-two_pi * params.eta),
                 hwp(a.theta1), hwp(a.theta2)};
  std::vector<Mat2> coins(n);
  for (int i = 0; i < n; ++i) coins[i] = coin_at(lattice.site(i), params);
  const double pass_loss = 1.0 - s.loss * s.loss;

  LossyWalk walk;
  walk.states.push_back(initial);
  walk.records.push_back({0, initial.squaredNorm(), 0.0, 0.0});
  CVector v = initial;
  double cumulative = 0.0;
  for (int t = 1; t <= t_max; ++t) {
    std::vector<double> lost(n, 0.0);
    auto book = [&](const CVector& u) {
      for (int i = 0; i < n; ++i) lost[i] += pass_loss * std::norm(u(2 * i + 1));
    };
    for (int i = 0; i < n; ++i) {
      Eigen::Vector2cd b = coins[i] * v.segment<2>(2 * i);
      v.segment<2>(2 * i) = b;
    }
    book(v);
    s.attenuate(v);
    s.middle(v);
    book(v);
    s.attenuate(v);
    double step_loss = 0.0;
    for (double l : lost) step_loss += l;
    cumulative += step_loss;
    walk.states.push_back(v);
    walk.records.push_back({t, v.squaredNorm(), step_loss, cumulative});
    walk.site_loss.push_back(std::move(lost));
  }
  return walk;
}

std::vector<double> reconstruct_overall_probability(const std::vector<LossyStepRecord>& records,
                                                    double eta) {
  std::vector<double> p;
  p.reserve(records.size());
  for (const auto& r : records) {
    double total = r.surviving_norm_sq + r.cumulative_lost;
    require(total > 0.0, "empty intensity record");
    p.push_back(std::exp(2 * two_pi * eta * r.t) * r.surviving_norm_sq / total);
  }
  return p;
}

}  // namespace uamo
