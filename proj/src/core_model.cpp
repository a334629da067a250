#include "uamo/core_model.hpp"

#include <cmath>
#include <numeric>

namespace uamo {

FluxSpec FluxSpec::golden() { return FluxSpec{}; }

FluxSpec FluxSpec::irrational(double value) {
  FluxSpec f;
  f.value = value;
  f.validate();
  return f;
}

FluxSpec FluxSpec::approximant(long p, long q) {
  FluxSpec f;
  f.kind = Kind::Approximant;
  f.p = p;
  f.q = q;
  f.value = q > 0 ? double(p) / double(q) : 0.0;
  f.validate();
  return f;
}

FluxSpec FluxSpec::fibonacci(int n) {
  long a = 1, b = 1;
  while (b < n) {
    long c = a + b;
    a = b;
    b = c;
  }
  require(b == n, "lattice size is not a Fibonacci number", "n=" + std::to_string(n));
  return approximant(n == 1 ? 1 : a, b);
}

void FluxSpec::validate() const {
  if (kind == Kind::Approximant) {
    require(q > 0, "flux approximant needs q > 0");
    require(p >= 0 && p <= q, "flux approximant must satisfy 0 <= p/q <= 1");
    require(std::gcd(p, q) == 1, "flux approximant p/q must be reduced",
            std::to_string(p) + "/" + std::to_string(q));
  } else {
    require(std::isfinite(value) && value >= 0.0 && value <= 1.0, "flux must lie in [0,1]");
  }
}

double ModelParams::lambda1p() const { return std::sqrt(std::max(0.0, 1.0 - lambda1 * lambda1)); }
double ModelParams::lambda2p() const { return std::sqrt(std::max(0.0, 1.0 - lambda2 * lambda2)); }

void ModelParams::validate() const {
  require(lambda1 >= 0.0 && lambda1 <= 1.0, "lambda1 must lie in [0,1]",
          "lambda1=" + std::to_string(lambda1));
  require(lambda2 >= 0.0 && lambda2 <= 1.0, "lambda2 must lie in [0,1]",
          "lambda2=" + std::to_string(lambda2));
  require(theta >= 0.0 && theta < 1.0, "theta must lie in [0,1)", "theta=" + std::to_string(theta));
  require(std::isfinite(eta), "eta must be finite");
  flux.validate();
}

Lattice Lattice::open(int n) { return Lattice{n, Boundary::Open, n / 2}; }

Lattice Lattice::ring(int n) { return Lattice{n, Boundary::Periodic, 0}; }

bool Lattice::symmetric() const {
  if (boundary == Boundary::Periodic) return true;
  return site(0) == -site(size - 1);
}

void Lattice::validate() const {
  require(size >= 1, "lattice size must be positive");
  require(origin >= 0 && origin < size, "lattice origin outside the window");
}

void Lattice::validate_for(const ModelParams& params) const {
  validate();
  params.validate();
  if (boundary == Boundary::Periodic) {
    require(params.flux.kind == FluxSpec::Kind::Approximant,
            "periodic lattice requires a rational flux approximant");
    require(size % params.flux.q == 0, "approximant denominator must divide the ring size",
            "N=" + std::to_string(size) + " q=" + std::to_string(params.flux.q));
  }
}

SpinorState localized_state(const Lattice& lattice, int x, cplx h, cplx v) {
  int i = x + lattice.origin;
  require(i >= 0 && i < lattice.size, "site outside lattice", "x=" + std::to_string(x));
  SpinorState s = SpinorState::Zero(lattice.dim());
  s(2 * i) = h;
  s(2 * i + 1) = v;
  return s;
}

SpinorState default_initial_state(const Lattice& lattice) {
  double r = 1.0 / std::sqrt(2.0);
  return localized_state(lattice, 0, r, cplx(0.0, r));
}

std::vector<double> site_weights(const SpinorState& state) {
  std::vector<double> w(state.size() / 2);
  for (size_t i = 0; i < w.size(); ++i) w[i] = std::norm(state(2 * i)) + std::norm(state(2 * i + 1));
  return w;
}

Mat2 coin_matrix(double lambda2, cplx phase) {
  double l2p = std::sqrt(std::max(0.0, 1.0 - lambda2 * lambda2));
  cplx a = two_pi * phase;
  cplx c = std::cos(a), s = std::sin(a);
  Mat2 q;
  q << lambda2 * c + cplx(0, l2p), -lambda2 * s, lambda2 * s, lambda2 * c - cplx(0, l2p);
  return q;
}

// reduced exactly for rational flux so the ring coin repeats bitwise
cplx coin_phase(int x, const FluxSpec& flux, cplx offset) {
  if (flux.kind == FluxSpec::Kind::Approximant) {
    long r = ((long(x) * flux.p) % flux.q + flux.q) % flux.q;
    return double(r) / double(flux.q) + offset;
  }
  return double(x) * flux.value + offset;
}

namespace {

std::vector<Mat2> lattice_coins(const Lattice& lattice, double lambda, const FluxSpec& flux,
                                cplx offset) {
  std::vector<Mat2> coins(lattice.size);
  for (int i = 0; i < lattice.size; ++i)
    coins[i] = coin_matrix(lambda, coin_phase(lattice.site(i), flux, offset));
  return coins;
}

void apply_blocks(const std::vector<Mat2>& blocks, CVector& v) {
  for (size_t i = 0; i < blocks.size(); ++i) {
    Eigen::Vector2cd b = blocks[i] * v.segment<2>(2 * i);
    v.segment<2>(2 * i) = b;
  }
}

}  // namespace

Mat2 coin_at(int x, const ModelParams& params) {
  return coin_matrix(params.lambda2, coin_phase(x, params.flux, params.theta));
}

Mat2 coin_sqrt(const Mat2& q) {
  // principal root of a det-1 matrix: (Q + I)/sqrt(tr Q + 2)
  cplx t2 = q.trace() + 2.0;
  if (std::abs(t2) < 1e-12)
    throw Error(ErrorKind::Numerical, "coin square root is branch-ambiguous (Q = -I)");
  return (q + Mat2::Identity()) / std::sqrt(t2);
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::Standard: return "standard";
    case Variant::Symmetrized: return "symmetrized";
    case Variant::Dual: return "dual";
    case Variant::LossyRealized: return "lossy_realized";
  }
  return "unknown";
}

ShiftAmplitudes shift_amplitudes(double lambda1, double eta) {
  return {std::exp(two_pi * eta) * lambda1, std::exp(-two_pi * eta) * lambda1,
          std::sqrt(std::max(0.0, 1.0 - lambda1 * lambda1))};
}

void FloquetOperator::apply_shift(const CVector& in, CVector& out) const {
  const int n = lattice_.size;
  const bool ring = lattice_.boundary == Boundary::Periodic;
  out.setZero(in.size());
  for (int i = 0; i < n; ++i) {
    cplx a0 = in(2 * i), a1 = in(2 * i + 1);
    int up = i + 1, down = i - 1;
    if (ring) {
      up %= n;
      down = (down + n) % n;
    }
    if (!transposed_) {
      out(2 * i + 1) += shift_.flip * a0;
      out(2 * i) -= shift_.flip * a1;
      if (up < n) out(2 * up) += shift_.right * a0;
      if (down >= 0) out(2 * down + 1) += shift_.left * a1;
    } else {
      out(2 * i) += shift_.flip * a1;
      out(2 * i + 1) -= shift_.flip * a0;
      if (down >= 0) out(2 * down) += shift_.right * a0;
      if (up < n) out(2 * up + 1) += shift_.left * a1;
    }
  }
}

void FloquetOperator::apply(const CVector& in, CVector& out) const {
  require(in.size() == dim(), "state dimension does not match the operator");
  CVector tmp = in;
  if (!pre_.empty()) apply_blocks(pre_, tmp);
  apply_shift(tmp, out);
  if (!post_.empty()) apply_blocks(post_, out);
  if (scale_ != 1.0) out *= scale_;
}

CVector FloquetOperator::apply(const CVector& in) const {
  CVector out(in.size());
  apply(in, out);
  return out;
}

CMatrix FloquetOperator::dense() const {
  const int d = dim();
  CMatrix m(d, d);
  CVector e = CVector::Zero(d), col(d);
  for (int k = 0; k < d; ++k) {
    e(k) = 1.0;
    apply(e, col);
    m.col(k) = col;
    e(k) = 0.0;
  }
  return m;
}

FloquetOperator build_floquet(const ModelParams& params, const Lattice& lattice, Variant variant) {
  lattice.validate_for(params);
  FloquetOperator op(params, lattice, variant);
  switch (variant) {
    case Variant::Standard:
    case Variant::LossyRealized:
      op.pre_ = lattice_coins(lattice, params.lambda2, params.flux, params.theta);
      op.shift_ = shift_amplitudes(params.lambda1, params.eta);
      if (variant == Variant::LossyRealized) op.scale_ = std::exp(-two_pi * params.eta);
      break;
    case Variant::Symmetrized: {
      double l2 = std::min(params.lambda2, 1.0 - 1e-12);
      op.pre_ = lattice_coins(lattice, l2, params.flux, params.theta);
      for (auto& q : op.pre_) q = coin_sqrt(q);
      op.post_ = op.pre_;
      op.shift_ = shift_amplitudes(params.lambda1, params.eta);
      break;
    }
    case Variant::Dual:
      op.post_ = lattice_coins(lattice, params.lambda1, params.flux, params.theta);
      for (auto& q : op.post_) q.transposeInPlace();
      op.shift_ = shift_amplitudes(params.lambda2, params.eta);
      op.transposed_ = true;
      if (params.eta != 0.0)
        op.warnings_.push_back("non-canonical dual: swap-and-transpose applied at eta != 0");
      break;
  }
  return op;
}

FloquetOperator build_complexified_dual(const ModelParams& params, const Lattice& lattice) {
  lattice.validate_for(params);
  FloquetOperator op(params, lattice, Variant::Dual);
  op.post_ = lattice_coins(lattice, params.lambda1, params.flux, cplx(params.theta, -params.eta));
  for (auto& q : op.post_) q.transposeInPlace();
  op.shift_ = shift_amplitudes(params.lambda2, 0.0);
  op.transposed_ = true;
  op.warnings_.push_back("complexified coin phase theta - i*eta");
  return op;
}

FloquetOperator build_shift_operator(const ModelParams& params, const Lattice& lattice) {
  lattice.validate_for(params);
  FloquetOperator op(params, lattice, Variant::Standard);
  op.shift_ = shift_amplitudes(params.lambda1, params.eta);
  return op;
}

CMatrix build_shift(const ModelParams& params, const Lattice& lattice) {
  return build_shift_operator(params, lattice).dense();
}

CMatrix build_coin(const ModelParams& params, const Lattice& lattice) {
  lattice.validate_for(params);
  CMatrix q = CMatrix::Zero(lattice.dim(), lattice.dim());
  for (int i = 0; i < lattice.size; ++i) q.block<2, 2>(2 * i, 2 * i) = coin_at(lattice.site(i), params);
  return q;
}

namespace {

double skin_exponent(const Lattice& lattice, int i, double eta, bool inverse) {
  double e = two_pi * eta * lattice.site(i);
  require(std::abs(e) <= 700.0, "skin transform exponent overflows", "2*pi*eta*x=" + std::to_string(e));
  return inverse ? -e : e;
}

}  // namespace

SpinorState skin_transform(const SpinorState& state, const Lattice& lattice, double eta, bool inverse) {
  require(lattice.boundary == Boundary::Open, "skin transform needs an open chain");
  require(state.size() == lattice.dim(), "state dimension does not match lattice");
  SpinorState out = state;
  for (int i = 0; i < lattice.size; ++i) out.segment<2>(2 * i) *= std::exp(skin_exponent(lattice, i, eta, inverse));
  return out;
}

CMatrix skin_matrix(const Lattice& lattice, double eta, bool inverse) {
  require(lattice.boundary == Boundary::Open, "skin transform needs an open chain");
  CVector d(lattice.dim());
  for (int i = 0; i < lattice.size; ++i) d.segment<2>(2 * i).setConstant(std::exp(skin_exponent(lattice, i, eta, inverse)));
  return d.asDiagonal();
}

SymmetryReport verify_pt_symmetry(const ModelParams& params, const Lattice& lattice) {
  require(lattice.symmetric(), "PT check needs a lattice symmetric about the origin");
  CMatrix w = build_floquet(params, lattice, Variant::Symmetrized).dense();
  CMatrix winv = w.partialPivLu().inverse();
  const int n = lattice.size;
  // U = P ⊗ σ_z is a real involution, so (UK) W (UK)^{-1} = U conj(W) U
  CMatrix u = CMatrix::Zero(lattice.dim(), lattice.dim());
  for (int i = 0; i < n; ++i) {
    int j = ((2 * lattice.origin - i) % n + n) % n;
    u(2 * j, 2 * i) = 1.0;
    u(2 * j + 1, 2 * i + 1) = -1.0;
  }
  CMatrix lhs = u * w.conjugate() * u;
  return {(lhs - winv).cwiseAbs().maxCoeff(), "(PT) W~ (PT)^-1 = W~^-1"};
}

SymmetryReport verify_spin_swap_inverse(const ModelParams& params, const Lattice& lattice) {
  CMatrix w = build_floquet(params, lattice, Variant::Symmetrized).dense();
  CMatrix winv = w.partialPivLu().inverse();
  CMatrix x = CMatrix::Zero(lattice.dim(), lattice.dim());
  for (int i = 0; i < lattice.size; ++i) {
    x(2 * i, 2 * i + 1) = 1.0;
    x(2 * i + 1, 2 * i) = 1.0;
  }
  return {(x * w * x - winv).cwiseAbs().maxCoeff(), "sigma_x W~ sigma_x = W~^-1"};
}

}  // namespace uamo
