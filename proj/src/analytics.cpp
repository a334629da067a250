#include "uamo/analytics.hpp"

#include <cmath>

#include <Eigen/QR>

namespace uamo {

namespace {

void check_couplings(double lambda1, double lambda2) {
  require(lambda1 > 0.0 && lambda1 <= 1.0, "lambda1 must lie in (0,1]: lambda0 is undefined at lambda1 = 0",
          "lambda1=" + std::to_string(lambda1));
  require(lambda2 >= 0.0 && lambda2 <= 1.0, "lambda2 must lie in [0,1]", "lambda2=" + std::to_string(lambda2));
}

double prime(double l) { return std::sqrt(std::max(0.0, 1.0 - l * l)); }

}  // namespace

double lambda0(double lambda1, double lambda2) {
  check_couplings(lambda1, lambda2);
  return lambda2 * (1.0 + prime(lambda1)) / (lambda1 * (1.0 + prime(lambda2)));
}

CriticalPoints critical_points(double lambda1, double lambda2) {
  CriticalPoints c;
  c.lambda0 = lambda0(lambda1, lambda2);
  c.L_hermitian = std::max(0.0, std::log(c.lambda0));
  c.eta_pt = c.L_hermitian / two_pi;
  c.eta0 = std::log((1.0 + prime(lambda1)) / lambda1) / two_pi;
  return c;
}

double dual_lyapunov(double lambda1, double lambda2, double eta) {
  CriticalPoints c = critical_points(lambda1, lambda2);
  double a = std::abs(eta);
  return std::max(0.0, -std::log(c.lambda0) + two_pi * a - two_pi * std::max(0.0, a - c.eta0));
}

double localization_boundary(double lambda1, double eta) {
  require(lambda1 > 0.0 && lambda1 <= 1.0, "lambda1 must lie in (0,1]");
  double e = std::exp(two_pi * std::abs(eta));
  if (lambda1 > 2.0 * e / (1.0 + e * e)) return 1.0;
  double l1p = prime(lambda1);
  return 2.0 * e * lambda1 * (1.0 + l1p) / (2.0 * (1.0 + l1p) + lambda1 * lambda1 * (e * e - 1.0));
}

void HatanoNelsonParams::validate() const {
  require(lambda > 0.0, "Hatano-Nelson potential strength must be positive", "lambda=" + std::to_string(lambda));
  require(std::isfinite(eta), "eta must be finite");
  flux.validate();
}

CMatrix hatano_nelson_matrix(const HatanoNelsonParams& params, Boundary boundary) {
  params.validate();
  const int n = params.size;
  require(n >= 2, "Hatano-Nelson chain needs at least two sites");
  if (boundary == Boundary::Periodic)
    require(params.flux.kind == FluxSpec::Kind::Approximant && n % params.flux.q == 0,
            "periodic chain requires an approximant whose denominator divides N");
  const double fwd = std::exp(two_pi * params.eta), bwd = std::exp(-two_pi * params.eta);
  CMatrix h = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double a = coin_phase(k, params.flux, params.theta).real();
    h(k, k) = 2.0 * params.lambda * std::cos(two_pi * a);
    if (k + 1 < n) h(k, k + 1) = fwd;
    if (k > 0) h(k, k - 1) = bwd;
  }
  if (boundary == Boundary::Periodic) {
    h(n - 1, 0) += fwd;
    h(0, n - 1) += bwd;
  }
  return h;
}

double hatano_nelson_lyapunov(double lambda, double eta) {
  require(lambda > 0.0, "Hatano-Nelson potential strength must be positive");
  return std::max(0.0, std::log(lambda) + two_pi * std::abs(eta));
}

namespace {

// forward: (ψ_{n+1}, ψ_n) from (ψ_n, ψ_{n-1}); backward mirrors it with η -> -η
double cocycle_rate(const HatanoNelsonParams& p, cplx energy, long n_steps, int direction) {
  const double g = std::exp(-direction * two_pi * p.eta);
  const double phi = p.flux.phi();
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Identity();
  double log_growth = 0.0;
  for (long k = 0; k < n_steps; ++k) {
    double site = double(direction * k);
    double v = 2.0 * p.lambda * std::cos(two_pi * (phi * site + p.theta));
    Eigen::Matrix2cd t;
    t << g * (energy - v), -g * g, 1.0, 0.0;
    m = t * m;
    if ((k + 1) % 16 == 0 || k + 1 == n_steps) {
      Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
      log_growth += std::log(std::abs(qr.matrixQR()(0, 0)));
      m = qr.householderQ();
    }
  }
  return log_growth / double(n_steps);
}

}  // namespace

double transfer_matrix_lyapunov_hn(const HatanoNelsonParams& params, cplx energy, long n_steps) {
  params.validate();
  require(n_steps >= 1, "n_steps must be positive");
  return std::max(cocycle_rate(params, energy, n_steps, +1), cocycle_rate(params, energy, n_steps, -1));
}

}  // namespace uamo
