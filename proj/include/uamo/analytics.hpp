#pragma once

#include "uamo/core_model.hpp"

namespace uamo {

struct CriticalPoints {
  double lambda0 = 1.0;
  double L_hermitian = 0.0;
  double eta_pt = 0.0;
  double eta0 = 0.0;
};

double lambda0(double lambda1, double lambda2);
CriticalPoints critical_points(double lambda1, double lambda2);

// max{0, -log λ0 + 2π|η| - 2π max{0, |η| - η0}}
double dual_lyapunov(double lambda1, double lambda2, double eta);

// critical λ2 of the non-Hermitian metal-insulator transition
double localization_boundary(double lambda1, double eta);

struct HatanoNelsonParams {
  double lambda = 1.0;
  double eta = 0.0;
  double theta = 0.0;
  FluxSpec flux = FluxSpec::golden();
  int size = 0;

  void validate() const;
};

// (Hψ)_n = e^{2πη}ψ_{n+1} + e^{-2πη}ψ_{n-1} + 2λcos(2π(Φn+θ))ψ_n
CMatrix hatano_nelson_matrix(const HatanoNelsonParams& params, Boundary boundary);

// max{0, log λ + 2π|η|}
double hatano_nelson_lyapunov(double lambda, double eta);

// Top growth rate of the transfer-matrix cocycle, maximized over the two
// iteration directions; QR renormalization every 16 steps.
double transfer_matrix_lyapunov_hn(const HatanoNelsonParams& params, cplx energy, long n_steps);

}  // namespace uamo
