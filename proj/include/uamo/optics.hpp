#pragma once

#include <vector>

#include "uamo/core_model.hpp"

namespace uamo {

// `faulty` flips the sign of the lower-right entry; used to self-test the
// validation harness.
Mat2 hwp(double phi, bool faulty = false);
Mat2 qwp(double phi);

struct WavePlateAngles {
  double phi1 = 0.0, phi2 = 0.0, phi3 = 0.0;
  double theta1 = 0.0, theta2 = 0.0;
};

WavePlateAngles wave_plate_angles(int x, const ModelParams& params);

struct CoinDecomposition {
  WavePlateAngles angles;
  Mat2 product;
  double residual = 0.0;
};

// Q_x = q(φ3) h(φ2) q(φ1)
CoinDecomposition coin_decomposition(int x, const ModelParams& params, bool faulty = false);

struct ShiftDecomposition {
  CMatrix op;
  double residual = 0.0;
};

// S = e^{2πη} M_E S'_2 h(θ2) S'_1 h(θ1) M_E; open chains are widened by a site
// per side and restricted back to the window.
ShiftDecomposition shift_decomposition(const ModelParams& params, const Lattice& lattice,
                                       bool faulty = false);

struct LossyStepRecord {
  int t = 0;
  double surviving_norm_sq = 0.0;
  double lost_prob = 0.0;
  double cumulative_lost = 0.0;
};

struct LossyWalk {
  std::vector<SpinorState> states;  // unnormalized, t = 0..t_max
  std::vector<LossyStepRecord> records;
  std::vector<std::vector<double>> site_loss;  // N_L(t, x) per lattice index, t = 1..t_max
};

// Evolves with W_exp = e^{-2πη} W = M_E S_0 M_E Q and books the intensity
// removed at each M_E pass.
LossyWalk simulate_lossy_walk(const SpinorState& initial, const ModelParams& params,
                              const Lattice& lattice, int t_max);

// P(t) = e^{4πηt} Σ N(t,x) / Σ [N(t,x) + Σ_{t'≤t} N_L(t',x)]
std::vector<double> reconstruct_overall_probability(const std::vector<LossyStepRecord>& records,
                                                    double eta);

}  // namespace uamo
