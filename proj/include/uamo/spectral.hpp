#pragma once

#include <string>
#include <vector>

#include "uamo/core_model.hpp"

namespace uamo {

enum class PtPhase { Unbroken, Broken, FullyComplex };

std::string to_string(PtPhase p);

struct Tolerances {
  double unit_scale = 1e-6;  // tol_unit = unit_scale * max(1, ||W||_1)
  double gap = 1e-4;
  double no_loss = 1e-4;
};

struct Classification {
  PtPhase phase = PtPhase::Unbroken;
  bool boundary_zone = false;
  double max_unit_deviation = 0.0;  // max | |z|-1 |
  double min_abs_log_modulus = 0.0;  // min | ln|z| |
  double max_abs_im_e = 0.0;
  int near_unit_count = 0;  // | ln|z| | <= tol_gap
  double tol_unit = 0.0;
  double tol_gap = 0.0;
};

struct SpectrumResult {
  std::vector<cplx> eigenvalues;
  std::vector<cplx> quasienergies;
  CMatrix eigenvectors;  // columns, unit norm; empty unless requested
  double norm1 = 0.0;
  Classification classification;

  int size() const { return int(eigenvalues.size()); }
  bool has_vectors() const { return eigenvectors.cols() > 0; }
};

struct EigenOptions {
  bool vectors = false;
  int dense_cap = 1024;
  Tolerances tol;
};

// E = arg z - i ln|z|, arg in (-π, π]
cplx quasienergy(cplx z);

// Power-of-two diagonal scaling, returns d with B = D^{-1} A D.
Eigen::VectorXd balance(CMatrix& a);

// Eigenvalues (and optionally unit-norm right eigenvectors) of a dense
// nonsymmetric matrix, sorted by (arg z, |z|).
void dense_eigen(const CMatrix& a, bool vectors, std::vector<cplx>& values, CMatrix& vecs);

SpectrumResult eigendecompose(const FloquetOperator& op, const EigenOptions& options = {});

Classification classify_pt_phase(const std::vector<cplx>& eigenvalues, double norm1,
                                 const Tolerances& tol = {});

double participation_ratio(const SpinorState& state);
// site coordinate of the largest site weight, smallest index on ties
int localization_center(const SpinorState& state, const Lattice& lattice);

struct NoLossState {
  SpinorState state;
  cplx quasienergy;
  int center = 0;
  double participation_ratio = 0.0;
  int index = 0;  // column in the spectrum
};

std::vector<NoLossState> find_no_loss_states(const SpectrumResult& spectrum, const Lattice& lattice,
                                             double tol = 1e-4);

struct DecayFit {
  double left_rate = 0.0;  // probability decay per site
  double right_rate = 0.0;
  double left_orders = 0.0;  // decades of dynamic range used
  double right_orders = 0.0;
  int left_points = 0;
  int right_points = 0;
  bool sufficient_range = false;
};

DecayFit eigenstate_decay_fit(const SpinorState& state, const Lattice& lattice, int center,
                              double min_orders = 6.0);

struct WindingOptions {
  int m_initial = 256;
  int m_cap = 8192;
  double gap_threshold = 0.01;
  double max_jump = pi / 2;
};

struct WindingResult {
  cplx z;
  int m = 0;
  double nu = 0.0;
  int nu_hat = 0;
  double max_jump = 0.0;
  bool valid = false;
  std::string note;
};

// Reference spectrum: the η=0 walk at the same θ on the same ring.
std::vector<cplx> winding_reference_spectrum(const ModelParams& params, const Lattice& lattice);

WindingResult winding_number(const ModelParams& params, const Lattice& lattice, cplx z,
                             const WindingOptions& options = {},
                             const std::vector<cplx>* reference = nullptr);

std::vector<WindingResult> winding_profile(const ModelParams& params, const Lattice& lattice,
                                           int z_count, const WindingOptions& options = {},
                                           int threads = 1);

struct TransitionEstimate {
  double first = 0.0;
  double second = 0.0;
  bool first_found = false;
  bool second_found = false;
};

TransitionEstimate transitions_from_profiles(const std::vector<double>& etas,
                                             const std::vector<std::vector<WindingResult>>& profiles);

struct ScanOptions {
  double eta_min = 0.0;
  double eta_max = 0.5;
  double coarse_step = 0.01;
  double resolution = 1e-3;
  Tolerances tol;
  int threads = 1;
};

struct SizeScan {
  int size = 0;
  TransitionEstimate estimate;
};

struct TransitionScan {
  std::vector<SizeScan> per_size;
  TransitionEstimate estimate;  // from the largest size
};

// Classifier bisection in η on Fibonacci rings at each size.
TransitionScan locate_transitions(double lambda1, double lambda2, double theta,
                                  const std::vector<int>& sizes, const ScanOptions& options = {});

}  // namespace uamo
