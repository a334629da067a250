#pragma once

#include <string>
#include <vector>

#include "uamo/types.hpp"

namespace uamo {

struct FluxSpec {
  enum class Kind { Irrational, Approximant };

  Kind kind = Kind::Irrational;
  double value = std::numbers::phi - 1.0;  // (sqrt5 - 1)/2
  long p = 0;
  long q = 1;

  static FluxSpec golden();
  static FluxSpec irrational(double value);
  static FluxSpec approximant(long p, long q);
  // F_{k-1}/F_k for the Fibonacci number n = F_k
  static FluxSpec fibonacci(int n);

  double phi() const { return kind == Kind::Approximant ? double(p) / double(q) : value; }
  void validate() const;
};

struct ModelParams {
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  double theta = 0.0;
  double eta = 0.0;
  FluxSpec flux = FluxSpec::golden();

  double lambda1p() const;
  double lambda2p() const;
  void validate() const;
};

enum class Boundary { Open, Periodic };

// Site x of lattice index i is i - origin. Amplitude index is 2*i + s.
struct Lattice {
  int size = 1;
  Boundary boundary = Boundary::Open;
  int origin = 0;

  static Lattice open(int n);  // symmetric window -n/2 .. n-1-n/2
  static Lattice ring(int n);

  int dim() const { return 2 * size; }
  int site(int index) const { return index - origin; }
  bool symmetric() const;
  void validate() const;
  void validate_for(const ModelParams& params) const;
};

using SpinorState = CVector;

SpinorState localized_state(const Lattice& lattice, int x, cplx h, cplx v);
// |0> (x) (|H> + i|V>)/sqrt(2)
SpinorState default_initial_state(const Lattice& lattice);
// |ψ_{x,0}|² + |ψ_{x,1}|² per lattice index, unnormalized
std::vector<double> site_weights(const SpinorState& state);

// Coin with the phase xΦ+θ supplied directly; a complex phase gives the
// analytically continued coin used by the dual construction.
Mat2 coin_matrix(double lambda2, cplx phase);
// xΦ + offset, reduced exactly mod 1 for rational flux
cplx coin_phase(int x, const FluxSpec& flux, cplx offset);
Mat2 coin_at(int x, const ModelParams& params);
Mat2 coin_sqrt(const Mat2& q);

enum class Variant { Standard, Symmetrized, Dual, LossyRealized };

std::string to_string(Variant v);

struct ShiftAmplitudes {
  double right = 0.0;  // spin 0, x -> x+1
  double left = 0.0;   // spin 1, x -> x-1
  double flip = 0.0;   // +flip on |x,1><x,0|, -flip on |x,0><x,1|
};

ShiftAmplitudes shift_amplitudes(double lambda1, double eta);

// y = scale * Post * S(^T) * Pre * x, applied in O(N).
class FloquetOperator {
 public:
  const ModelParams& params() const { return params_; }
  const Lattice& lattice() const { return lattice_; }
  Variant variant() const { return variant_; }
  int dim() const { return lattice_.dim(); }
  const std::vector<std::string>& warnings() const { return warnings_; }

  void apply(const CVector& in, CVector& out) const;
  CVector apply(const CVector& in) const;
  CMatrix dense() const;

 private:
  friend FloquetOperator build_floquet(const ModelParams&, const Lattice&, Variant);
  friend FloquetOperator build_complexified_dual(const ModelParams&, const Lattice&);
  friend FloquetOperator build_shift_operator(const ModelParams&, const Lattice&);

  FloquetOperator(const ModelParams& params, const Lattice& lattice, Variant variant)
      : params_(params), lattice_(lattice), variant_(variant) {}

  void apply_shift(const CVector& in, CVector& out) const;

  ModelParams params_;
  Lattice lattice_;
  Variant variant_;
  std::vector<Mat2> pre_;
  std::vector<Mat2> post_;
  ShiftAmplitudes shift_;
  bool transposed_ = false;
  double scale_ = 1.0;
  std::vector<std::string> warnings_;
};

FloquetOperator build_floquet(const ModelParams& params, const Lattice& lattice,
                              Variant variant = Variant::Standard);

// W^T_{λ2,λ1,0} with coin phase xΦ + θ - iη; isospectral to the Standard
// walk on a ring.
FloquetOperator build_complexified_dual(const ModelParams& params, const Lattice& lattice);

// The shift alone as an operator (Pre/Post empty).
FloquetOperator build_shift_operator(const ModelParams& params, const Lattice& lattice);
CMatrix build_shift(const ModelParams& params, const Lattice& lattice);
CMatrix build_coin(const ModelParams& params, const Lattice& lattice);

SpinorState skin_transform(const SpinorState& state, const Lattice& lattice, double eta,
                           bool inverse = false);
// Diagonal matrix V_η (or its inverse) on an open chain.
CMatrix skin_matrix(const Lattice& lattice, double eta, bool inverse = false);

struct SymmetryReport {
  double max_deviation = 0.0;
  std::string relation;
};

// (PT) W̃ (PT)^{-1} = W̃^{-1} with PT = Σ|x><-x| ⊗ σ_z K, checked as stated.
SymmetryReport verify_pt_symmetry(const ModelParams& params, const Lattice& lattice);
// σ_x W̃ σ_x = W̃^{-1}; exact on rings, broken by open-chain truncation
SymmetryReport verify_spin_swap_inverse(const ModelParams& params, const Lattice& lattice);

}  // namespace uamo
