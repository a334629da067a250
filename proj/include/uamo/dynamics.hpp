#pragma once

#include <optional>
#include <random>
#include <vector>

#include "uamo/core_model.hpp"
#include "uamo/spectral.hpp"

namespace uamo {

// States t = 0..t_max, unnormalized.
std::vector<SpinorState> evolve(const SpinorState& initial, const FloquetOperator& op, int t_max);

struct Distribution {
  std::vector<int> x;
  std::vector<double> p;  // sums to 1
};

Distribution position_distribution(const SpinorState& state, const Lattice& lattice);
double mean_position(const Distribution& d);
double standard_deviation(const Distribution& d);
double second_moment(const Distribution& d);  // uncentered <x²>
double overall_probability(const SpinorState& state);

// [Σ sqrt(p_a p_b)]²
double similarity(const std::vector<double>& pa, const std::vector<double>& pb);

// Shot-noise emulation: counts ~ Poisson(total * p), renormalized.
std::vector<double> poisson_resample(const std::vector<double>& p, double total_counts,
                                     std::mt19937_64& rng);

struct ObservableSeries {
  std::vector<Distribution> distributions;
  std::vector<double> sigma;
  std::vector<double> second_moment;
  std::vector<double> mean;
  std::vector<double> overall_p;
  std::vector<double> similarity;  // filled when a reference is supplied
};

ObservableSeries observe(const std::vector<SpinorState>& trajectory, const Lattice& lattice,
                         const std::vector<Distribution>* reference = nullptr);

// No-loss eigenstate with the largest peak site fraction, projected onto its
// peak site and renormalized.
SpinorState prepare_no_loss_initial(const SpectrumResult& spectrum, const Lattice& lattice,
                                    double tol = 1e-4, NoLossState* chosen = nullptr);

// Same preparation from the eigenstate(s) with the smallest |Im E|; used where
// no state meets the no-loss tolerance.
SpinorState prepare_min_loss_initial(const SpectrumResult& spectrum, const Lattice& lattice,
                                     NoLossState* chosen = nullptr);

struct ProjectionReport {
  std::vector<double> weight;  // t = 0..t_max
  double condition_number = 0.0;
  bool ill_conditioned = false;
};

ProjectionReport short_time_projection_check(const SpinorState& initial, const SpectrumResult& spectrum,
                                             int index, int t_max, double cond_limit = 1e12);

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace uamo
