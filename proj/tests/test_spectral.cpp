#include <algorithm>

#include "doctest.h"
#include "test_util.hpp"
#include "uamo/spectral.hpp"

using namespace uamo;
using testutil::multiset_distance;

namespace {

SpectrumResult ring_spectrum(double l1, double l2, double eta, int n, bool vectors = false, double theta = 0.0) {
  EigenOptions o;
  o.vectors = vectors;
  return eigendecompose(build_floquet(testutil::ring_params(l1, l2, eta, n, theta), Lattice::ring(n)), o);
}

// midpoint of the widest angular gap of the reference spectrum
cplx widest_gap(const std::vector<cplx>& ref) {
  std::vector<double> a;
  for (cplx z : ref) a.push_back(std::arg(z));
  std::sort(a.begin(), a.end());
  double best = a.front() + two_pi - a.back(), mid = a.back() + best / 2;
  for (size_t i = 1; i < a.size(); ++i)
    if (a[i] - a[i - 1] > best) best = a[i] - a[i - 1], mid = 0.5 * (a[i] + a[i - 1]);
  return std::polar(1.0, mid);
}

}  // namespace

TEST_CASE("unitary spectrum lies on the unit circle") {
  auto s = ring_spectrum(0.25, 0.5, 0.0, 89);
  REQUIRE(s.size() == 178);
  for (cplx z : s.eigenvalues) CHECK(std::abs(std::abs(z) - 1.0) < 1e-10);
  CHECK(s.classification.phase == PtPhase::Unbroken);
}

TEST_CASE("quasienergies and ordering") {
  auto s = ring_spectrum(0.25, 0.5, 0.2, 34);
  for (int k = 0; k < s.size(); ++k) {
    cplx z = s.eigenvalues[k];
    CHECK(std::abs(std::exp(cplx(0, 1) * s.quasienergies[k]) - z) < 1e-12);
    CHECK(s.quasienergies[k].real() > -pi);
    CHECK(s.quasienergies[k].real() <= pi);
    if (k > 0) CHECK(std::arg(s.eigenvalues[k - 1]) <= std::arg(z));
  }
}

TEST_CASE("eigenvectors satisfy the eigen-equation") {
  Lattice ring = Lattice::ring(55);
  auto op = build_floquet(testutil::ring_params(0.25, 0.5, 0.2, 55), ring);
  EigenOptions o;
  o.vectors = true;
  auto s = eigendecompose(op, o);
  CMatrix w = op.dense();
  for (int k = 0; k < s.size(); ++k) {
    CVector v = s.eigenvectors.col(k);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    CHECK((w * v - s.eigenvalues[k] * v).norm() < 1e-9);
  }
}

TEST_CASE("balancing uses powers of two and keeps the spectrum") {
  CMatrix a0 = CMatrix::Random(12, 12);
  Eigen::VectorXd g(12);
  for (int i = 0; i < 12; ++i) g(i) = std::pow(10.0, i - 6);
  CMatrix a = g.asDiagonal() * a0 * g.asDiagonal().inverse();
  CMatrix b = a;
  Eigen::VectorXd d = balance(b);
  for (int i = 0; i < d.size(); ++i) CHECK(std::log2(d(i)) == std::round(std::log2(d(i))));
  CHECK((d.asDiagonal().inverse() * a * d.asDiagonal() - b).cwiseAbs().maxCoeff() < 1e-12 * a.cwiseAbs().maxCoeff());
  CHECK(b.cwiseAbs().maxCoeff() < 1e-3 * a.cwiseAbs().maxCoeff());
  CHECK(multiset_distance(testutil::eig(a0), testutil::eig(b)) < 1e-10);
}

TEST_CASE("eigendecompose preconditions") {
  auto open = build_floquet(testutil::open_params(0.5, 0.5, 0.0), Lattice::open(11));
  CHECK_THROWS_AS(eigendecompose(open), Error);
  EigenOptions o;
  o.dense_cap = 100;
  CHECK_THROWS_AS(eigendecompose(build_floquet(testutil::ring_params(0.5, 0.5, 0.0, 55), Lattice::ring(55)), o),
                  Error);
}

TEST_CASE("three-way classification") {
  CHECK(ring_spectrum(0.25, 0.5, 0.05, 89).classification.phase == PtPhase::Unbroken);
  auto full = ring_spectrum(0.25, 0.5, 0.335, 89).classification;
  CHECK(full.phase == PtPhase::FullyComplex);
  CHECK(full.near_unit_count == 0);
  auto far = ring_spectrum(0.25, 0.5, 0.4, 89);
  for (cplx z : far.eigenvalues) CHECK(std::abs(std::log(std::abs(z))) > 1e-4);
  // the even ring keeps unit-modulus states inside the mixed window
  auto mixed = ring_spectrum(0.25, 0.5, 0.2, 144).classification;
  CHECK(mixed.phase == PtPhase::Broken);
  CHECK(mixed.near_unit_count >= 1);
  auto mid = ring_spectrum(0.25, 0.5, 0.135, 144).classification;
  CHECK(mid.phase == PtPhase::Broken);
  CHECK(mid.near_unit_count >= 1);
}

TEST_CASE("classifier on synthetic spectra") {
  Tolerances tol;
  CHECK(classify_pt_phase({std::polar(1.0, 0.3), std::polar(1.0, -1.0)}, 1.0, tol).phase == PtPhase::Unbroken);
  CHECK(classify_pt_phase({2.0, 0.5}, 1.0, tol).phase == PtPhase::FullyComplex);
  auto b = classify_pt_phase({2.0, 0.5, cplx(0, 1)}, 1.0, tol);
  CHECK(b.phase == PtPhase::Broken);
  CHECK(b.near_unit_count == 1);
  CHECK(!b.boundary_zone);
  auto edge = classify_pt_phase({std::polar(1.0 + 2e-6, 0.0), std::polar(1.0, 1.0)}, 1.0, tol);
  CHECK(edge.boundary_zone);
  CHECK(classify_pt_phase({std::polar(1.0 + 2e-6, 0.0)}, 3.0, tol).phase == PtPhase::Unbroken);
}

TEST_CASE("off-circle eigenvalues pair as (z, 1/z)") {
  for (double eta : {0.2, 0.4}) {
    auto s = ring_spectrum(0.25, 0.5, eta, 89);
    std::vector<cplx> inv;
    for (cplx z : s.eigenvalues) inv.push_back(1.0 / z);
    CHECK(multiset_distance(s.eigenvalues, inv) < 1e-8);
  }
}

TEST_CASE("|det W| does not depend on theta") {
  Lattice ring = Lattice::ring(34);
  double ref = std::abs(build_floquet(testutil::ring_params(0.4, 0.7, 0.15, 34), ring).dense().determinant());
  for (double theta : {0.1, 0.37, 0.9}) {
    double d = std::abs(build_floquet(testutil::ring_params(0.4, 0.7, 0.15, 34, theta), ring).dense().determinant());
    CHECK(std::abs(d - ref) < 1e-10 * ref);
  }
}

TEST_CASE("spectrum is eta-independent below the PT threshold") {
  CHECK(multiset_distance(ring_spectrum(0.25, 0.5, 0.0, 89).eigenvalues,
                          ring_spectrum(0.25, 0.5, 0.05, 89).eigenvalues) < 1e-6);
}

TEST_CASE("two ring sizes agree away from the critical values in the pure regimes") {
  for (double eta : {0.0, 0.05, 0.09, 0.36, 0.4, 0.45})
    CHECK(ring_spectrum(0.25, 0.5, eta, 89).classification.phase ==
          ring_spectrum(0.25, 0.5, eta, 144).classification.phase);
}

TEST_CASE("every eigenstate is lossless at eta=0") {
  Lattice ring = Lattice::ring(34);
  auto s = ring_spectrum(0.25, 0.5, 0.0, 34, true);
  auto states = find_no_loss_states(s, ring, 1e-4);
  CHECK(states.size() == 68);
  for (const auto& st : states) CHECK(st.participation_ratio >= 1.0);
  CHECK(find_no_loss_states(ring_spectrum(0.25, 0.5, 0.335, 89, true), Lattice::ring(89), 1e-4).empty());
}

TEST_CASE("decay fit on synthetic exponential profiles") {
  Lattice chain = Lattice::open(61);
  SpinorState s(chain.dim());
  for (int i = 0; i < chain.size; ++i) {
    int x = chain.site(i);
    double amp = std::exp(-0.25 * std::abs(x) - (x > 0 ? 0.1 * x : 0.0));
    s(2 * i) = amp, s(2 * i + 1) = 0.0;
  }
  DecayFit f = eigenstate_decay_fit(s, chain, 0);
  CHECK(std::abs(f.left_rate - 0.5) < 1e-10);
  CHECK(std::abs(f.right_rate - 0.7) < 1e-10);
  CHECK(f.sufficient_range);
  DecayFit shallow = eigenstate_decay_fit(s, chain, 0, 40.0);
  CHECK(!shallow.sufficient_range);
}

TEST_CASE("localized eigenstates decay at twice the Lyapunov exponent") {
  const double l0 = 0.5 * (1 + std::sqrt(1 - 0.0625)) / (0.25 * (1 + std::sqrt(0.75)));
  const double rate = 2 * std::log(l0);
  Lattice ring = Lattice::ring(89);
  auto s = ring_spectrum(0.25, 0.5, 0.0, 89, true);
  int good = 0, tested = 0;
  for (int k = 0; k < s.size(); k += 11) {
    CVector v = s.eigenvectors.col(k);
    DecayFit f = eigenstate_decay_fit(v, ring, localization_center(v, ring));
    if (!f.sufficient_range) continue;
    ++tested;
    good += std::abs(f.left_rate - rate) < 0.15 * rate && std::abs(f.right_rate - rate) < 0.15 * rate;
  }
  CHECK(tested >= 10);
  CHECK(good == tested);
}

TEST_CASE("skin-effect asymmetry of the decay rates") {
  // W_η = V_η W_0 V_η^{-1}: amplitude rates L-2πη to the right, L+2πη to the left.
  // An open chain keeps the similarity exact; on a ring the slow tail wraps around.
  const double eta = 0.05;
  Lattice chain = Lattice::open(121);
  std::vector<cplx> values;
  CMatrix vecs;
  dense_eigen(build_floquet(testutil::open_params(0.25, 0.5, eta), chain).dense(), true, values, vecs);
  int tested = 0, good = 0;
  for (int k = 0; k < vecs.cols(); k += 3) {
    CVector v = vecs.col(k);
    int c = localization_center(v, chain);
    if (std::abs(c) > 20) continue;
    DecayFit f = eigenstate_decay_fit(v, chain, c);
    if (!f.sufficient_range) continue;
    ++tested;
    double diff = f.left_rate - f.right_rate;
    good += std::abs(diff - 4 * two_pi * eta) < 0.25 * 4 * two_pi * eta;
  }
  CHECK(tested >= 10);
  CHECK(good == tested);
}

TEST_CASE("winding number regimes") {
  Lattice ring = Lattice::ring(89);
  auto low = testutil::ring_params(0.25, 0.5, 0.05, 89);
  auto ref = winding_reference_spectrum(low, ring);
  WindingResult w = winding_number(low, ring, widest_gap(ref));
  CHECK(w.valid);
  CHECK(w.nu_hat == 0);
  CHECK(std::abs(w.nu - w.nu_hat) < 1e-6);

  auto high = testutil::ring_params(0.25, 0.5, 0.4, 89);
  for (const auto& r : winding_profile(high, ring, 16)) {
    if (r.note == "base point in spectrum") continue;
    CHECK(r.valid);
    CHECK(std::abs(r.nu_hat) == 1);
  }
}

TEST_CASE("mixed regime winds at some base points") {
  Lattice ring = Lattice::ring(89);
  auto prof = winding_profile(testutil::ring_params(0.25, 0.5, 0.2, 89), ring, 32);
  int wound = 0, zero = 0;
  for (const auto& r : prof) {
    if (!r.valid) continue;
    CHECK(std::abs(r.nu - r.nu_hat) < 1e-6);
    wound += std::abs(r.nu_hat) == 1;
    zero += r.nu_hat == 0;
  }
  CHECK(wound >= 1);
  CHECK(zero >= 1);
}

TEST_CASE("winding profile is odd in eta and vanishes at eta=0") {
  Lattice ring = Lattice::ring(55);
  auto plus = winding_profile(testutil::ring_params(0.25, 0.5, 0.3, 55), ring, 16);
  auto minus = winding_profile(testutil::ring_params(0.25, 0.5, -0.3, 55), ring, 16);
  auto zero = winding_profile(testutil::ring_params(0.25, 0.5, 0.0, 55), ring, 16);
  for (size_t j = 0; j < plus.size(); ++j) {
    CHECK(plus[j].valid == minus[j].valid);
    if (!plus[j].valid) continue;
    CHECK(plus[j].nu_hat == -minus[j].nu_hat);
    CHECK(zero[j].nu_hat == 0);
  }
}

TEST_CASE("winding rejects base points inside the spectrum") {
  Lattice ring = Lattice::ring(34);
  auto p = testutil::ring_params(0.25, 0.5, 0.1, 34);
  auto ref = winding_reference_spectrum(p, ring);
  CHECK_THROWS_AS(winding_number(p, ring, ref[3] / std::abs(ref[3])), Error);
  CHECK_THROWS_AS(winding_number(p, ring, cplx(0.5, 0.0)), Error);
}

TEST_CASE("transition detection from synthetic profiles") {
  auto mk = [](std::vector<int> v) {
    std::vector<WindingResult> out;
    for (int n : v) {
      WindingResult r;
      r.valid = n != 9;
      r.nu_hat = n;
      out.push_back(r);
    }
    return out;
  };
  auto t = transitions_from_profiles({0.0, 0.1, 0.2, 0.3}, {mk({0, 0, 9}), mk({0, 1, 0}), mk({1, 1, 0}), mk({1, 9, 1})});
  CHECK(t.first_found);
  CHECK(t.first == 0.1);
  CHECK(t.second_found);
  CHECK(t.second == 0.3);
}

TEST_CASE("classifier bisection brackets the two transitions") {
  ScanOptions o;
  o.coarse_step = 0.02;
  auto scan = locate_transitions(0.25, 0.5, 0.0, {55}, o);
  REQUIRE(scan.estimate.first_found);
  REQUIRE(scan.estimate.second_found);
  CHECK(scan.estimate.first > 0.05);
  CHECK(scan.estimate.first < scan.estimate.second);
  CHECK(scan.estimate.second < 0.45);
}
