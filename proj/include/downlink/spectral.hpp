#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/model.hpp"
#include "downlink/poly.hpp"

namespace downlink {

using poly::Complex;

// The two polynomials of the half-line balance relation of the offset walk,
// for a given fluid state ell:
//   P1(z) = sum_j [ (lambda_j + mu_j ell_j) z^A  - lambda_j z^{A+1}
//                   - mu_j ell_j z^{A - A_j} ]
//   P2(z) = sum_j [ lambda_j z^{A + A_j} + mu_j ell_j z^{A - A_j}
//                   - (lambda_j + mu_j ell_j) z^A ]
// with A = A_J. Both vanish at z = 1 by construction.
struct PolyPair {
  poly::Coeffs p1;  // degree A_J + 1
  poly::Coeffs p2;  // degree 2 A_J
  int a_max = 0;    // A_J
};

inline PolyPair buildPolynomials(const ModelParams& p, const FluidState& s) {
  p.checkStructure();
  const int J = p.classes();
  if (static_cast<int>(s.ell.size()) != J)
    throw OutOfStateSpace("buildPolynomials: state dimension mismatch");
  for (double x : s.ell)
    if (x < -1e-12)
      throw OutOfStateSpace("buildPolynomials: negative component");
  const int aMax = p.maxRequirement();
  if (aMax < 2)
    throw DegenerateModel("buildPolynomials: requires A_J >= 2");
  if (!(p.excessUnitRate() > 0))
    throw DegenerateModel(
        "buildPolynomials: no class with A_j > 1 has positive rate");
  if (!(p.lambda[J - 1] > 0))
    throw DegenerateModel(
        "buildPolynomials: top class has zero arrival rate, factorization "
        "degenerates");

  PolyPair pair;
  pair.a_max = aMax;
  pair.p1.assign(aMax + 2, 0.0);
  pair.p2.assign(2 * aMax + 1, 0.0);
  for (int j = 0; j < J; ++j) {
    const double lj = p.lambda[j];
    const double ml = p.mu[j] * s.ell[j];
    pair.p1[aMax] += lj + ml;
    pair.p1[aMax + 1] -= lj;
    pair.p1[aMax - p.A[j]] -= ml;
    pair.p2[aMax + p.A[j]] += lj;
    pair.p2[aMax - p.A[j]] += ml;
    pair.p2[aMax] -= lj + ml;
  }
  return pair;
}

// Zeros of P1 and P2 classified against the unit circle. For ell in Delta0:
// P1 has the root 1, one real root z1 > 1 and A_J - 1 roots inside the unit
// disk; P2 has the root 1, one real root z2 in (0,1), A_J roots inside the
// disk in total and A_J - 1 outside.
struct RootProfile {
  double z1 = 0;
  double z2 = 0;
  std::vector<Complex> p1_in_disk;   // A_J - 1 roots
  std::vector<Complex> p2_in_disk;   // A_J roots, z2 among them
  std::vector<Complex> p2_out_disk;  // A_J - 1 roots
};

namespace detail {

inline void splitByModulus(const std::vector<Complex>& roots,
                           std::vector<Complex>& inDisk,
                           std::vector<Complex>& outDisk, const char* which) {
  constexpr double kBand = 1e-9;
  for (const Complex& r : roots) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) <= kBand)
      throw RootCountMismatch(std::string(which) +
                              ": root on the unit circle, input is outside "
                              "Delta0 or conditioning failed");
    (m < 1.0 ? inDisk : outDisk).push_back(r);
  }
}

inline double extractPositiveReal(const std::vector<Complex>& candidates,
                                  double lo, double hi, const char* which) {
  constexpr double kImagTol = 1e-9;
  const Complex* found = nullptr;
  for (const Complex& r : candidates) {
    if (std::abs(r.imag()) <= kImagTol && r.real() > lo && r.real() < hi) {
      if (found)
        throw RootCountMismatch(std::string(which) +
                                ": multiple positive real roots in range");
      found = &r;
    }
  }
  if (!found)
    throw RootCountMismatch(std::string(which) +
                            ": no positive real root in the expected range");
  return found->real();
}

}  // namespace detail

inline RootProfile locateRoots(const PolyPair& pair) {
  const int aMax = pair.a_max;
  const double scale1 = poly::maxAbsCoeff(pair.p1);
  const double scale2 = poly::maxAbsCoeff(pair.p2);
  double rem = 0;

  // The root at z = 1 is removed by synthetic division before solving.
  const poly::Coeffs q1 = poly::deflate(pair.p1, 1.0, &rem);
  if (std::abs(rem) > 1e-9 * scale1)
    throw NumericalError("locateRoots: P1(1) != 0, malformed polynomial pair");
  const poly::Coeffs q2 = poly::deflate(pair.p2, 1.0, &rem);
  if (std::abs(rem) > 1e-9 * scale2)
    throw NumericalError("locateRoots: P2(1) != 0, malformed polynomial pair");

  const std::vector<Complex> roots1 = poly::solveRoots(q1, pair.p1);
  const std::vector<Complex> roots2 = poly::solveRoots(q2, pair.p2);

  RootProfile profile;
  std::vector<Complex> out1;
  detail::splitByModulus(roots1, profile.p1_in_disk, out1, "P1");
  detail::splitByModulus(roots2, profile.p2_in_disk, profile.p2_out_disk, "P2");

  if (static_cast<int>(out1.size()) != 1 ||
      static_cast<int>(profile.p1_in_disk.size()) != aMax - 1)
    throw RootCountMismatch("P1: expected one root beyond the unit disk and "
                            "A_J-1 inside");
  if (static_cast<int>(profile.p2_in_disk.size()) != aMax ||
      static_cast<int>(profile.p2_out_disk.size()) != aMax - 1)
    throw RootCountMismatch("P2: expected A_J roots inside the unit disk and "
                            "A_J-1 outside");

  profile.z1 = detail::extractPositiveReal(
      out1, 1.0, std::numeric_limits<double>::infinity(), "P1");
  profile.z2 = detail::extractPositiveReal(profile.p2_in_disk, 1e-9, 1.0, "P2");

  // Partial fractions downstream require the in-disk zeros of P2 simple.
  for (std::size_t i = 0; i < profile.p2_in_disk.size(); ++i)
    for (std::size_t k = i + 1; k < profile.p2_in_disk.size(); ++k)
      if (std::abs(profile.p2_in_disk[i] - profile.p2_in_disk[k]) < 1e-8)
        throw RepeatedRootDetected(
            "P2: two in-disk roots coincide within tolerance");
  return profile;
}

}  // namespace downlink
