#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/model.hpp"
#include "downlink/spectral.hpp"

namespace downlink {

// Invariant law of the occupancy-offset walk for ell in Delta0, in explicit
// partial-fraction form:
//   pi(n) = kappa * sum_q w_q q^{-n-1}                    n < 0,
//   pi(n) = kappa * (alpha_n + tail_const z1^{-n-1})      0 <= n < A_J - 1,
//   pi(n) = kappa * tail_const * z1^{-n-1}                n >= A_J - 1,
// where q runs over the in-disk zeros of P2, R_D(z) = prod (z - q),
//   kappa      = (z1 - 1) R_D(1) / Lambda_A,
//   tail_const = P2(z1) / ((z1 - 1) R_D(z1)),
//   w_q        = -P1(q) / ((q - z1)(q - 1) R_D'(q)),
// and the alpha_n are the coefficients of
//   -lambda_J (R_Dc(z) - R_Dc(z1)) / (z - z1),
// R_Dc being the monic polynomial with the out-of-disk zeros of P2.
class InvariantDistribution {
 public:
  ModelParams params;
  FluidState ell;
  PolyPair polys;
  RootProfile roots;
  double kappa = 0;
  double tail_const = 0;
  std::vector<double> alpha;           // degrees 0 .. A_J-2
  std::vector<Complex> neg_weights;    // aligned with roots.p2_in_disk

  double z1() const { return roots.z1; }
  int aMax() const { return polys.a_max; }

  Complex evaluateRaw(std::int64_t n) const {
    if (n < 0) {
      Complex s = 0;
      const double e = static_cast<double>(-n - 1);
      for (std::size_t i = 0; i < neg_weights.size(); ++i)
        s += neg_weights[i] * std::pow(roots.p2_in_disk[i], e);
      return kappa * s;
    }
    const double geo = tail_const * std::exp(-(double(n) + 1.0) * std::log(roots.z1));
    if (n < aMax() - 1) return Complex(kappa * (alpha[n] + geo), 0.0);
    return Complex(kappa * geo, 0.0);
  }

  double evaluate(std::int64_t n) const { return evaluateRaw(n).real(); }

  // Total mass on {..., -2, -1}: kappa * sum_q w_q / (1 - q).
  double negativeMass() const {
    Complex s = 0;
    for (std::size_t i = 0; i < neg_weights.size(); ++i)
      s += neg_weights[i] / (1.0 - roots.p2_in_disk[i]);
    return (kappa * s).real();
  }

  // P(Y >= K), geometric pieces summed in closed form.
  double tailAtOrAbove(std::int64_t K) const {
    const double z1v = roots.z1;
    const auto geomFrom = [&](std::int64_t k) {
      // sum_{n>=k} z1^{-n-1} = z1^{-k} / (z1 - 1)
      return kappa * tail_const * std::exp(-double(k) * std::log(z1v)) / (z1v - 1.0);
    };
    if (K >= aMax() - 1) return geomFrom(K);
    double s = geomFrom(aMax() - 1);
    for (std::int64_t n = std::max<std::int64_t>(K, 0); n < aMax() - 1; ++n)
      s += evaluate(n);
    if (K < 0) {
      // sum_{n=K}^{-1} pi(n) = kappa sum_q w_q (1 - q^{-K}) / (1 - q)
      Complex neg = 0;
      const double e = static_cast<double>(-K);
      for (std::size_t i = 0; i < neg_weights.size(); ++i) {
        const Complex q = roots.p2_in_disk[i];
        neg += neg_weights[i] * (1.0 - std::pow(q, e)) / (1.0 - q);
      }
      s += (kappa * neg).real();
    }
    return s;
  }

  // Closed forms of the two generating-function pieces,
  //   phi+(z) = -kappa lambda_J prod_{q out} (z - q) / (z - z1),
  //   phi-(z) = kappa Lambda prod_{p in P1-disk} (z - p) / prod_{q in} (z - q).
  std::pair<Complex, Complex> generatingSplit(Complex z) const {
    constexpr double kPoleTol = 1e-8;
    if (std::abs(z - Complex(roots.z1, 0.0)) < kPoleTol)
      throw PoleProximity("generatingSplit: z within 1e-8 of z1");
    for (const Complex& q : roots.p2_in_disk)
      if (std::abs(z - q) < kPoleTol)
        throw PoleProximity("generatingSplit: z within 1e-8 of an in-disk root");
    Complex plus = -kappa * params.lambda.back();
    for (const Complex& q : roots.p2_out_disk) plus *= (z - q);
    plus /= (z - roots.z1);
    Complex minus = kappa * params.totalRate();
    for (const Complex& p : roots.p1_in_disk) minus *= (z - p);
    for (const Complex& q : roots.p2_in_disk) minus /= (z - q);
    return {plus, minus};
  }
};

inline InvariantDistribution buildDistribution(const ModelParams& p,
                                               const FluidState& s) {
  if (classify(p, s) != RegionTag::Delta0)
    throw NotErgodic("buildDistribution: state is not in Delta0");

  InvariantDistribution dist;
  dist.params = p;
  dist.ell = s;
  dist.polys = buildPolynomials(p, s);
  dist.roots = locateRoots(dist.polys);
  const double z1 = dist.roots.z1;
  const auto& inDisk = dist.roots.p2_in_disk;

  const auto realPart = [](Complex v, const char* what) {
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
      throw NumericalError(std::string("buildDistribution: ") + what +
                           " has a non-negligible imaginary part");
    return v.real();
  };

  Complex rd1 = 1.0, rdz1 = 1.0;
  for (const Complex& q : inDisk) {
    rd1 *= (1.0 - q);
    rdz1 *= (z1 - q);
  }
  dist.kappa = (z1 - 1.0) * realPart(rd1, "R_D(1)") / p.excessUnitRate();
  dist.tail_const = poly::eval(dist.polys.p2, z1) /
                    ((z1 - 1.0) * realPart(rdz1, "R_D(z1)"));

  dist.neg_weights.resize(inDisk.size());
  for (std::size_t i = 0; i < inDisk.size(); ++i) {
    const Complex q = inDisk[i];
    Complex rdPrime = 1.0;  // prod over the other in-disk roots
    for (std::size_t k = 0; k < inDisk.size(); ++k)
      if (k != i) rdPrime *= (q - inDisk[k]);
    dist.neg_weights[i] =
        -poly::eval(dist.polys.p1, q) / ((q - z1) * (q - 1.0) * rdPrime);
  }

  // alpha_n from R_Dc: drop the (cancelling) imaginary parts, subtract the
  // value at z1 and divide by (z - z1).
  const std::vector<Complex> rdc = poly::expandMonic(dist.roots.p2_out_disk);
  poly::Coeffs rdcReal(rdc.size());
  double scale = 0;
  for (const Complex& v : rdc) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < rdc.size(); ++i) {
    if (std::abs(rdc[i].imag()) > 1e-9 * std::max(1.0, scale))
      throw NumericalError(
          "buildDistribution: R_Dc coefficients not real within tolerance");
    rdcReal[i] = rdc[i].real();
  }
  poly::Coeffs shifted = rdcReal;
  shifted[0] -= poly::eval(rdcReal, z1);
  double rem = 0;
  poly::Coeffs quotient = poly::deflate(shifted, z1, &rem);
  dist.alpha.resize(quotient.size());
  const double lambdaTop = p.lambda.back();
  for (std::size_t i = 0; i < quotient.size(); ++i)
    dist.alpha[i] = -lambdaTop * quotient[i];
  return dist;
}

// Closed-form moments of pi at the fluid fixed point ell*. theta_i collects
// the arrival-side jump moments, S bundles the pole locations.
struct MomentSummary {
  double mean = 0;
  double variance = 0;
  double third_central = 0;
  double standardized_skew = 0;
  std::array<double, 4> theta{};  // theta_1 .. theta_4
  double s0 = 0, s1 = 0, s2 = 0;  // S(1), S'(1), S''(1)
};

namespace detail {

inline MomentSummary momentShell(const InvariantDistribution& dist) {
  MomentSummary m;
  const ModelParams& p = dist.params;
  for (int i = 1; i <= 4; ++i) {
    double t = 0;
    for (int j = 0; j < p.classes(); ++j)
      t += p.lambda[j] * std::pow(double(p.A[j]), double(i - 1)) * (p.A[j] - 1);
    m.theta[i - 1] = t;
  }
  const double z1 = dist.z1();
  Complex s0 = 1.0 / Complex(1.0 - z1, 0.0);
  Complex s1 = -1.0 / Complex((1.0 - z1) * (1.0 - z1), 0.0);
  Complex s2 = 2.0 / Complex(std::pow(1.0 - z1, 3.0), 0.0);
  for (const Complex& q : dist.roots.p2_in_disk) {
    const Complex d = 1.0 - q;
    s0 += 1.0 / d;
    s1 -= 1.0 / (d * d);
    s2 += 2.0 / (d * d * d);
  }
  m.s0 = s0.real();
  m.s1 = s1.real();
  m.s2 = s2.real();
  return m;
}

}  // namespace detail

inline MomentSummary moments(const InvariantDistribution& dist) {
  const FixedPoint fp = fixedPoint(dist.params);
  double dev = 0;
  double scale = 1.0;
  for (int j = 0; j < dist.params.classes(); ++j) {
    dev = std::max(dev, std::abs(dist.ell.ell[j] - fp.ell.ell[j]));
    scale = std::max(scale, std::abs(fp.ell.ell[j]));
  }
  if (dev > 1e-8 * scale)
    throw NotFixedPoint(
        "moments: closed forms hold at ell* only; use momentsBySummation");

  MomentSummary m = detail::momentShell(dist);
  const double t1 = m.theta[0], t2 = m.theta[1], t3 = m.theta[2], t4 = m.theta[3];
  const double aJ = dist.aMax();
  m.mean = aJ + t2 / (2 * t1) - m.s0;
  // theta combination: (2 theta_3 - theta_2) / (6 theta_1); cross-checked
  // against direct summation and the truncated-generator stationary law.
  m.variance = (2 * t3 - t2) / (6 * t1) - std::pow(t2 / (2 * t1), 2.0) -
               (m.s0 + m.s1);
  m.third_central = std::pow(t2, 3.0) / (4 * std::pow(t1, 3.0)) +
                    t2 * (t2 - 2 * t3) / (4 * t1 * t1) + (t4 - t3) / (4 * t1) -
                    (m.s0 + 3 * m.s1 + m.s2);
  m.standardized_skew = m.third_central / std::pow(m.variance, 1.5);
  return m;
}

namespace detail {

// T_k(x, K) = sum_{n >= K} n^k x^n for |x| < 1, k = 0..3.
template <typename T>
inline T tailPowerSum(int k, T x, double K) {
  const T one(1.0);
  const T d = one - x;
  const T xk = std::pow(x, K);
  switch (k) {
    case 0:
      return xk / d;
    case 1:
      return K * xk / d + xk * x / (d * d);
    case 2:
      return K * K * xk / d + (2 * K + 1) * xk * x / (d * d) +
             2.0 * xk * x * x / (d * d * d);
    case 3:
      return K * K * K * xk / d + (3 * K * K + 3 * K + 1) * xk * x / (d * d) +
             (6 * K + 6) * xk * x * x / (d * d * d) +
             6.0 * xk * x * x * x / (d * d * d * d);
    default:
      throw NumericalError("tailPowerSum: unsupported order");
  }
}

}  // namespace detail

// Moments by direct summation with analytic geometric tails; valid at any
// Delta0 state, not just ell*.
inline MomentSummary momentsBySummation(const InvariantDistribution& dist) {
  MomentSummary m = detail::momentShell(dist);
  const std::int64_t hi = dist.aMax() + 64;
  const std::int64_t lo = -64;
  double raw[4] = {0, 0, 0, 0};
  for (std::int64_t n = lo; n <= hi; ++n) {
    const double pn = dist.evaluate(n);
    double w = 1.0;
    for (int k = 0; k < 4; ++k) {
      raw[k] += w * pn;
      w *= double(n);
    }
  }
  // positive remainder: pi(n) = (kappa tail_const / z1) x^n with x = 1/z1
  {
    const double x = 1.0 / dist.z1();
    const double pref = dist.kappa * dist.tail_const * x;
    for (int k = 0; k < 4; ++k)
      raw[k] += pref * detail::tailPowerSum(k, x, double(hi + 1));
  }
  // negative remainder: pi(-mm) = kappa sum_q (w_q / q) q^mm, alternating sign
  {
    Complex acc[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < dist.neg_weights.size(); ++i) {
      const Complex q = dist.roots.p2_in_disk[i];
      const Complex pref = dist.neg_weights[i] / q;
      for (int k = 0; k < 4; ++k)
        acc[k] += pref * detail::tailPowerSum(k, q, double(-lo + 1));
    }
    for (int k = 0; k < 4; ++k)
      raw[k] += (k % 2 == 0 ? 1.0 : -1.0) * (dist.kappa * acc[k]).real();
  }
  const double m1 = raw[1] / raw[0];
  const double m2 = raw[2] / raw[0];
  const double m3 = raw[3] / raw[0];
  m.mean = m1;
  m.variance = m2 - m1 * m1;
  m.third_central = m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1;
  m.standardized_skew = m.third_central / std::pow(m.variance, 1.5);
  return m;
}

}  // namespace downlink
