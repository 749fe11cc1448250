#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "downlink/errors.hpp"

namespace downlink::poly {

using Complex = std::complex<double>;
// Coefficients in ascending order: c[0] + c[1] z + ... + c[n] z^n.
using Coeffs = std::vector<double>;

inline double eval(const Coeffs& c, double z) {
  double v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
  return v;
}

inline Complex eval(const Coeffs& c, Complex z) {
  Complex v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * z + c[i];
  return v;
}

inline Coeffs derivative(const Coeffs& c) {
  if (c.size() <= 1) return {0.0};
  Coeffs d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * double(i);
  return d;
}

inline double maxAbsCoeff(const Coeffs& c) {
  double m = 0;
  for (double x : c) m = std::max(m, std::abs(x));
  return m;
}

// Synthetic division by (z - root). Returns the quotient; the remainder (the
// value of the polynomial at root) is stored through `remainder` if given.
inline Coeffs deflate(const Coeffs& c, double root, double* remainder = nullptr) {
  const std::size_t n = c.size();
  if (n < 2) throw NumericalError("deflate: polynomial degree too small");
  Coeffs q(n - 1);
  double acc = c[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    q[i] = acc;
    acc = c[i] + acc * root;
  }
  if (remainder) *remainder = acc;
  return q;
}

// All complex roots of the polynomial via the companion matrix of its monic
// normalization. Degree is taken from the coefficient vector; the leading
// coefficient must be nonzero.
inline std::vector<Complex> companionRoots(const Coeffs& c) {
  const int deg = static_cast<int>(c.size()) - 1;
  if (deg < 1) return {};
  const double lead = c.back();
  if (lead == 0.0 || !std::isfinite(lead))
    throw NumericalError("companionRoots: zero or non-finite leading coefficient");
  if (deg == 1) return {Complex(-c[0] / lead, 0.0)};
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) m(i, deg - 1) = -c[i] / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("companionRoots: eigenvalue iteration failed");
  std::vector<Complex> out(deg);
  for (int i = 0; i < deg; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

inline Complex newtonPolish(const Coeffs& p, const Coeffs& dp, Complex z, int steps) {
  for (int k = 0; k < steps; ++k) {
    const Complex f = eval(p, z);
    const Complex g = eval(dp, z);
    if (std::abs(g) < 1e-300) break;
    z -= f / g;
  }
  return z;
}

inline double newtonPolish(const Coeffs& p, const Coeffs& dp, double z, int steps) {
  for (int k = 0; k < steps; ++k) {
    const double f = eval(p, z);
    const double g = eval(dp, z);
    if (std::abs(g) < 1e-300) break;
    z -= f / g;
  }
  return z;
}

// Companion-matrix roots of `deflated`, polished by two Newton steps on
// `original`. Real-axis symmetry is kept exact: eigenvalues of the real
// companion matrix come in conjugate pairs, only the upper-half member is
// polished and its mirror is emitted as the conjugate.
inline std::vector<Complex> solveRoots(const Coeffs& deflated, const Coeffs& original,
                                       int polishSteps = 2) {
  const Coeffs dOrig = derivative(original);
  std::vector<Complex> raw = companionRoots(deflated);
  std::vector<Complex> out;
  out.reserve(raw.size());
  for (const Complex& r : raw) {
    if (r.imag() == 0.0) {
      out.emplace_back(newtonPolish(original, dOrig, r.real(), polishSteps), 0.0);
    } else if (r.imag() > 0.0) {
      Complex z = newtonPolish(original, dOrig, r, polishSteps);
      out.push_back(z);
      out.push_back(std::conj(z));
    }
  }
  if (out.size() != raw.size())
    throw NumericalError("solveRoots: conjugate pairing lost a root");
  std::sort(out.begin(), out.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

// Monic product prod (z - r_j) as complex coefficients, ascending.
inline std::vector<Complex> expandMonic(const std::vector<Complex>& roots) {
  std::vector<Complex> acc{Complex(1.0, 0.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(acc.size() + 1, Complex(0.0, 0.0));
    for (std::size_t i = 0; i < acc.size(); ++i) {
      next[i + 1] += acc[i];
      next[i] -= acc[i] * r;
    }
    acc.swap(next);
  }
  return acc;
}

// Expand lead * prod (z - r_j) back into a real coefficient vector. The
// imaginary parts must cancel (roots closed under conjugation).
inline Coeffs fromRoots(double lead, const std::vector<Complex>& roots) {
  const std::vector<Complex> acc = expandMonic(roots);
  Coeffs out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].real() * lead;
  return out;
}

}  // namespace downlink::poly
