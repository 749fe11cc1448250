#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "downlink/errors.hpp"

namespace downlink {

// Multi-class link under the single-threshold downgrading rule. Class j jobs
// need A[j] bandwidth units, arrive at rate lambda[j] (per unit of scale) and
// depart at rate mu[j]. An arrival is admitted at its requested rate while the
// occupancy <A,l> is below c0, admitted as a class-1 job (one unit, rate
// mu[1]) between c0 and c, and rejected at c.
struct ModelParams {
  std::vector<int> A;
  std::vector<double> lambda;
  std::vector<double> mu;
  double c = 1.0;
  double c0 = 0.0;
  std::int64_t scale_n = 0;  // finite scale N for the simulator; 0 = unset

  int classes() const { return static_cast<int>(A.size()); }
  int maxRequirement() const { return A.empty() ? 0 : A.back(); }

  double totalRate() const {  // Lambda
    double s = 0;
    for (double l : lambda) s += l;
    return s;
  }
  double rho(int j) const { return lambda[j] / mu[j]; }
  std::vector<double> rhoVector() const {
    std::vector<double> r(lambda.size());
    for (std::size_t j = 0; j < r.size(); ++j) r[j] = lambda[j] / mu[j];
    return r;
  }
  double offeredOccupancy() const {  // <A,rho>
    double s = 0;
    for (int j = 0; j < classes(); ++j) s += A[j] * rho(j);
    return s;
  }
  double excessUnitRate() const {  // Lambda_A = sum lambda_k (A_k - 1)
    double s = 0;
    for (int j = 0; j < classes(); ++j) s += lambda[j] * (A[j] - 1);
    return s;
  }

  // Throws StructuralInvalid naming the violated invariant.
  void checkStructure() const {
    const std::size_t n = A.size();
    if (n == 0) throw StructuralInvalid("params: no classes");
    if (lambda.size() != n || mu.size() != n)
      throw StructuralInvalid("params: A, lambda, mu lengths disagree");
    if (A[0] != 1) throw StructuralInvalid("params: A[1] must equal 1");
    for (std::size_t j = 1; j < n; ++j)
      if (A[j] <= A[j - 1])
        throw StructuralInvalid("params: A must be strictly increasing");
    for (std::size_t j = 0; j < n; ++j) {
      if (!(mu[j] > 0)) throw StructuralInvalid("params: mu must be positive");
      if (!(lambda[j] >= 0))
        throw StructuralInvalid("params: lambda must be nonnegative");
      if (mu[j] < mu[0])
        throw StructuralInvalid("params: mu[1] must be minimal");
    }
    if (!(c > 0)) throw StructuralInvalid("params: c must be positive");
    if (!(c0 > 0)) throw StructuralInvalid("params: c0 must be positive");
    if (!(c0 < c)) throw StructuralInvalid("params: c0 must be less than c");
  }
};

// Fluid state: per-class job mass, nonnegative, with <A,ell> <= c.
struct FluidState {
  std::vector<double> ell;
};

inline double occupancy(const ModelParams& p, const FluidState& s) {
  double occ = 0;
  for (int j = 0; j < p.classes(); ++j) occ += p.A[j] * s.ell[j];
  return occ;
}

// Region of a fluid state. States on the hyperplane <A,x> = c0 split by the
// sign of the two drift expressions; off-plane states are interior.
enum class RegionTag { Delta0, DeltaMinus, DeltaPlus, InteriorBelow, InteriorAbove };

inline const char* to_string(RegionTag t) {
  switch (t) {
    case RegionTag::Delta0: return "Delta0";
    case RegionTag::DeltaMinus: return "DeltaMinus";
    case RegionTag::DeltaPlus: return "DeltaPlus";
    case RegionTag::InteriorBelow: return "InteriorBelow";
    case RegionTag::InteriorAbove: return "InteriorAbove";
  }
  return "?";
}

// Drift of the offset walk up from the negative half-line: sum_j (lambda_j -
// mu_j ell_j) A_j. Positive on Delta0.
inline double upwardDrift(const ModelParams& p, const FluidState& s) {
  double d = 0;
  for (int j = 0; j < p.classes(); ++j)
    d += (p.lambda[j] - p.mu[j] * s.ell[j]) * p.A[j];
  return d;
}

// Drift down from the nonnegative half-line: sum_j mu_j ell_j A_j - Lambda.
// Positive on Delta0.
inline double downwardDrift(const ModelParams& p, const FluidState& s) {
  double d = -p.totalRate();
  for (int j = 0; j < p.classes(); ++j) d += p.mu[j] * s.ell[j] * p.A[j];
  return d;
}

inline RegionTag classify(const ModelParams& p, const FluidState& s) {
  if (static_cast<int>(s.ell.size()) != p.classes())
    throw OutOfStateSpace("classify: state dimension mismatch");
  for (double x : s.ell)
    if (x < -1e-12)
      throw OutOfStateSpace("classify: negative component");
  const double occ = occupancy(p, s);
  const double bandC = 1e-9 * std::max(1.0, p.c);
  if (occ > p.c + bandC)
    throw OutOfStateSpace("classify: occupancy exceeds capacity c");
  const double bandC0 = 1e-9 * std::max(1.0, p.c0);
  if (std::abs(occ - p.c0) <= bandC0) {
    if (upwardDrift(p, s) <= 0) return RegionTag::DeltaMinus;
    if (downwardDrift(p, s) <= 0) return RegionTag::DeltaPlus;
    return RegionTag::Delta0;
  }
  return occ < p.c0 ? RegionTag::InteriorBelow : RegionTag::InteriorAbove;
}

// Regime report: which of the saturation conditions hold. Structural problems
// are errors; the regime booleans are data (sweeps cross these boundaries).
struct RegimeReport {
  bool condition_r = false;   // <A,rho> > c and Lambda/mu1 < c
  bool condition_r1 = false;  // <A,rho> > c0
  bool condition_r2 = false;  // Lambda/mu1 < c0
  bool feasible = true;       // Lambda > 0 and Lambda_A > 0
  double total_rate = 0;      // Lambda
  double offered = 0;         // <A,rho>
  double excess_unit_rate = 0;  // Lambda_A
  std::vector<double> rho;
  std::vector<std::string> notes;
};

inline RegimeReport validate(const ModelParams& p) {
  p.checkStructure();
  RegimeReport r;
  r.total_rate = p.totalRate();
  r.offered = p.offeredOccupancy();
  r.excess_unit_rate = p.excessUnitRate();
  r.rho = p.rhoVector();
  if (!(r.total_rate > 0)) {
    r.feasible = false;
    r.notes.push_back("regime infeasible: total arrival rate is zero");
  }
  if (!(r.excess_unit_rate > 0)) {
    r.feasible = false;
    r.notes.push_back(
        "regime infeasible: no class with A_j > 1 has positive rate "
        "(Lambda_A = 0)");
  }
  const double lm = r.total_rate / p.mu[0];
  r.condition_r = r.offered > p.c && lm < p.c;
  r.condition_r1 = r.offered > p.c0;
  r.condition_r2 = lm < p.c0;
  if (r.feasible && !(r.offered > lm))
    r.notes.push_back("regime infeasible: <A,rho> <= Lambda/mu1");
  return r;
}

struct FixedPoint {
  FluidState ell;   // ell*
  double pi_minus;  // limiting probability of no downgrade
};

// Unique equilibrium of the fluid dynamics on the threshold hyperplane:
//   pi^- = (c0 - Lambda/mu1) / (<A,rho> - Lambda/mu1),
//   ell*_1 = c0 - pi^- sum_{j>=2} rho_j A_j,  ell*_j = rho_j pi^-.
inline FixedPoint fixedPoint(const ModelParams& p) {
  p.checkStructure();
  const double lm = p.totalRate() / p.mu[0];
  const double offered = p.offeredOccupancy();
  if (!(offered > p.c0) || !(lm < p.c0))
    throw RegimeError(
        "fixedPoint: requires <A,rho> > c0 and Lambda/mu1 < c0");
  const double piMinus = (p.c0 - lm) / (offered - lm);
  FixedPoint fp;
  fp.pi_minus = piMinus;
  fp.ell.ell.assign(p.classes(), 0.0);
  double tailLoad = 0;
  for (int j = 1; j < p.classes(); ++j) {
    fp.ell.ell[j] = p.rho(j) * piMinus;
    tailLoad += p.rho(j) * p.A[j];
  }
  fp.ell.ell[0] = p.c0 - piMinus * tailLoad;
  return fp;
}

}  // namespace downlink
