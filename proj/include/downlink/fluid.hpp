#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/model.hpp"

namespace downlink {

// Right-hand side of the limiting dynamics with the offset-walk equilibrium
// substituted per region: on Delta0 the negative-side mass is
// sum_j (A_j mu_j ell_j - lambda_j) / Lambda_A; below the threshold it is 1
// (free M/M/infinity flow); above it is 0.
namespace detail {

inline std::vector<double> vectorFieldTagged(const ModelParams& p,
                                             const FluidState& s, RegionTag tag) {
  double piNeg = 0;
  switch (tag) {
    case RegionTag::Delta0:
      piNeg = downwardDrift(p, s) / p.excessUnitRate();
      break;
    case RegionTag::DeltaMinus:
    case RegionTag::InteriorBelow:
      piNeg = 1.0;
      break;
    case RegionTag::DeltaPlus:
    case RegionTag::InteriorAbove:
      piNeg = 0.0;
      break;
  }
  const int J = p.classes();
  std::vector<double> f(J);
  double tailRate = 0;
  for (int j = 1; j < J; ++j) {
    f[j] = -p.mu[j] * s.ell[j] + p.lambda[j] * piNeg;
    tailRate += p.lambda[j];
  }
  f[0] = -p.mu[0] * s.ell[0] + p.lambda[0] + (1.0 - piNeg) * tailRate;
  return f;
}

}  // namespace detail

inline std::vector<double> vectorField(const ModelParams& p, const FluidState& s) {
  return detail::vectorFieldTagged(p, s, classify(p, s));
}

struct FluidTrajectory {
  std::vector<double> times;
  std::vector<FluidState> states;
  std::vector<RegionTag> tags;
};

// Fixed-step RK4. The region tag is frozen over each step; trajectories on
// the threshold hyperplane are re-projected after every step by recomputing
// the class-1 component (A_1 = 1, so this leaves the j >= 2 dynamics alone).
// Crossings from below are located by bisection on the step fraction.
inline FluidTrajectory integrate(const ModelParams& p, const FluidState& ell0,
                                 double horizon, double step, int stride = 1) {
  p.checkStructure();
  if (!(step > 0)) throw ValidationError("integrate: step must be positive");
  if (!(horizon >= 0)) throw ValidationError("integrate: negative horizon");
  if (stride < 1) stride = 1;

  const int J = p.classes();
  const auto rk4 = [&](const FluidState& s, double h, RegionTag tag) {
    const std::vector<double> k1 = detail::vectorFieldTagged(p, s, tag);
    FluidState tmp{s.ell};
    for (int j = 0; j < J; ++j) tmp.ell[j] = s.ell[j] + 0.5 * h * k1[j];
    const std::vector<double> k2 = detail::vectorFieldTagged(p, tmp, tag);
    for (int j = 0; j < J; ++j) tmp.ell[j] = s.ell[j] + 0.5 * h * k2[j];
    const std::vector<double> k3 = detail::vectorFieldTagged(p, tmp, tag);
    for (int j = 0; j < J; ++j) tmp.ell[j] = s.ell[j] + h * k3[j];
    const std::vector<double> k4 = detail::vectorFieldTagged(p, tmp, tag);
    FluidState out{s.ell};
    for (int j = 0; j < J; ++j)
      out.ell[j] =
          s.ell[j] + h / 6.0 * (k1[j] + 2 * k2[j] + 2 * k3[j] + k4[j]);
    return out;
  };
  const auto projectOntoPlane = [&](FluidState& s) {
    double tail = 0;
    for (int j = 1; j < J; ++j) tail += p.A[j] * s.ell[j];
    s.ell[0] = p.c0 - tail;
  };

  FluidTrajectory traj;
  FluidState state = ell0;
  RegionTag tag = classify(p, state);
  if (tag == RegionTag::InteriorAbove || tag == RegionTag::DeltaPlus)
    throw RegionUnsupported(
        "integrate: states above the threshold are not simulated by the "
        "fluid module");
  double t = 0;
  traj.times.push_back(t);
  traj.states.push_back(state);
  traj.tags.push_back(tag);

  // Guard floor so small components do not trip the relative-change check.
  const double floorStep = 0.05 * std::max(1.0, p.c0);
  long long stepIndex = 0;
  while (t < horizon - 1e-15 * std::max(1.0, horizon)) {
    const double h = std::min(step, horizon - t);
    tag = classify(p, state);
    if (tag == RegionTag::InteriorAbove || tag == RegionTag::DeltaPlus)
      throw RegionUnsupported("integrate: trajectory entered the region above "
                              "the threshold");
    FluidState next = rk4(state, h, tag);
    double hUsed = h;
    bool crossed = false;
    if (tag == RegionTag::InteriorBelow && occupancy(p, next) >= p.c0) {
      // hitting-time refinement on the step fraction
      double lo = 0, hi = h;
      while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        if (occupancy(p, rk4(state, mid, tag)) >= p.c0)
          hi = mid;
        else
          lo = mid;
      }
      hUsed = hi;
      next = rk4(state, hUsed, tag);
      projectOntoPlane(next);
      crossed = true;
    }
    for (int j = 0; j < J; ++j) {
      const double delta = std::abs(next.ell[j] - state.ell[j]);
      if (delta > 0.10 * std::max(std::abs(state.ell[j]), floorStep))
        throw StepTooLarge("integrate: a single step moved a component by "
                           "more than 10% of its magnitude");
    }
    if (tag == RegionTag::Delta0) projectOntoPlane(next);
    state = next;
    t += hUsed;
    ++stepIndex;
    if (crossed || stepIndex % stride == 0 || t >= horizon - 1e-12) {
      traj.times.push_back(t);
      traj.states.push_back(state);
      traj.tags.push_back(classify(p, state));
    }
  }
  return traj;
}

// Linearization of the on-plane dynamics in the j >= 2 coordinates:
//   dz/dt = e_b + B z,  B_jk = lambda_j b_k - mu_j 1{k=j},
//   b_0 = (mu_1 c0 - Lambda)/Lambda_A,  b_j = A_j (mu_j - mu_1)/Lambda_A.
struct StabilityReport {
  Eigen::MatrixXd b;                          // (J-1) x (J-1)
  std::vector<std::complex<double>> eigenvalues;
  double max_real_part = 0;
  std::vector<double> e_b;
  double f_at_zero = 0;                       // F(0) = sum b_j lambda_j / mu_j
  std::vector<double> fixed_point_tail;       // -B^{-1} e_b = (ell*_j, j >= 2)
};

inline StabilityReport stabilityReport(const ModelParams& p) {
  p.checkStructure();
  const double lm = p.totalRate() / p.mu[0];
  if (!(p.offeredOccupancy() > p.c0) || !(lm < p.c0))
    throw RegimeError(
        "stabilityReport: requires <A,rho> > c0 and Lambda/mu1 < c0");
  const int J = p.classes();
  const double lambdaA = p.excessUnitRate();
  const double b0 = (p.mu[0] * p.c0 - p.totalRate()) / lambdaA;
  std::vector<double> bj(J, 0.0);
  for (int j = 1; j < J; ++j) bj[j] = p.A[j] * (p.mu[j] - p.mu[0]) / lambdaA;

  StabilityReport rep;
  rep.b = Eigen::MatrixXd::Zero(J - 1, J - 1);
  rep.e_b.resize(J - 1);
  for (int j = 1; j < J; ++j) {
    rep.e_b[j - 1] = b0 * p.lambda[j];
    for (int k = 1; k < J; ++k)
      rep.b(j - 1, k - 1) = p.lambda[j] * bj[k] - (j == k ? p.mu[j] : 0.0);
    rep.f_at_zero += bj[j] * p.lambda[j] / p.mu[j];
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(rep.b);
  if (std::abs(lu.determinant()) < 1e-12)
    throw SingularB("stabilityReport: B is singular, regime violated");
  Eigen::VectorXd eb(J - 1);
  for (int i = 0; i < J - 1; ++i) eb(i) = rep.e_b[i];
  const Eigen::VectorXd tail = lu.solve(-eb);
  rep.fixed_point_tail.assign(tail.data(), tail.data() + J - 1);

  Eigen::EigenSolver<Eigen::MatrixXd> solver(rep.b, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("stabilityReport: eigenvalue iteration failed");
  rep.max_real_part = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < J - 1; ++i) {
    const std::complex<double> ev = solver.eigenvalues()(i);
    rep.eigenvalues.push_back(ev);
    rep.max_real_part = std::max(rep.max_real_part, ev.real());
  }
  return rep;
}

}  // namespace downlink
