#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/model.hpp"

namespace downlink {

// Erlang fixed point of the pure-loss comparator: the root beta in (0,1) of
// sum_j A_j rho_j beta^{A_j} = c. When <A,rho> <= c nothing is lost
// asymptotically; beta = 1 is reported with saturated = false.
struct ErlangPoint {
  double beta = 1.0;
  bool saturated = false;
  double residual = 0.0;
};

inline ErlangPoint erlangFixedPoint(const ModelParams& p) {
  p.checkStructure();
  const auto load = [&](double beta) {
    double s = 0;
    for (int j = 0; j < p.classes(); ++j)
      s += p.A[j] * p.rho(j) * std::pow(beta, double(p.A[j]));
    return s;
  };
  ErlangPoint out;
  if (!(p.offeredOccupancy() > p.c)) {
    out.beta = 1.0;
    out.saturated = false;
    out.residual = load(1.0) - p.c;
    return out;
  }
  double lo = 0.0, hi = 1.0;  // load(0) = 0 < c < load(1)
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    (load(mid) < p.c ? lo : hi) = mid;
  }
  out.beta = 0.5 * (lo + hi);
  out.saturated = true;
  out.residual = load(out.beta) - p.c;
  return out;
}

struct ComparisonResult {
  double c0 = 0;
  double beta = 1.0;
  std::vector<double> per_class_acceptance;  // beta^{A_j}
  double w_l = 0;  // asymptotic load served at requested rate, pure loss
  double w_d = 0;  // same under the downgrading policy
  double delta = 0;  // W_L - W_D
  bool regime_ok = true;
};

namespace detail {

// pi^- clamped into [0,1]: outside the saturation regime the fluid system
// either never downgrades (<A,rho> <= c0) or always does (Lambda/mu1 >= c0);
// the clamp gives W_D its limiting value there.
inline double clampedPiMinus(const ModelParams& p, double c0) {
  const double lm = p.totalRate() / p.mu[0];
  const double offered = p.offeredOccupancy();
  if (offered <= lm) return c0 > lm ? 1.0 : 0.0;
  return std::clamp((c0 - lm) / (offered - lm), 0.0, 1.0);
}

}  // namespace detail

inline std::vector<ComparisonResult> compare(const ModelParams& p,
                                             const std::vector<double>& c0Grid) {
  p.checkStructure();
  const double lm = p.totalRate() / p.mu[0];
  const ErlangPoint erlang = erlangFixedPoint(p);
  double rhoSum = 0;
  double wl = 0;
  for (int j = 0; j < p.classes(); ++j) {
    rhoSum += p.rho(j);
    wl += p.rho(j) * std::pow(erlang.beta, double(p.A[j]));
  }
  wl /= p.totalRate();

  std::vector<ComparisonResult> rows;
  rows.reserve(c0Grid.size());
  for (double c0 : c0Grid) {
    if (!(c0 > lm && c0 < p.c))
      throw RegimeError("compare: c0 outside (Lambda/mu1, c)");
    ComparisonResult r;
    r.c0 = c0;
    r.beta = erlang.beta;
    for (int j = 0; j < p.classes(); ++j)
      r.per_class_acceptance.push_back(std::pow(erlang.beta, double(p.A[j])));
    r.w_l = wl;
    const double piMinus = detail::clampedPiMinus(p, c0);
    r.w_d = rhoSum * piMinus / p.totalRate();
    r.delta = r.w_l - r.w_d;
    r.regime_ok = erlang.saturated && p.offeredOccupancy() > c0;
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace downlink
