#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/invariant.hpp"
#include "downlink/model.hpp"

namespace downlink {

// Threshold sizing for a link of C integer capacity units with c = 1:
// C0 = alpha C, and the limiting loss probability is the upper tail of the
// offset law, P(Y + C0 > C).
struct ProvisionQuery {
  ModelParams params;  // template with c = 1; c0 is set per evaluated alpha
  std::int64_t capacity_units = 0;  // C
  double epsilon = 0;
  double alpha_grid = 1e-3;

  void check() const {
    params.checkStructure();
    if (std::abs(params.c - 1.0) > 1e-12)
      throw ValidationError("provision: params template must have c = 1");
    if (capacity_units < params.maxRequirement())
      throw ValidationError("provision: capacity_units below A_J");
    if (!(epsilon > 0 && epsilon < 1))
      throw ValidationError("provision: epsilon must lie in (0,1)");
    if (!(alpha_grid > 0 && alpha_grid < 0.5))
      throw ValidationError("provision: alpha_grid must lie in (0, 0.5)");
  }
};

// P(Y_{ell*} + C0 > C) at threshold fraction alpha; C0 = round(alpha C) and
// the inequality is strict, so the tail starts at K + 1 with
// K = C - round(alpha C).
inline double lossProbability(const ProvisionQuery& q, double alpha) {
  q.check();
  ModelParams p = q.params;
  p.c0 = alpha;
  if (!(alpha > 0 && alpha < 1))
    throw RegimeError("lossProbability: alpha outside (0,1)");
  const FixedPoint fp = fixedPoint(p);  // throws RegimeError outside (R1)+(R2)
  const InvariantDistribution dist = buildDistribution(p, fp.ell);
  const std::int64_t k =
      q.capacity_units - std::llround(alpha * double(q.capacity_units));
  return dist.tailAtOrAbove(k + 1);
}

// Largest alpha with loss probability below epsilon. Monotonicity in alpha is
// not assumed: the feasible set is scanned on a grid and the boundary above
// the best feasible point is refined locally by bisection.
inline double maxThreshold(const ProvisionQuery& q) {
  q.check();
  const double lm = q.params.totalRate() / q.params.mu[0];
  const double res = q.alpha_grid;
  const double lo = lm + res;
  const double hi = 1.0 - res;
  const auto feasible = [&](double alpha) {
    try {
      return lossProbability(q, alpha) < q.epsilon;
    } catch (const RegimeError&) {
      return false;
    }
  };
  std::optional<double> best;
  for (double a = lo; a <= hi + 1e-15; a += res)
    if (feasible(a)) best = a;
  if (!best)
    throw Infeasible("maxThreshold: no grid point meets the loss constraint");
  double a0 = *best;          // feasible
  double a1 = a0 + res;       // infeasible or beyond the interval
  if (a1 > hi) return a0;
  while (a1 - a0 > 1e-6) {
    const double mid = 0.5 * (a0 + a1);
    (feasible(mid) ? a0 : a1) = mid;
  }
  return a0;
}

struct ProvisionRow {
  double lambda2 = 0;
  double alpha_eps = 0;
  double pi_minus_eps = 0;
  double loss_uncontrolled = 0;  // 1 - 1/(2 lambda2), pure-loss class-2 loss
  bool regime_ok = true;
};

// Sweep of the two-class video setting (A = (1,2), lambda_1 = 0, equal
// service rates): per lambda2, the maximal threshold alpha_eps and the
// resulting no-downgrade probability pi^-_eps = alpha_eps/lambda2 - 1.
inline std::vector<ProvisionRow> downgradeCurve(
    const ProvisionQuery& q, const std::vector<double>& lambda2Grid) {
  q.check();
  const ModelParams& t = q.params;
  if (t.classes() != 2 || t.A[0] != 1 || t.A[1] != 2 ||
      t.lambda[0] != 0.0 || t.mu[0] != t.mu[1])
    throw ValidationError(
        "downgradeCurve: requires the two-class template A=(1,2), "
        "lambda1 = 0, equal service rates");
  std::vector<ProvisionRow> rows;
  rows.reserve(lambda2Grid.size());
  for (double l2 : lambda2Grid) {
    ProvisionRow row;
    row.lambda2 = l2;
    row.loss_uncontrolled = 1.0 - 1.0 / (2.0 * l2);
    row.regime_ok = l2 > 0.5 && l2 < 1.0;
    ProvisionQuery point = q;
    point.params.lambda[1] = l2;
    try {
      row.alpha_eps = maxThreshold(point);
      row.pi_minus_eps = row.alpha_eps / l2 - 1.0;
    } catch (const RegimeError&) {
      row.alpha_eps = std::numeric_limits<double>::quiet_NaN();
      row.pi_minus_eps = std::numeric_limits<double>::quiet_NaN();
      row.regime_ok = false;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace downlink
