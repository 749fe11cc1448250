#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "downlink/errors.hpp"
#include "downlink/model.hpp"

namespace downlink {

// Identifier of the event-sampling stream, pinned in outputs so runs can be
// reproduced: mt19937_64 driving inverse-CDF exponentials on a 53-bit (0,1]
// uniform.
inline constexpr const char* kPrngId = "mt19937_64:u53:invcdf-exp:v1";

struct SimConfig {
  ModelParams params;  // scale_n >= 1 required
  std::uint64_t seed = 1;
  double horizon = 0;
  double warmup = 0;
  std::vector<std::int64_t> initial_state;  // empty = start empty
  double trace_dt = 0;                      // 0 = no path sample
  bool state_histogram = false;             // time-weighted per-state masses
};

struct SimCounts {
  std::int64_t arrived = 0;
  std::int64_t accepted_full = 0;
  std::int64_t downgraded = 0;
  std::int64_t rejected = 0;
};

struct SimOutcome {
  std::vector<SimCounts> counts;  // per class, post-warmup window
  std::map<std::int64_t, double> m_histogram;  // time-weighted offset masses
  std::map<std::vector<std::int64_t>, double> state_histogram;
  std::vector<double> trace_times;
  std::vector<std::vector<double>> trace_states;  // L/N at the sample times
  std::vector<std::int64_t> final_state;
  std::int64_t capacity_units = 0;   // C^N
  std::int64_t threshold_units = 0;  // C0^N
  std::uint64_t seed = 0;
  double horizon = 0;
  double warmup = 0;
  int replicas = 1;
  std::string prng = kPrngId;
};

namespace detail {

class EventSampler {
 public:
  explicit EventSampler(std::uint64_t seed) : eng_(seed) {}
  // uniform on (0,1], 53-bit resolution
  double uniform01() { return double((eng_() >> 11) + 1) * 0x1p-53; }
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace detail

// Event-driven simulation of the finite-N system. Arrivals of class j occur
// at rate lambda_j N; below C0^N they are admitted as requested, between C0^N
// and C^N as class-1 jobs (class-1 arrivals keep their allocation and count
// as accepted_full), at C^N they are rejected. Departures of class j occur at
// rate mu_j L_j. Deterministic given the seed.
inline SimOutcome simulate(const SimConfig& cfg) {
  const ModelParams& p = cfg.params;
  p.checkStructure();
  if (p.scale_n < 1)
    throw ValidationError("simulate: params.scale_n must be a positive integer");
  if (!(cfg.horizon > cfg.warmup) || !(cfg.warmup >= 0))
    throw ValidationError("simulate: requires horizon > warmup >= 0");
  const double n = double(p.scale_n);
  const std::int64_t cN = std::llround(p.c * n);
  const std::int64_t c0N = std::llround(p.c0 * n);
  if (!(c0N >= 1 && c0N < cN))
    throw ValidationError("simulate: rounded capacities need 1 <= C0^N < C^N");
  const int J = p.classes();
  // A full-rate admission at occupancy C0^N - 1 must still fit under C^N.
  if (p.maxRequirement() > cN - c0N + 1)
    throw ValidationError(
        "simulate: A_J exceeds C^N - C0^N + 1, a full-rate admission could "
        "overflow the link");

  std::vector<std::int64_t> state(J, 0);
  if (!cfg.initial_state.empty()) {
    if (static_cast<int>(cfg.initial_state.size()) != J)
      throw ValidationError("simulate: initial_state length mismatch");
    for (std::int64_t v : cfg.initial_state)
      if (v < 0) throw ValidationError("simulate: negative initial_state");
    state = cfg.initial_state;
  }
  std::int64_t occ = 0;
  for (int j = 0; j < J; ++j) occ += p.A[j] * state[j];
  if (occ > cN)
    throw ValidationError("simulate: initial occupancy exceeds C^N");

  SimOutcome out;
  out.counts.assign(J, SimCounts{});
  out.capacity_units = cN;
  out.threshold_units = c0N;
  out.seed = cfg.seed;
  out.horizon = cfg.horizon;
  out.warmup = cfg.warmup;

  detail::EventSampler rng(cfg.seed);
  std::vector<double> arrivalRate(J);
  double arrivalTotal = 0;
  for (int j = 0; j < J; ++j) {
    arrivalRate[j] = p.lambda[j] * n;
    arrivalTotal += arrivalRate[j];
  }

  double t = 0;
  double nextTrace = cfg.trace_dt > 0 ? 0.0 : std::numeric_limits<double>::infinity();
  const auto recordTrace = [&](double at) {
    out.trace_times.push_back(at);
    std::vector<double> scaled(J);
    for (int j = 0; j < J; ++j) scaled[j] = double(state[j]) / n;
    out.trace_states.push_back(std::move(scaled));
  };
  const auto accumulate = [&](double from, double to) {
    const double lo = std::max(from, cfg.warmup);
    const double hi = std::min(to, cfg.horizon);
    if (hi > lo) {
      out.m_histogram[occ - c0N] += hi - lo;
      if (cfg.state_histogram) out.state_histogram[state] += hi - lo;
    }
  };

  while (true) {
    double total = arrivalTotal;
    for (int j = 0; j < J; ++j) total += p.mu[j] * double(state[j]);
    const double dt = rng.exponential(total);
    const double tNext = t + dt;
    while (nextTrace < tNext && nextTrace <= cfg.horizon) {
      recordTrace(nextTrace);
      nextTrace += cfg.trace_dt;
    }
    accumulate(t, tNext);
    if (tNext >= cfg.horizon) break;
    t = tNext;

    double u = rng.uniform01() * total;
    int eventClass = -1;
    bool isArrival = true;
    for (int j = 0; j < J; ++j) {
      if (u < arrivalRate[j]) { eventClass = j; break; }
      u -= arrivalRate[j];
    }
    if (eventClass < 0) {
      isArrival = false;
      for (int j = 0; j < J; ++j) {
        const double r = p.mu[j] * double(state[j]);
        if (u < r) { eventClass = j; break; }
        u -= r;
      }
      if (eventClass < 0) {
        // rounding pushed u past the last bucket; take the last active one
        for (int j = J - 1; j >= 0; --j)
          if (state[j] > 0) { eventClass = j; break; }
        if (eventClass < 0) { eventClass = 0; isArrival = true; }
      }
    }

    const bool counted = t > cfg.warmup;
    if (isArrival) {
      if (counted) ++out.counts[eventClass].arrived;
      if (occ < c0N) {
        ++state[eventClass];
        occ += p.A[eventClass];
        if (counted) ++out.counts[eventClass].accepted_full;
      } else if (occ < cN) {
        ++state[0];
        occ += 1;
        if (counted) {
          if (eventClass == 0)
            ++out.counts[eventClass].accepted_full;
          else
            ++out.counts[eventClass].downgraded;
        }
      } else {
        if (counted) ++out.counts[eventClass].rejected;
      }
    } else {
      --state[eventClass];
      occ -= p.A[eventClass];
    }
  }

  out.final_state = state;
  return out;
}

// Time-weighted, normalized law of the offset m^N over the post-warmup
// window.
inline std::map<std::int64_t, double> empiricalOffsetDistribution(
    const SimOutcome& out) {
  double total = 0;
  for (const auto& [m, w] : out.m_histogram) total += w;
  if (!(total > 0)) throw EmptyWindow("empiricalOffsetDistribution: no mass");
  std::map<std::int64_t, double> dist;
  for (const auto& [m, w] : out.m_histogram) dist[m] = w / total;
  return dist;
}

// Decimated (t, L^N/N) path for comparison with fluid trajectories.
inline std::vector<std::pair<double, std::vector<double>>> fluidTrace(
    const SimOutcome& out) {
  if (out.trace_times.empty())
    throw TraceDisabled("fluidTrace: path sampling was not enabled");
  std::vector<std::pair<double, std::vector<double>>> path;
  path.reserve(out.trace_times.size());
  for (std::size_t i = 0; i < out.trace_times.size(); ++i)
    path.emplace_back(out.trace_times[i], out.trace_states[i]);
  return path;
}

// Pure reducer over independent replicas: counters and time-weighted masses
// add; traces and final states are per-replica and dropped.
inline SimOutcome mergeOutcomes(const std::vector<SimOutcome>& outcomes) {
  if (outcomes.empty()) throw ValidationError("mergeOutcomes: empty input");
  SimOutcome merged = outcomes.front();
  merged.trace_times.clear();
  merged.trace_states.clear();
  merged.final_state.clear();
  for (std::size_t i = 1; i < outcomes.size(); ++i) {
    const SimOutcome& o = outcomes[i];
    if (o.counts.size() != merged.counts.size())
      throw ValidationError("mergeOutcomes: class count mismatch");
    for (std::size_t j = 0; j < merged.counts.size(); ++j) {
      merged.counts[j].arrived += o.counts[j].arrived;
      merged.counts[j].accepted_full += o.counts[j].accepted_full;
      merged.counts[j].downgraded += o.counts[j].downgraded;
      merged.counts[j].rejected += o.counts[j].rejected;
    }
    for (const auto& [m, w] : o.m_histogram) merged.m_histogram[m] += w;
    for (const auto& [s, w] : o.state_histogram) merged.state_histogram[s] += w;
    merged.replicas += o.replicas;
  }
  return merged;
}

}  // namespace downlink
