#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/sampler.hpp"

namespace gbs {

// Pattern counts can be astronomically large well before probabilities lose
// meaning, so cardinalities use 128-bit arithmetic with overflow checks.
using BigCount = unsigned __int128;
std::string count_to_string(BigCount value);

// A sample's photon counts sorted in non-increasing order with trailing
// zeros removed; the permutation-invariant fingerprint of a pattern.
struct Orbit {
  std::vector<int> parts;

  Orbit() = default;
  explicit Orbit(std::vector<int> p);
  bool operator==(const Orbit&) const = default;
};

// All patterns over `modes` modes with total `k` and at most `n_max` photons
// in any single mode.
struct Event {
  int k;
  int n_max;
  int modes;

  Event(int k_, int n_max_, int modes_);
  bool operator==(const Event&) const = default;
};

// Estimated event probabilities for one graph; values align with events.
struct FeatureVector {
  std::vector<Event> events;
  std::vector<double> values;
  int n_samples = 0;
};

Orbit sample_to_orbit(const PhotonPattern& s);
bool in_event(const PhotonPattern& s, const Event& e);
bool in_orbit(const PhotonPattern& s, const Orbit& o, int modes);

// Number of member patterns, by dynamic programming over modes.
BigCount event_cardinality(const Event& e);

// Uniform draws from the members of an event / of an orbit embedded in the
// given number of modes.  Used by the Monte Carlo estimators below.
PhotonPattern event_member(const Event& e, std::uint64_t seed);
PhotonPattern orbit_member(const Orbit& o, int modes, std::uint64_t seed);
BigCount orbit_cardinality(const Orbit& o, int modes);

// Empirical event frequencies N_i / N over a sample batch.
FeatureVector feature_vector_sampling(const SampleBatch& batch,
                                      const std::vector<int>& ks, int n_max);

// Exact event probability by enumerating members (guarded by cardinality).
double event_probability_exact(const AdjacencyKernel& a, double n_mean,
                               const Event& e);
double orbit_probability_exact(const AdjacencyKernel& a, double n_mean,
                               const Orbit& o, int modes);

// Monte Carlo event probability: draws patterns uniformly from the event via
// the counting table, averages exact pattern probabilities, and scales by the
// cardinality.  Deterministic in (seed, event index, draw index).
FeatureVector feature_vector_mc(const AdjacencyKernel& a, double n_mean,
                                const std::vector<int>& ks, int n_max,
                                int n_mc, std::uint64_t seed, int threads = 1);
double orbit_probability_mc(const AdjacencyKernel& a, double n_mean,
                            const Orbit& o, int modes, int n_mc,
                            std::uint64_t seed, int threads = 1);

// Feature comparison over identical event lists.
double feature_inner(const FeatureVector& x, const FeatureVector& y);
double feature_distance(const FeatureVector& x, const FeatureVector& y);

}  // namespace gbs
