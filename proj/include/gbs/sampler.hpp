#pragma once

#include <cstdint>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/matfuncs.hpp"

namespace gbs {

// Photon-number-resolved outcome probability.  Handles pure, mixed and
// displaced states; cost grows exponentially in the total photon count.
double probability(const GaussianState& s, const PhotonPattern& pattern);

// Click-pattern probability for threshold detectors; the pattern must be
// binary and the state must have zero mean.
double probability_threshold(const GaussianState& s, const PhotonPattern& clicks);

struct SampleBatch {
  int modes = 0;
  bool threshold = false;
  std::vector<PhotonPattern> samples;
};

struct PnrOptions {
  int cutoff = 5;       // per-mode count explored by default
  int max_cutoff = 8;   // widened to this when the conditional tail is heavy
  double tail_tol = 1e-3;
};

// Exact photon-number sampling by the chain rule over modes.  Sample i is a
// pure function of (seed, i), so results do not depend on the thread count.
SampleBatch sample_pnr(const GaussianState& s, int count, uint64_t seed,
                       int threads = 1, const PnrOptions& opt = {});

// Exact threshold-detector sampling with genuine click conditionals; cost is
// exponential in the number of clicks rather than photons.  Zero mean only.
SampleBatch sample_threshold(const GaussianState& s, int count, uint64_t seed,
                             int threads = 1);

// Keeps samples whose total count lies in [min_total, max_total].
SampleBatch postselect(const SampleBatch& batch, int min_total, int max_total);

// Modes with at least one detection, per sample.
std::vector<std::vector<int>> to_subgraphs(const SampleBatch& batch);

// Threshold view of a count pattern: each entry clipped to {0, 1}.
PhotonPattern clipped(const PhotonPattern& p);

}  // namespace gbs
