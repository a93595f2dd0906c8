#pragma once

#include <cstdint>

#include "gbs/sampler.hpp"
#include "gbs/types.hpp"

namespace gbs {

// A finite collection of points, one coordinate row per point.
struct StateSpace {
  Matrix coords;

  explicit StateSpace(Matrix c);
  int points() const { return int(coords.rows()); }
  int dim() const { return int(coords.cols()); }
};

enum class KernelKind { rbf, rescaled_rbf, custom };

// Symmetric similarity kernel over a state space.
struct KernelMatrix {
  Matrix entries;
  KernelKind kind = KernelKind::custom;

  explicit KernelMatrix(Matrix k, KernelKind kind_ = KernelKind::custom);
  int modes() const { return int(entries.rows()); }
};

// K_ij = exp(-|r_i - r_j|^2 / (2 sigma^2)); unit diagonal.
KernelMatrix rbf_kernel(const StateSpace& space, double sigma);

// K_ij = w_i w_j exp(-|r_i - r_j|^2 / (2 sigma^2)); weights must be >= 0.
KernelMatrix rescaled_kernel(const StateSpace& space, double sigma,
                             const Vector& weights);

// Quantum-inspired sampler for the permanental point process
// Pr(S) = prod(1 - c mu_i) Per((cK)_S) / prod s_i!, with c > 0 calibrated so
// the mean total count is n_mean.  Draws one thermal field realization per
// sample (cost O(m^2) after an O(m^3) decomposition), then Poisson counts.
// K must be positive semidefinite up to a -1e-8 eigenvalue tolerance.
SampleBatch permanental_sample(const KernelMatrix& k, double n_mean,
                               int n_samples, std::uint64_t seed,
                               int threads = 1);

// Rejection-conditioned variant: keeps only realizations with exactly
// n_points detections, retrying each sample up to max_tries times.
SampleBatch permanental_sample_conditioned(const KernelMatrix& k,
                                           double n_mean, int n_points,
                                           int n_samples, std::uint64_t seed,
                                           int max_tries = 1000,
                                           int threads = 1);

// Hafnian point process: encodes K as a device kernel and draws exact
// photon-number samples, Pr(S) proportional to c^k |Haf(K_S)|^2 / prod s_i!.
SampleBatch hafnian_sample(const KernelMatrix& k, double n_mean, int n_samples,
                           std::uint64_t seed, int threads = 1,
                           const PnrOptions& opt = {});

}  // namespace gbs
