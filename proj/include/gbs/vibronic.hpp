#pragma once

#include <cstdint>
#include <vector>

#include "gbs/gaussian.hpp"
#include "gbs/sampler.hpp"
#include "gbs/types.hpp"

namespace gbs {

// Molecular data for a vibronic transition: ground- and excited-state
// vibrational frequencies in 1/cm, the Duschinsky rotation (q' = ud q + d),
// the dimensionless displacement delta, and the temperature in Kelvin.
struct VibronicInput {
  Vector w;
  Vector wp;
  Matrix ud;
  Vector delta;
  double temperature = 0.0;

  VibronicInput(Vector w_in, Vector wp_in, Matrix ud_in, Vector delta_in,
                double temperature_in);

  int modes() const { return int(w.size()); }
};

// Gaussian-circuit decomposition of the Doktorov transformation plus the
// thermal two-mode squeezing layer: t holds the two-mode squeezing
// parameters (all zero at T = 0), u1 and u2 the left/right singular
// rotations, r the logarithms of the singular values, alpha = delta / sqrt(2).
struct VibronicParams {
  Vector t;
  Matrix u1;
  Vector r;
  Matrix u2;
  Vector alpha;

  int modes() const { return int(r.size()); }
};

// Histogram plus Lorentzian-broadened curve over a fixed energy window.
struct Spectrum {
  std::vector<double> energies;
  Vector edges;
  std::vector<int> counts;
  Vector grid;
  Vector intensity;
  double gamma = 0.0;
};

VibronicParams gbs_params(const VibronicInput& input);

// delta = Omega' d for callers holding mass-weighted normal-coordinate
// displacements d; d must already be expressed in units with hbar = 1 and the
// same wavenumber scale as wp.
Vector displacement_to_delta(const Vector& d, const Vector& wp);

// 2M-mode state: two-mode squeezing on pairs (i, i + M), then the Doktorov
// factors u2, squeezing, u1 and the displacement on the first M modes.  When
// every t is exactly zero the thermal layer is dropped and the state has M
// modes.
GaussianState build_vibronic_state(const VibronicParams& p);

// Transition energy of each sample: sum wp_k m_k over the first M modes minus
// sum w_k n_k over the second M; batches that are M modes wide omit the
// second sum.
std::vector<double> energies(const SampleBatch& batch, const Vector& w,
                             const Vector& wp);

// Histogram of the energies over [lo, hi] in bins of bin_width, plus the sum
// of unit-mass Lorentzians of half-width gamma on a uniform grid.
Spectrum spectrum(const std::vector<double>& energy_values, double bin_width,
                  double gamma, double lo, double hi);

SampleBatch sample_vibronic(const VibronicParams& p, int n_samples,
                            std::uint64_t seed, int threads = 1,
                            const PnrOptions& opt = {});

}  // namespace gbs
