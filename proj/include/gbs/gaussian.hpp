#pragma once

#include <optional>
#include <vector>

#include "gbs/types.hpp"

namespace gbs {

// Real symmetric kernel (graph adjacency, similarity kernel, ...).
// Construction validates squareness, symmetry (1e-8 relative) and finiteness.
struct AdjacencyKernel {
  Matrix entries;

  explicit AdjacencyKernel(Matrix a);
  int modes() const { return int(entries.rows()); }
};

// Takagi decomposition A = U diag(values) U^T with values >= 0 descending
// and U unitary.
struct TakagiResult {
  CMatrix unitary;
  Vector values;
};

TakagiResult takagi(const Matrix& a);
TakagiResult takagi(const CMatrix& a);

// Result of programming a device to a kernel at a target mean photon number.
struct EncodedDevice {
  CMatrix unitary;       // Takagi unitary of the kernel
  Vector takagi_values;  // raw Takagi values of the kernel, descending
  double rescale_c = 0;  // c with c * values

  // max < 1
  Vector squeezing;      // r_i = artanh(c * lambda_i)
  double mean_photon = 0;
};

// Solves sum_i (c l_i)^2 / (1 - (c l_i)^2) = n_mean for c by bisection.
EncodedDevice encode(const AdjacencyKernel& a, double n_mean);

// Zero-mean-or-displaced Gaussian state over `modes` modes in the complex
// (a, a^dagger) picture.  `sigma` is the vacuum-referenced covariance: the
// vacuum state has sigma = 0, and the Husimi matrix is Q = sigma + I.
// `mean` holds (alpha, conj(alpha)).
struct GaussianState {
  int modes = 0;
  CMatrix sigma;
  CVector mean;
};

GaussianState vacuum_state(int modes);

// Pure state of the encoded device: A-matrix equals (cA) plus its conjugate
// block, mean zero.
GaussianState state_from_device(const EncodedDevice& dev);

CMatrix q_matrix(const GaussianState& s);

// A = X (I - Q^{-1}) with X the block swap [[0, I], [I, 0]].
CMatrix a_matrix(const GaussianState& s);

// sqrt(det Q), real positive; throws numeric_error if Q is not positive
// definite or det Q < 1 - 1e-9.
double sqrt_det_q(const GaussianState& s);

// Uniform photon loss: sigma scales by (1 - loss), mean by sqrt(1 - loss).
GaussianState apply_loss(const GaussianState& s, double loss);

// Marginal state on the listed modes (order preserved).
GaussianState reduce_state(const GaussianState& s, const std::vector<int>& keep);

double mean_photons(const GaussianState& s);
Vector photon_number_vector(const GaussianState& s);

// If the A-matrix is block diagonal (pure zero-mean state) within `tol`,
// returns its upper-left m x m block.
std::optional<CMatrix> pure_block(const GaussianState& s, double tol = 1e-9);

// Gaussian unitaries, applied in place.
void apply_interferometer(GaussianState& s, const CMatrix& u);
void apply_squeezing(GaussianState& s, const Vector& r);
// Pairs (i, i + modes/2); `t` has modes/2 entries.
void apply_two_mode_squeezing(GaussianState& s, const Vector& t);
void apply_displacement(GaussianState& s, const CVector& alpha);

// u acting on `count` modes starting at `offset`, identity elsewhere.
CMatrix embed_unitary(const CMatrix& u, int modes, int offset = 0);

namespace detail {
// Bisection for f increasing on (0, c_max) with f -> 0 at 0 and f -> inf at
// c_max; returns c with |f(c) - target| converged to ~1e-12.
template <typename F>
double bisect_increasing(double c_max, double target, F f) {
  double lo = 0.0, hi = c_max;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    double v = f(mid);
    if (std::abs(v - target) < 1e-12) return mid;
    if (v < target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-16 * c_max) break;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

}  // namespace gbs
