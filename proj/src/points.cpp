#include "gbs/points.hpp"

#include <atomic>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "gbs/gaussian.hpp"
#include "gbs/parallel.hpp"
#include "gbs/rng.hpp"

namespace gbs {

namespace {

constexpr double kPsdTolerance = 1e-8;

// Calibrated thermal decomposition of a PSD kernel: K = U diag(mu) U^T with
// per-mode field standard deviations sqrt(v_i / 2), v_i = c mu_i / (1 - c mu_i).
struct ThermalSetup {
  Matrix u;
  Vector stddev;
};

ThermalSetup make_setup(const KernelMatrix& k, double n_mean) {
  if (!std::isfinite(n_mean) || n_mean < 0)
    throw validation_error("permanental_sample: n_mean must be >= 0");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k.entries);
  Vector mu = eig.eigenvalues();
  if (mu.minCoeff() < -kPsdTolerance)
    throw validation_error("permanental_sample: kernel is not positive semidefinite");
  mu = mu.cwiseMax(0.0);
  const double mu_max = mu.maxCoeff();

  ThermalSetup setup;
  setup.u = eig.eigenvectors();
  setup.stddev = Vector::Zero(mu.size());
  if (n_mean == 0) return setup;
  if (mu_max == 0)
    throw validation_error("permanental_sample: zero kernel cannot reach a positive n_mean");

  // Mean total count is monotone in c; bisect on u = c mu_max in [0, 1).
  const auto mean_at = [&](double frac) {
    double total = 0;
    for (int i = 0; i < mu.size(); ++i) {
      const double cm = frac * mu(i) / mu_max;
      total += cm / (1 - cm);
    }
    return total;
  };
  double lo = 0, hi = 1 - 1e-15;
  if (mean_at(hi) < n_mean)
    throw validation_error("permanental_sample: n_mean unreachable for this kernel");
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (mean_at(mid) < n_mean ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi) / mu_max;
  for (int i = 0; i < mu.size(); ++i) {
    const double cm = c * mu(i);
    setup.stddev(i) = std::sqrt(0.5 * cm / (1 - cm));
  }
  return setup;
}

PhotonPattern draw_pattern(const ThermalSetup& setup, RngStream& rng) {
  const int m = int(setup.u.rows());
  Vector re(m), im(m);
  for (int i = 0; i < m; ++i) {
    re(i) = setup.stddev(i) * rng.normal();
    im(i) = setup.stddev(i) * rng.normal();
  }
  const Vector beta_re = setup.u * re;
  const Vector beta_im = setup.u * im;
  std::vector<int> counts(size_t(m), 0);
  for (int i = 0; i < m; ++i) {
    const double intensity = beta_re(i) * beta_re(i) + beta_im(i) * beta_im(i);
    counts[size_t(i)] = rng.poisson(intensity);
  }
  return PhotonPattern(std::move(counts));
}

}  // namespace

StateSpace::StateSpace(Matrix c) : coords(std::move(c)) {
  if (coords.rows() < 1)
    throw validation_error("StateSpace: need at least one point");
  if (!coords.allFinite())
    throw validation_error("StateSpace: coordinates must be finite");
}

KernelMatrix::KernelMatrix(Matrix k, KernelKind kind_)
    : entries(std::move(k)), kind(kind_) {
  if (entries.rows() != entries.cols())
    throw validation_error("KernelMatrix: matrix must be square");
  if (!entries.allFinite())
    throw validation_error("KernelMatrix: entries must be finite");
  if (!entries.isApprox(entries.transpose(), 1e-8))
    throw validation_error("KernelMatrix: matrix must be symmetric");
  if (kind == KernelKind::rbf) {
    for (int i = 0; i < entries.rows(); ++i)
      if (std::abs(entries(i, i) - 1.0) > 1e-12)
        throw validation_error("KernelMatrix: rbf kernel needs a unit diagonal");
    // Entries are exp(-d^2/2s^2), in (0, 1]; huge distances may underflow to 0.
    if (entries.minCoeff() < 0 || entries.maxCoeff() > 1 + 1e-12)
      throw validation_error("KernelMatrix: rbf entries must lie in [0, 1]");
  }
  if (kind == KernelKind::rescaled_rbf && entries.minCoeff() < 0)
    throw validation_error("KernelMatrix: rescaled rbf entries must be >= 0");
}

KernelMatrix rbf_kernel(const StateSpace& space, double sigma) {
  if (!(sigma > 0))
    throw validation_error("rbf_kernel: sigma must be positive");
  const int m = space.points();
  Matrix k(m, m);
  for (int i = 0; i < m; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < m; ++j) {
      const double d2 = (space.coords.row(i) - space.coords.row(j)).squaredNorm();
      k(i, j) = k(j, i) = std::exp(-d2 / (2 * sigma * sigma));
    }
  }
  return KernelMatrix(std::move(k), KernelKind::rbf);
}

KernelMatrix rescaled_kernel(const StateSpace& space, double sigma,
                             const Vector& weights) {
  if (weights.size() != space.points())
    throw validation_error("rescaled_kernel: one weight per point required");
  if (!weights.allFinite() || weights.minCoeff() < 0)
    throw validation_error("rescaled_kernel: weights must be finite and >= 0");
  Matrix k = rbf_kernel(space, sigma).entries;
  k = weights.asDiagonal() * k * weights.asDiagonal();
  return KernelMatrix(std::move(k), KernelKind::rescaled_rbf);
}

SampleBatch permanental_sample(const KernelMatrix& k, double n_mean,
                               int n_samples, std::uint64_t seed, int threads) {
  if (n_samples < 0)
    throw validation_error("permanental_sample: n_samples must be >= 0");
  const ThermalSetup setup = make_setup(k, n_mean);
  SampleBatch batch;
  batch.modes = k.modes();
  batch.samples.resize(size_t(n_samples));
  parallel_for(n_samples, threads, [&](int i) {
    RngStream rng = RngStream::derive(seed, std::uint64_t(i));
    batch.samples[size_t(i)] = draw_pattern(setup, rng);
  });
  return batch;
}

SampleBatch permanental_sample_conditioned(const KernelMatrix& k, double n_mean,
                                           int n_points, int n_samples,
                                           std::uint64_t seed, int max_tries,
                                           int threads) {
  if (n_samples < 0)
    throw validation_error("permanental_sample_conditioned: n_samples must be >= 0");
  if (n_points < 0)
    throw validation_error("permanental_sample_conditioned: n_points must be >= 0");
  if (max_tries < 1)
    throw validation_error("permanental_sample_conditioned: max_tries must be >= 1");
  const ThermalSetup setup = make_setup(k, n_mean);
  SampleBatch batch;
  batch.modes = k.modes();
  batch.samples.resize(size_t(n_samples));
  std::atomic<bool> exhausted{false};
  parallel_for(n_samples, threads, [&](int i) {
    for (int t = 0; t < max_tries; ++t) {
      RngStream rng = RngStream::derive(seed, std::uint64_t(i), std::uint64_t(t));
      PhotonPattern p = draw_pattern(setup, rng);
      if (p.total() == n_points) {
        batch.samples[size_t(i)] = std::move(p);
        return;
      }
    }
    exhausted.store(true);
  });
  if (exhausted.load())
    throw resource_error("permanental_sample_conditioned: retry cap exhausted");
  return batch;
}

SampleBatch hafnian_sample(const KernelMatrix& k, double n_mean, int n_samples,
                           std::uint64_t seed, int threads,
                           const PnrOptions& opt) {
  const AdjacencyKernel a{k.entries};
  GaussianState s = state_from_device(encode(a, n_mean));
  return sample_pnr(s, n_samples, seed, threads, opt);
}

}  // namespace gbs
