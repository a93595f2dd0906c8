#include "gbs/vibronic.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <utility>

namespace gbs {

namespace {

// Second radiation constant h c / k_B in cm K; turns a wavenumber over a
// temperature into the dimensionless Boltzmann exponent.
constexpr double kSecondRadiation = 1.4387769;

}  // namespace

VibronicInput::VibronicInput(Vector w_in, Vector wp_in, Matrix ud_in,
                             Vector delta_in, double temperature_in)
    : w(std::move(w_in)),
      wp(std::move(wp_in)),
      ud(std::move(ud_in)),
      delta(std::move(delta_in)),
      temperature(temperature_in) {
  const int m = int(w.size());
  if (m < 1) throw validation_error("vibronic input needs at least one mode");
  if (wp.size() != m || delta.size() != m || ud.rows() != m || ud.cols() != m)
    throw validation_error("vibronic input sizes are inconsistent");
  if (!w.allFinite() || !wp.allFinite() || !ud.allFinite() || !delta.allFinite())
    throw validation_error("vibronic input must be finite");
  if (w.minCoeff() <= 0.0 || wp.minCoeff() <= 0.0)
    throw validation_error("vibrational frequencies must be positive");
  if ((ud.transpose() * ud - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-6)
    throw validation_error("Duschinsky matrix must be orthogonal");
  if (!(temperature >= 0.0))
    throw validation_error("temperature must be a nonnegative number of Kelvin");
}

VibronicParams gbs_params(const VibronicInput& input) {
  const int m = input.modes();
  const Matrix j = input.wp.cwiseSqrt().asDiagonal() * input.ud *
                   input.w.cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Matrix> svd(j, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() <= 0.0)
    throw numeric_error("frequency map lost rank");
  VibronicParams p;
  p.u1 = svd.matrixU();
  p.u2 = svd.matrixV().transpose();
  p.r = svd.singularValues().array().log();
  p.alpha = input.delta / std::sqrt(2.0);
  p.t = Vector::Zero(m);
  if (input.temperature > 0.0)
    for (int i = 0; i < m; ++i)
      p.t(i) = std::atanh(
          std::exp(-kSecondRadiation * input.w(i) / (2.0 * input.temperature)));
  return p;
}

Vector displacement_to_delta(const Vector& d, const Vector& wp) {
  if (d.size() < 1 || wp.size() != d.size())
    throw validation_error("displacement and frequency sizes must match");
  if (!d.allFinite() || !wp.allFinite() || wp.minCoeff() <= 0.0)
    throw validation_error("displacement conversion needs finite d and positive wp");
  return wp.cwiseSqrt().cwiseProduct(d);
}

GaussianState build_vibronic_state(const VibronicParams& p) {
  const int m = p.modes();
  if (m < 1) throw validation_error("vibronic params need at least one mode");
  if (p.t.size() != m || p.alpha.size() != m || p.u1.rows() != m ||
      p.u1.cols() != m || p.u2.rows() != m || p.u2.cols() != m)
    throw validation_error("vibronic param sizes are inconsistent");
  if (!p.t.allFinite() || !p.r.allFinite() || !p.alpha.allFinite() ||
      !p.u1.allFinite() || !p.u2.allFinite())
    throw validation_error("vibronic params must be finite");
  if ((p.u1.transpose() * p.u1 - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10 ||
      (p.u2.transpose() * p.u2 - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-10)
    throw validation_error("Doktorov rotations must be orthogonal");

  const bool thermal = p.t.cwiseAbs().maxCoeff() > 0.0;
  const int n = thermal ? 2 * m : m;
  GaussianState s = vacuum_state(n);
  if (thermal) apply_two_mode_squeezing(s, p.t);
  apply_interferometer(s, embed_unitary(p.u2.cast<Complex>(), n));
  // apply_squeezing(r > 0) widens the position quadrature, which is the
  // correct direction here: the prepared state is the initial vibrational
  // wavefunction written in the final-state Fock basis, wider by Sigma when
  // Sigma > 1.
  Vector squeeze = Vector::Zero(n);
  squeeze.head(m) = p.r;
  apply_squeezing(s, squeeze);
  apply_interferometer(s, embed_unitary(p.u1.cast<Complex>(), n));
  CVector shift = CVector::Zero(n);
  shift.head(m) = p.alpha.cast<Complex>();
  apply_displacement(s, shift);
  return s;
}

std::vector<double> energies(const SampleBatch& batch, const Vector& w,
                             const Vector& wp) {
  const int m = int(w.size());
  if (m < 1 || wp.size() != m)
    throw validation_error("frequency vectors must have equal positive length");
  if (!w.allFinite() || !wp.allFinite())
    throw validation_error("frequencies must be finite");
  if (batch.threshold)
    throw validation_error("transition energies need photon-number samples");
  const bool doubled = batch.modes == 2 * m;
  if (!doubled && batch.modes != m)
    throw validation_error("sample width must be M or 2M for M molecular modes");
  std::vector<double> out;
  out.reserve(batch.samples.size());
  for (const PhotonPattern& s : batch.samples) {
    double e = 0.0;
    for (int k = 0; k < m; ++k) e += wp(k) * s.counts[size_t(k)];
    if (doubled)
      for (int k = 0; k < m; ++k) e -= w(k) * s.counts[size_t(m + k)];
    out.push_back(e);
  }
  return out;
}

Spectrum spectrum(const std::vector<double>& energy_values, double bin_width,
                  double gamma, double lo, double hi) {
  if (energy_values.empty())
    throw validation_error("spectrum needs at least one energy");
  if (!(bin_width > 0.0) || !(gamma > 0.0))
    throw validation_error("bin width and gamma must be positive");
  if (!(hi > lo)) throw validation_error("spectrum range must be increasing");
  for (double e : energy_values)
    if (!std::isfinite(e)) throw validation_error("energies must be finite");

  Spectrum out;
  out.energies = energy_values;
  out.gamma = gamma;
  const int bins =
      std::max(1, int(std::ceil((hi - lo) / bin_width - 1e-9)));
  out.edges = Vector::LinSpaced(bins + 1, lo, lo + bins * bin_width);
  out.counts.assign(size_t(bins), 0);
  for (double e : energy_values) {
    // Energies outside [lo, hi] land in the boundary bins so the counts
    // always account for every sample.
    int idx = int(std::floor((e - lo) / bin_width));
    idx = std::min(std::max(idx, 0), bins - 1);
    ++out.counts[size_t(idx)];
  }

  const int grid_points = 4 * bins + 1;
  out.grid = Vector::LinSpaced(grid_points, lo, lo + bins * bin_width);
  out.intensity = Vector::Zero(grid_points);
  for (int i = 0; i < grid_points; ++i) {
    double total = 0.0;
    for (double e : energy_values) {
      const double d = out.grid(i) - e;
      total += gamma / (d * d + gamma * gamma);
    }
    out.intensity(i) = total / M_PI;
  }
  return out;
}

SampleBatch sample_vibronic(const VibronicParams& p, int n_samples,
                            std::uint64_t seed, int threads,
                            const PnrOptions& opt) {
  return sample_pnr(build_vibronic_state(p), n_samples, seed, threads, opt);
}

}  // namespace gbs
