#include "gbs/gaussian.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "gbs/matfuncs.hpp"

namespace gbs {

namespace {

void hermitize(CMatrix& m) { m = 0.5 * (m + m.adjoint()).eval(); }

CMatrix identity(int n) { return CMatrix::Identity(n, n); }

// sigma' = w (sigma + I/2) w^dagger - I/2, mean' = w mean.
void apply_bogoliubov(GaussianState& s, const CMatrix& w) {
  const int n = 2 * s.modes;
  s.sigma = (w * s.sigma * w.adjoint() + 0.5 * (w * w.adjoint() - identity(n))).eval();
  hermitize(s.sigma);
  s.mean = (w * s.mean).eval();
}

}  // namespace

AdjacencyKernel::AdjacencyKernel(Matrix a) : entries(std::move(a)) {
  if (entries.rows() != entries.cols())
    throw validation_error("kernel must be square");
  if (!entries.allFinite())
    throw validation_error("kernel entries must be finite");
  detail::check_symmetric(entries, "kernel");
  entries = 0.5 * (entries + entries.transpose()).eval();
}

TakagiResult takagi(const Matrix& a) {
  detail::check_symmetric(a, "takagi input");
  const int n = int(a.rows());
  Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw numeric_error("eigendecomposition failed");

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  const Vector& d = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(d(i)) > std::abs(d(j));
  });

  TakagiResult out;
  out.unitary.resize(n, n);
  out.values.resize(n);
  for (int k = 0; k < n; ++k) {
    const int p = order[k];
    out.values(k) = std::abs(d(p));
    const Complex phase = d(p) < 0 ? Complex(0, 1) : Complex(1, 0);
    out.unitary.col(k) = phase * es.eigenvectors().col(p).cast<Complex>();
  }

  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  CVector vals = out.values.cast<Complex>();
  CMatrix rec = out.unitary * vals.asDiagonal() * out.unitary.transpose();
  if ((rec - sym.cast<Complex>()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw numeric_error("takagi reconstruction failed");
  return out;
}

TakagiResult takagi(const CMatrix& a) {
  if (a.rows() != a.cols()) throw validation_error("takagi input must be square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() >
      1e-8 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw validation_error("takagi input must be symmetric");
  const int n = int(a.rows());
  CMatrix sym = 0.5 * (a + a.transpose());

  // Real embedding: for A = X + iY, eigenvectors (x; y) of [[X, Y], [Y, -X]]
  // with eigenvalue +l give Takagi pairs (x + iy, l); the spectrum is
  // symmetric about zero.
  Matrix big(2 * n, 2 * n);
  big.topLeftCorner(n, n) = sym.real();
  big.topRightCorner(n, n) = sym.imag();
  big.bottomLeftCorner(n, n) = sym.imag();
  big.bottomRightCorner(n, n) = -sym.real();
  Eigen::SelfAdjointEigenSolver<Matrix> es(big);
  if (es.info() != Eigen::Success) throw numeric_error("eigendecomposition failed");

  TakagiResult out;
  out.unitary.resize(n, n);
  out.values.resize(n);
  for (int k = 0; k < n; ++k) {
    const int p = 2 * n - 1 - k;  // nonnegative half, descending
    out.values(k) = std::max(0.0, es.eigenvalues()(p));
    CVector u = es.eigenvectors().col(p).head(n).cast<Complex>() +
                Complex(0, 1) * es.eigenvectors().col(p).tail(n).cast<Complex>();
    out.unitary.col(k) = u / u.norm();
  }

  // Columns of the near-null space are not automatically orthonormal in the
  // complex sense; rebuild them by projection, falling back to canonical
  // directions when a candidate collapses.
  const double lmax = out.values.size() ? out.values(0) : 0.0;
  const double ztol = 1e-10 * std::max(1.0, lmax);
  for (int k = 0; k < n; ++k) {
    if (out.values(k) > ztol) continue;
    out.values(k) = 0.0;
    CVector u = out.unitary.col(k);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < k; ++j) u -= out.unitary.col(j).dot(u) * out.unitary.col(j);
    if (u.norm() < 0.3) {
      for (int cand = 0; cand < n && u.norm() < 0.3; ++cand) {
        u = CVector::Unit(n, cand);
        for (int pass = 0; pass < 2; ++pass)
          for (int j = 0; j < k; ++j) u -= out.unitary.col(j).dot(u) * out.unitary.col(j);
      }
    }
    out.unitary.col(k) = u / u.norm();
  }

  const double scale = std::max(1.0, sym.cwiseAbs().maxCoeff());
  if ((out.unitary.adjoint() * out.unitary - identity(n)).cwiseAbs().maxCoeff() >
      1e-8)
    throw numeric_error("takagi unitary lost orthonormality");
  CVector vals = out.values.cast<Complex>();
  CMatrix rec = out.unitary * vals.asDiagonal() * out.unitary.transpose();
  if ((rec - sym).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw numeric_error("takagi reconstruction failed");
  return out;
}

EncodedDevice encode(const AdjacencyKernel& a, double n_mean) {
  if (!std::isfinite(n_mean) || n_mean < 0)
    throw validation_error("mean photon number must be finite and nonnegative");
  TakagiResult tak = takagi(a.entries);

  EncodedDevice dev;
  dev.unitary = tak.unitary;
  dev.takagi_values = tak.values;
  dev.mean_photon = n_mean;
  dev.squeezing = Vector::Zero(a.modes());
  dev.rescale_c = 0.0;

  const double lmax = tak.values(0);
  if (n_mean == 0.0) return dev;
  if (lmax <= 0.0)
    throw validation_error("kernel has no nonzero Takagi value; cannot reach target mean photon number");

  auto photons = [&](double c) {
    double total = 0;
    for (int i = 0; i < tak.values.size(); ++i) {
      const double x = c * tak.values(i);
      if (x >= 1.0) return std::numeric_limits<double>::infinity();
      total += x * x / (1.0 - x * x);
    }
    return total;
  };
  dev.rescale_c = detail::bisect_increasing(1.0 / lmax, n_mean, photons);
  for (int i = 0; i < tak.values.size(); ++i)
    dev.squeezing(i) = std::atanh(std::min(dev.rescale_c * tak.values(i), 1.0 - 1e-16));
  return dev;
}

GaussianState vacuum_state(int modes) {
  if (modes < 0) throw validation_error("mode count must be nonnegative");
  GaussianState s;
  s.modes = modes;
  s.sigma = CMatrix::Zero(2 * modes, 2 * modes);
  s.mean = CVector::Zero(2 * modes);
  return s;
}

GaussianState state_from_device(const EncodedDevice& dev) {
  const int m = int(dev.unitary.rows());
  CVector scaled = (dev.rescale_c * dev.takagi_values).cast<Complex>();
  CMatrix b = dev.unitary * scaled.asDiagonal() * dev.unitary.transpose();
  CMatrix qinv(2 * m, 2 * m);
  qinv.topLeftCorner(m, m) = identity(m);
  qinv.topRightCorner(m, m) = -b.conjugate();
  qinv.bottomLeftCorner(m, m) = -b;
  qinv.bottomRightCorner(m, m) = identity(m);

  Eigen::LLT<CMatrix> llt(qinv);
  if (llt.info() != Eigen::Success)
    throw numeric_error("device covariance is not positive definite");
  GaussianState s = vacuum_state(m);
  s.sigma = llt.solve(identity(2 * m)) - identity(2 * m);
  hermitize(s.sigma);
  return s;
}

CMatrix q_matrix(const GaussianState& s) {
  return s.sigma + identity(2 * s.modes);
}

CMatrix a_matrix(const GaussianState& s) {
  const int n = 2 * s.modes;
  Eigen::LLT<CMatrix> llt(q_matrix(s));
  if (llt.info() != Eigen::Success)
    throw numeric_error("Husimi matrix is singular or not positive definite");
  CMatrix inner = identity(n) - llt.solve(identity(n));
  CMatrix a(n, n);
  a.topRows(s.modes) = inner.bottomRows(s.modes);
  a.bottomRows(s.modes) = inner.topRows(s.modes);
  return 0.5 * (a + a.transpose()).eval();
}

double sqrt_det_q(const GaussianState& s) {
  Eigen::LLT<CMatrix> llt(q_matrix(s));
  if (llt.info() != Eigen::Success)
    throw numeric_error("Husimi matrix is singular or not positive definite");
  double root = 1.0;
  for (int i = 0; i < 2 * s.modes; ++i)
    root *= llt.matrixL()(i, i).real();
  if (root < 1.0 - 1e-9)
    throw numeric_error("Husimi determinant below vacuum bound");
  return root;
}

GaussianState apply_loss(const GaussianState& s, double loss) {
  if (!std::isfinite(loss) || loss < 0.0 || loss > 1.0)
    throw validation_error("loss must lie in [0, 1]");
  GaussianState out = s;
  out.sigma *= (1.0 - loss);
  out.mean *= std::sqrt(1.0 - loss);
  return out;
}

GaussianState reduce_state(const GaussianState& s, const std::vector<int>& keep) {
  for (int i : keep)
    if (i < 0 || i >= s.modes) throw validation_error("mode index out of range");
  const int k = int(keep.size());
  GaussianState out = vacuum_state(k);
  for (int r = 0; r < k; ++r) {
    const int sr[2] = {keep[r], keep[r] + s.modes};
    out.mean(r) = s.mean(sr[0]);
    out.mean(r + k) = s.mean(sr[1]);
    for (int c = 0; c < k; ++c) {
      const int sc[2] = {keep[c], keep[c] + s.modes};
      out.sigma(r, c) = s.sigma(sr[0], sc[0]);
      out.sigma(r, c + k) = s.sigma(sr[0], sc[1]);
      out.sigma(r + k, c) = s.sigma(sr[1], sc[0]);
      out.sigma(r + k, c + k) = s.sigma(sr[1], sc[1]);
    }
  }
  return out;
}

double mean_photons(const GaussianState& s) {
  return photon_number_vector(s).sum();
}

Vector photon_number_vector(const GaussianState& s) {
  Vector n(s.modes);
  for (int i = 0; i < s.modes; ++i)
    n(i) = s.sigma(i, i).real() + std::norm(s.mean(i));
  return n;
}

std::optional<CMatrix> pure_block(const GaussianState& s, double tol) {
  const int m = s.modes;
  CMatrix a = a_matrix(s);
  const double off = std::max(a.topRightCorner(m, m).cwiseAbs().maxCoeff(),
                              a.bottomLeftCorner(m, m).cwiseAbs().maxCoeff());
  if (off > tol * std::max(1.0, a.cwiseAbs().maxCoeff())) return std::nullopt;
  return CMatrix(a.topLeftCorner(m, m));
}

void apply_interferometer(GaussianState& s, const CMatrix& u) {
  const int m = s.modes;
  if (u.rows() != m || u.cols() != m)
    throw validation_error("interferometer size must match mode count");
  if ((u.adjoint() * u - identity(m)).cwiseAbs().maxCoeff() > 1e-8)
    throw validation_error("interferometer matrix must be unitary");
  CMatrix w = CMatrix::Zero(2 * m, 2 * m);
  w.topLeftCorner(m, m) = u;
  w.bottomRightCorner(m, m) = u.conjugate();
  apply_bogoliubov(s, w);
}

void apply_squeezing(GaussianState& s, const Vector& r) {
  const int m = s.modes;
  if (r.size() != m) throw validation_error("squeezing vector size must match mode count");
  CMatrix w = CMatrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < m; ++i) {
    w(i, i) = w(i + m, i + m) = std::cosh(r(i));
    w(i, i + m) = w(i + m, i) = std::sinh(r(i));
  }
  apply_bogoliubov(s, w);
}

void apply_two_mode_squeezing(GaussianState& s, const Vector& t) {
  const int m = s.modes;
  if (m % 2 != 0 || t.size() != m / 2)
    throw validation_error("two-mode squeezing needs an even mode count and m/2 parameters");
  const int half = m / 2;
  CMatrix w = CMatrix::Zero(2 * m, 2 * m);
  for (int i = 0; i < half; ++i) {
    const double c = std::cosh(t(i)), sh = std::sinh(t(i));
    w(i, i) = w(i + half, i + half) = c;
    w(i + m, i + m) = w(i + half + m, i + half + m) = c;
    w(i, i + half + m) = w(i + half, i + m) = sh;
    w(i + m, i + half) = w(i + half + m, i) = sh;
  }
  apply_bogoliubov(s, w);
}

void apply_displacement(GaussianState& s, const CVector& alpha) {
  if (alpha.size() != s.modes)
    throw validation_error("displacement size must match mode count");
  s.mean.head(s.modes) += alpha;
  s.mean.tail(s.modes) += alpha.conjugate();
}

CMatrix embed_unitary(const CMatrix& u, int modes, int offset) {
  const int k = int(u.rows());
  if (u.cols() != k) throw validation_error("unitary must be square");
  if (offset < 0 || offset + k > modes)
    throw validation_error("embedded unitary exceeds mode range");
  CMatrix full = identity(modes);
  full.block(offset, offset, k, k) = u;
  return full;
}

}  // namespace gbs
