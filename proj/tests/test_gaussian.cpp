#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "gbs/gaussian.hpp"
#include "gbs/rng.hpp"

using namespace gbs;

namespace {

Matrix random_symmetric(int n, uint64_t seed) {
  RngStream rng = RngStream::derive(seed, 0);
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) m(i, j) = m(j, i) = 2.0 * rng.uniform() - 1.0;
  return m;
}

CMatrix random_unitary(int n, uint64_t seed) {
  RngStream rng = RngStream::derive(seed, 1);
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(rng.normal(), rng.normal());
  return Eigen::HouseholderQR<CMatrix>(m).householderQ();
}

double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TEST_CASE("takagi frozen values") {
  Matrix d(2, 2);
  d << 3, 0, 0, 1;
  TakagiResult t = takagi(d);
  CHECK(t.values(0) == doctest::Approx(3.0));
  CHECK(t.values(1) == doctest::Approx(1.0));
  CHECK(max_abs(t.unitary.cwiseAbs().cast<Complex>() - CMatrix::Identity(2, 2)) < 1e-12);

  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  t = takagi(x);
  CHECK(t.values(0) == doctest::Approx(1.0));
  CHECK(t.values(1) == doctest::Approx(1.0));
  CVector vals = t.values.cast<Complex>();
  CHECK(max_abs(t.unitary * vals.asDiagonal() * t.unitary.transpose() -
                x.cast<Complex>()) < 1e-12);

  // Negative entries force nontrivial column phases.
  Matrix neg(1, 1);
  neg << -2;
  t = takagi(neg);
  CHECK(t.values(0) == doctest::Approx(2.0));
  CHECK(std::abs(t.unitary(0, 0) * t.unitary(0, 0) + Complex(1, 0)) < 1e-12);

  CMatrix imag(1, 1);
  imag << Complex(0, 1);
  TakagiResult tc = takagi(imag);
  CHECK(tc.values(0) == doctest::Approx(1.0));
  CHECK(std::abs(tc.unitary(0, 0) * tc.unitary(0, 0) - Complex(0, 1)) < 1e-12);
}

TEST_CASE("takagi reconstructs random real and complex inputs") {
  for (int n = 1; n <= 12; ++n) {
    Matrix a = random_symmetric(n, 100 + n);
    TakagiResult t = takagi(a);
    for (int i = 0; i + 1 < n; ++i) CHECK(t.values(i) >= t.values(i + 1));
    CHECK(t.values.minCoeff() >= 0.0);
    CHECK(max_abs(t.unitary.adjoint() * t.unitary - CMatrix::Identity(n, n)) < 1e-10);
    CVector vals = t.values.cast<Complex>();
    CHECK(max_abs(t.unitary * vals.asDiagonal() * t.unitary.transpose() -
                  a.cast<Complex>()) < 1e-10);
  }
  for (int n = 1; n <= 10; ++n) {
    CMatrix u = random_unitary(n, 200 + n);
    CMatrix a = u + u.transpose();
    TakagiResult t = takagi(a);
    CHECK(max_abs(t.unitary.adjoint() * t.unitary - CMatrix::Identity(n, n)) < 1e-10);
    CVector vals = t.values.cast<Complex>();
    CHECK(max_abs(t.unitary * vals.asDiagonal() * t.unitary.transpose() - a) < 1e-10);
  }
}

TEST_CASE("takagi handles degenerate and rank-deficient spectra") {
  // Repeated values, real: identity and the two-mode swap have value 1 twice.
  TakagiResult t = takagi(Matrix(Matrix::Identity(4, 4)));
  CHECK(t.values.isApproxToConstant(1.0, 1e-12));
  CVector vals = t.values.cast<Complex>();
  CHECK(max_abs(t.unitary * vals.asDiagonal() * t.unitary.transpose() -
                CMatrix::Identity(4, 4)) < 1e-10);

  // Complex input with a planted degenerate and zero spectrum.
  CMatrix u = random_unitary(4, 300);
  Vector lam(4);
  lam << 2, 2, 1, 0;
  CVector clam = lam.cast<Complex>();
  CMatrix a = u * clam.asDiagonal() * u.transpose();
  t = takagi(a);
  CHECK(t.values(0) == doctest::Approx(2.0));
  CHECK(t.values(1) == doctest::Approx(2.0));
  CHECK(t.values(2) == doctest::Approx(1.0));
  CHECK(t.values(3) == doctest::Approx(0.0));
  CHECK(max_abs(t.unitary.adjoint() * t.unitary - CMatrix::Identity(4, 4)) < 1e-9);
  vals = t.values.cast<Complex>();
  CHECK(max_abs(t.unitary * vals.asDiagonal() * t.unitary.transpose() - a) < 1e-9);

  // Rank-one real outer product: a three-dimensional null space.
  Vector v(4);
  v << 1, -2, 0.5, 3;
  Matrix outer = v * v.transpose();
  t = takagi(outer);
  CHECK(t.values(0) == doctest::Approx(v.squaredNorm()));
  CHECK(t.values.tail(3).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(max_abs(t.unitary.adjoint() * t.unitary - CMatrix::Identity(4, 4)) < 1e-9);

  t = takagi(Matrix(Matrix::Zero(3, 3)));
  CHECK(t.values.cwiseAbs().maxCoeff() == 0.0);
  CHECK(max_abs(t.unitary.adjoint() * t.unitary - CMatrix::Identity(3, 3)) < 1e-9);
}

TEST_CASE("kernel validation") {
  Matrix bad(2, 3);
  bad.setZero();
  CHECK_THROWS_AS(AdjacencyKernel{bad}, validation_error);
  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(AdjacencyKernel{asym}, validation_error);
  Matrix nan(1, 1);
  nan << std::nan("");
  CHECK_THROWS_AS(AdjacencyKernel{nan}, validation_error);
}

TEST_CASE("encode frozen rescale values") {
  // Single mode, unit kernel: c^2 / (1 - c^2) = 1/3 gives c = 1/2.
  Matrix one(1, 1);
  one << 1;
  EncodedDevice dev = encode(AdjacencyKernel(one), 1.0 / 3.0);
  CHECK(dev.rescale_c == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(dev.squeezing(0) == doctest::Approx(std::atanh(0.5)).epsilon(1e-9));

  // Two-mode swap kernel: both Takagi values are 1, each mode carries 1/3.
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  dev = encode(AdjacencyKernel(swap), 2.0 / 3.0);
  CHECK(dev.rescale_c == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(dev.takagi_values(0) == doctest::Approx(1.0));
  CHECK(dev.takagi_values(1) == doctest::Approx(1.0));
}

TEST_CASE("encode reaches the requested mean photon number") {
  for (int n : {2, 4, 7}) {
    Matrix a = random_symmetric(n, 400 + n);
    for (double target : {0.5, 2.0, 7.0}) {
      EncodedDevice dev = encode(AdjacencyKernel(a), target);
      CHECK(dev.rescale_c * dev.takagi_values(0) < 1.0);
      double total = 0;
      for (int i = 0; i < n; ++i) {
        const double x = dev.rescale_c * dev.takagi_values(i);
        total += x * x / (1.0 - x * x);
      }
      CHECK(total == doctest::Approx(target).epsilon(1e-9));
      GaussianState s = state_from_device(dev);
      CHECK(mean_photons(s) == doctest::Approx(target).epsilon(1e-7));
    }
  }
}

TEST_CASE("encode is scale invariant in the kernel") {
  Matrix a = random_symmetric(5, 500);
  EncodedDevice d1 = encode(AdjacencyKernel(a), 3.0);
  EncodedDevice d2 = encode(AdjacencyKernel(Matrix(4.0 * a)), 3.0);
  CHECK(d2.rescale_c == doctest::Approx(d1.rescale_c / 4.0).epsilon(1e-9));
  for (int i = 0; i < 5; ++i)
    CHECK(d2.squeezing(i) == doctest::Approx(d1.squeezing(i)).epsilon(1e-9));
  GaussianState s1 = state_from_device(d1), s2 = state_from_device(d2);
  CHECK(max_abs(s1.sigma - s2.sigma) < 1e-9);
}

TEST_CASE("encode edge cases") {
  Matrix one(1, 1);
  one << 1;
  EncodedDevice dev = encode(AdjacencyKernel(one), 0.0);
  CHECK(dev.rescale_c == 0.0);
  CHECK(mean_photons(state_from_device(dev)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(encode(AdjacencyKernel(one), -1.0), validation_error);
  CHECK_THROWS_AS(encode(AdjacencyKernel(Matrix::Zero(3, 3)), 1.0), validation_error);
}

TEST_CASE("single squeezed mode moments") {
  Matrix one(1, 1);
  one << 1;
  EncodedDevice dev = encode(AdjacencyKernel(one), 1.0 / 3.0);
  const double r = dev.squeezing(0);
  GaussianState s = state_from_device(dev);
  CHECK(s.sigma(0, 0).real() == doctest::Approx(std::sinh(r) * std::sinh(r)));
  CHECK(s.sigma(0, 1).real() == doctest::Approx(std::cosh(r) * std::sinh(r)));
  CHECK(sqrt_det_q(s) == doctest::Approx(std::cosh(r)));
  CHECK(mean_photons(s) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("device state equals squeezers followed by an interferometer") {
  Matrix a = random_symmetric(4, 600);
  EncodedDevice dev = encode(AdjacencyKernel(a), 2.0);
  GaussianState direct = state_from_device(dev);

  GaussianState built = vacuum_state(4);
  apply_squeezing(built, dev.squeezing);
  // With annihilation operators mixing as a -> u a, the transfer matrix
  // conj(U) produces the pair matrix U diag(c l) U^T of the device.
  apply_interferometer(built, dev.unitary.conjugate());
  CHECK(max_abs(direct.sigma - built.sigma) < 1e-9);
}

TEST_CASE("a_matrix of a device state doubles the rescaled kernel") {
  Matrix a = random_symmetric(5, 700);
  EncodedDevice dev = encode(AdjacencyKernel(a), 1.5);
  GaussianState s = state_from_device(dev);
  CMatrix am = a_matrix(s);
  CMatrix want = dev.rescale_c * a.cast<Complex>();
  CHECK(max_abs(am.topLeftCorner(5, 5) - want) < 1e-9);
  CHECK(max_abs(am.bottomRightCorner(5, 5) - want.conjugate()) < 1e-9);
  CHECK(max_abs(am.topRightCorner(5, 5)) < 1e-10);
  auto block = pure_block(s);
  REQUIRE(block.has_value());
  CHECK(max_abs(*block - want) < 1e-9);
}

TEST_CASE("vacuum state basics") {
  GaussianState v = vacuum_state(3);
  CHECK(sqrt_det_q(v) == doctest::Approx(1.0));
  CHECK(mean_photons(v) == doctest::Approx(0.0));
  CHECK(max_abs(a_matrix(v)) < 1e-12);
}

TEST_CASE("loss scales photon numbers") {
  Matrix a = random_symmetric(3, 800);
  GaussianState s = state_from_device(encode(AdjacencyKernel(a), 6.0));
  GaussianState lossy = apply_loss(s, 0.1);
  CHECK(mean_photons(lossy) == doctest::Approx(5.4).epsilon(1e-7));

  GaussianState twice = apply_loss(apply_loss(s, 0.2), 0.25);
  GaussianState once = apply_loss(s, 1.0 - 0.8 * 0.75);
  CHECK(max_abs(twice.sigma - once.sigma) < 1e-12);

  GaussianState dead = apply_loss(s, 1.0);
  CHECK(max_abs(dead.sigma) < 1e-12);
  CHECK_THROWS_AS(apply_loss(s, -0.1), validation_error);
  CHECK_THROWS_AS(apply_loss(s, 1.5), validation_error);
}

TEST_CASE("reduce_state extracts consistent marginals") {
  Matrix a = random_symmetric(4, 900);
  GaussianState s = state_from_device(encode(AdjacencyKernel(a), 3.0));
  GaussianState sub = reduce_state(s, {1, 3});
  Vector full = photon_number_vector(s), part = photon_number_vector(sub);
  CHECK(part(0) == doctest::Approx(full(1)));
  CHECK(part(1) == doctest::Approx(full(3)));
  CHECK(sub.sigma(0, 1) == s.sigma(1, 3));
  CHECK(sub.sigma(0, 3) == s.sigma(1, 3 + 4));

  // One arm of a two-mode squeezed pair is thermal: diagonal covariance.
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  GaussianState pair = state_from_device(encode(AdjacencyKernel(swap), 2.0));
  GaussianState arm = reduce_state(pair, {0});
  CHECK(std::abs(arm.sigma(0, 1)) < 1e-10);
  CHECK(arm.sigma(0, 0).real() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(reduce_state(pair, {2}), validation_error);
}

TEST_CASE("two-mode squeezing matches the encoded pair kernel") {
  Matrix swap(2, 2);
  swap << 0, 1, 1, 0;
  EncodedDevice dev = encode(AdjacencyKernel(swap), 2.0 / 3.0);
  GaussianState direct = state_from_device(dev);

  GaussianState built = vacuum_state(2);
  Vector t(1);
  t << std::atanh(dev.rescale_c);
  apply_two_mode_squeezing(built, t);
  CHECK(max_abs(direct.sigma - built.sigma) < 1e-10);
}

TEST_CASE("displacement moves the mean") {
  GaussianState s = vacuum_state(2);
  CVector alpha(2);
  alpha << Complex(0.5, -0.25), Complex(-1, 2);
  apply_displacement(s, alpha);
  CHECK(s.mean(0) == alpha(0));
  CHECK(s.mean(2) == std::conj(alpha(0)));
  CHECK(mean_photons(s) == doctest::Approx(alpha.squaredNorm()));

  CMatrix u = random_unitary(2, 1000);
  apply_interferometer(s, u);
  CVector want = u * alpha;
  CHECK(max_abs(s.mean.head(2) - want) < 1e-12);
  CHECK(max_abs(s.mean.tail(2) - want.conjugate()) < 1e-12);
  CHECK(mean_photons(s) == doctest::Approx(alpha.squaredNorm()).epsilon(1e-9));
}

TEST_CASE("embed_unitary places a block") {
  CMatrix u = random_unitary(2, 1100);
  CMatrix full = embed_unitary(u, 4, 1);
  CHECK(full(0, 0) == Complex(1, 0));
  CHECK(full(3, 3) == Complex(1, 0));
  CHECK(full(1, 1) == u(0, 0));
  CHECK(full(2, 1) == u(1, 0));
  CHECK(max_abs(full.adjoint() * full - CMatrix::Identity(4, 4)) < 1e-12);
  CHECK_THROWS_AS(embed_unitary(u, 2, 1), validation_error);
}

TEST_CASE("interferometer input validation") {
  GaussianState s = vacuum_state(2);
  CMatrix not_unitary = CMatrix::Identity(2, 2) * 2.0;
  CHECK_THROWS_AS(apply_interferometer(s, not_unitary), validation_error);
  Vector r(1);
  r << 0.3;
  CHECK_THROWS_AS(apply_squeezing(s, r), validation_error);
  GaussianState odd = vacuum_state(3);
  Vector t(1);
  t << 0.2;
  CHECK_THROWS_AS(apply_two_mode_squeezing(odd, t), validation_error);
}
