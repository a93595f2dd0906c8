#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "gbs/points.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "gbs/matfuncs.hpp"
#include "gbs/rng.hpp"

using namespace gbs;

namespace {

// Ryser's formula; exact reference for small reductions.
double permanent(const Matrix& a) {
  const int n = int(a.rows());
  if (n == 0) return 1.0;
  double total = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double prod = 1;
    for (int i = 0; i < n; ++i) {
      double row = 0;
      for (int j = 0; j < n; ++j)
        if (mask & (1u << j)) row += a(i, j);
      prod *= row;
    }
    total += __builtin_popcount(mask) % 2 == n % 2 ? prod : -prod;
  }
  return total;
}

Matrix reduce(const Matrix& a, const std::vector<int>& s) {
  std::vector<int> idx;
  for (size_t i = 0; i < s.size(); ++i)
    for (int r = 0; r < s[i]; ++r) idx.push_back(int(i));
  Matrix out(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i)
    for (size_t j = 0; j < idx.size(); ++j)
      out(int(i), int(j)) = a(idx[i], idx[j]);
  return out;
}

// Reference calibration: mean total photons as a function of c is monotone.
double solve_c(const Vector& mu, double n_mean) {
  const double mu_max = mu.maxCoeff();
  double lo = 0, hi = (1 - 1e-14) / mu_max;
  for (int it = 0; it < 500; ++it) {
    const double mid = 0.5 * (lo + hi);
    double total = 0;
    for (int i = 0; i < mu.size(); ++i)
      total += mid * mu(i) / (1 - mid * mu(i));
    (total < n_mean ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double factorial_of(int n) {
  double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double mean_pairwise_distance(const StateSpace& space,
                              const std::vector<int>& nodes) {
  double total = 0;
  int pairs = 0;
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      total += (space.coords.row(nodes[i]) - space.coords.row(nodes[j])).norm();
      ++pairs;
    }
  return total / pairs;
}

std::vector<int> uniform_subset(int m, int k, RngStream& rng) {
  std::vector<int> pool(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) pool[size_t(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + int(rng.below(std::uint64_t(m - i)));
    std::swap(pool[size_t(i)], pool[size_t(j)]);
  }
  pool.resize(size_t(k));
  return pool;
}

// Sampled points cluster: mean pairwise distance of the selected points sits
// below that of uniform same-size subsets (paired one-sided z test).
void check_clustering(const StateSpace& space, const SampleBatch& batch,
                      std::uint64_t seed) {
  std::vector<double> diffs;
  RngStream rng(seed);
  for (const PhotonPattern& p : batch.samples) {
    std::vector<int> chosen;
    for (int i = 0; i < p.modes(); ++i)
      if (p.counts[size_t(i)] > 0) chosen.push_back(i);
    if (chosen.size() < 2) continue;
    std::vector<int> ref = uniform_subset(space.points(), int(chosen.size()), rng);
    diffs.push_back(mean_pairwise_distance(space, chosen) -
                    mean_pairwise_distance(space, ref));
  }
  REQUIRE(diffs.size() > 50);
  double mean = 0;
  for (double d : diffs) mean += d;
  mean /= double(diffs.size());
  double var = 0;
  for (double d : diffs) var += (d - mean) * (d - mean);
  var /= double(diffs.size() - 1);
  const double z = mean / std::sqrt(var / double(diffs.size()));
  CHECK(z < -2.326);  // one-sided at the 1% level
}

StateSpace two_cluster_space(int per_cluster, std::uint64_t seed) {
  RngStream rng(seed);
  Matrix coords(2 * per_cluster, 2);
  for (int i = 0; i < 2 * per_cluster; ++i) {
    const double cx = i < per_cluster ? -2.0 : 2.0;
    coords(i, 0) = cx + 0.5 * rng.normal();
    coords(i, 1) = 0.0 + 0.5 * rng.normal();
  }
  return StateSpace(std::move(coords));
}

}  // namespace

TEST_CASE("state space and kernel validation") {
  CHECK_THROWS_AS(StateSpace(Matrix(0, 2)), validation_error);
  Matrix bad(1, 2);
  bad << 1.0, std::nan("");
  CHECK_THROWS_AS(StateSpace(std::move(bad)), validation_error);

  Matrix asym(2, 2);
  asym << 1, 0.5, 0.2, 1;
  CHECK_THROWS_AS(KernelMatrix(std::move(asym)), validation_error);

  Matrix offdiag(2, 2);
  offdiag << 0.9, 0.5, 0.5, 1.0;
  CHECK_THROWS_AS(KernelMatrix(std::move(offdiag), KernelKind::rbf),
                  validation_error);
}

TEST_CASE("rbf kernel follows the gaussian falloff") {
  Matrix coords(3, 2);
  const double sigma = 0.7;
  coords << 0, 0, sigma * std::sqrt(2.0), 0, 0, 0;
  StateSpace space(std::move(coords));
  KernelMatrix k = rbf_kernel(space, sigma);
  CHECK(k.kind == KernelKind::rbf);
  for (int i = 0; i < 3; ++i) CHECK(k.entries(i, i) == 1.0);
  CHECK(k.entries(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(k.entries(0, 2) == 1.0);  // coincident points
  CHECK(k.entries(1, 2) == k.entries(0, 1));

  CHECK_THROWS_AS(rbf_kernel(space, 0.0), validation_error);
  CHECK_THROWS_AS(rbf_kernel(space, -1.0), validation_error);
}

TEST_CASE("rescaled kernel weights rows and columns") {
  RngStream rng(3);
  Matrix coords(4, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) coords(i, j) = rng.normal();
  StateSpace space(std::move(coords));

  KernelMatrix plain = rbf_kernel(space, 1.0);
  KernelMatrix same = rescaled_kernel(space, 1.0, Vector::Ones(4));
  CHECK((same.entries - plain.entries).cwiseAbs().maxCoeff() == 0.0);

  Vector w(4);
  w << 1.0, 0.0, 2.0, 0.5;
  KernelMatrix scaled = rescaled_kernel(space, 1.0, w);
  CHECK(scaled.entries.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK(scaled.entries.col(1).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(scaled.entries(i, j) ==
            doctest::Approx(w(i) * w(j) * plain.entries(i, j)).epsilon(1e-14));

  CHECK_THROWS_AS(rescaled_kernel(space, 1.0, Vector::Ones(3)),
                  validation_error);
  Vector neg(4);
  neg << 1, 1, -0.1, 1;
  CHECK_THROWS_AS(rescaled_kernel(space, 1.0, neg), validation_error);
}

TEST_CASE("doubling a weight quadruples single-occupancy pattern weights") {
  RngStream rng(11);
  Matrix coords(3, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2; ++j) coords(i, j) = rng.normal();
  StateSpace space(std::move(coords));

  Vector w = Vector::Ones(3), w2 = Vector::Ones(3);
  w2(1) = 2.0;
  const double c = 0.3;  // pattern weights compared at fixed c
  Matrix base = c * rescaled_kernel(space, 1.0, w).entries;
  Matrix boosted = c * rescaled_kernel(space, 1.0, w2).entries;

  auto weight = [](const Matrix& k, const std::vector<int>& s) {
    double fact = 1;
    for (int v : s) fact *= factorial_of(v);
    const double h = hafnian(reduce(k, s));
    return h * h / fact;
  };
  for (const std::vector<int>& s :
       {std::vector<int>{1, 1, 0}, {0, 1, 1}, {1, 1, 2}}) {
    CHECK(weight(boosted, s) ==
          doctest::Approx(4.0 * weight(base, s)).epsilon(1e-12));
  }
  // Double occupancy of the boosted point scales by sixteen instead.
  CHECK(weight(boosted, {0, 2, 0}) ==
        doctest::Approx(16.0 * weight(base, {0, 2, 0})).epsilon(1e-12));
}

TEST_CASE("permanental sampler input validation") {
  KernelMatrix identity(Matrix::Identity(3, 3));
  CHECK_THROWS_AS(permanental_sample(identity, -1.0, 10, 1), validation_error);
  CHECK_THROWS_AS(permanental_sample(identity, 1.0, -1, 1), validation_error);
  CHECK_THROWS_AS(permanental_sample(KernelMatrix(Matrix::Zero(3, 3)), 1.0, 10, 1),
                  validation_error);

  Matrix indefinite(2, 2);
  indefinite << 0, 1, 1, 0;
  CHECK_THROWS_AS(permanental_sample(KernelMatrix(std::move(indefinite)), 1.0, 10, 1),
                  validation_error);
}

TEST_CASE("zero target intensity yields empty patterns") {
  KernelMatrix k(Matrix::Identity(4, 4));
  SampleBatch batch = permanental_sample(k, 0.0, 50, 9);
  CHECK(batch.modes == 4);
  REQUIRE(batch.samples.size() == 50);
  for (const PhotonPattern& p : batch.samples) CHECK(p.total() == 0);
}

TEST_CASE("identity kernel gives independent geometric modes") {
  // With K = I each mode is a thermal mode of mean c/(1-c).
  const int m = 4;
  const double c = 0.4;
  const double n_mean = m * c / (1 - c);
  SampleBatch batch =
      permanental_sample(KernelMatrix(Matrix::Identity(m, m)), n_mean, 25000, 41);

  std::vector<long> observed(11, 0);
  long total = 0;
  for (const PhotonPattern& p : batch.samples)
    for (int v : p.counts) {
      ++observed[size_t(std::min(v, 10))];
      ++total;
    }
  REQUIRE(total == 100000);
  double chi2 = 0;
  for (int s = 0; s <= 10; ++s) {
    double prob = (1 - c) * std::pow(c, s);
    if (s == 10) prob = std::pow(c, 10);  // tail bin
    const double expect = double(total) * prob;
    chi2 += (observed[size_t(s)] - expect) * (observed[size_t(s)] - expect) / expect;
  }
  CHECK(chi2 < 23.21);  // 1% point of chi-squared with ten degrees of freedom
}

TEST_CASE("three-mode samples follow the permanental law") {
  Matrix coords(3, 2);
  coords << 0, 0, 1.1, 0.2, 0.3, 0.9;
  StateSpace space(std::move(coords));
  KernelMatrix k = rbf_kernel(space, 1.0);
  const double n_mean = 2.0;

  const int draws = 100000;
  SampleBatch batch = permanental_sample(k, n_mean, draws, 77);
  std::map<std::vector<int>, long> freq;
  for (const PhotonPattern& p : batch.samples) ++freq[p.counts];

  // Exact law via an independent eigendecomposition and Ryser permanents.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(k.entries);
  const Vector mu = eig.eigenvalues().cwiseMax(0.0);
  const double c = solve_c(mu, n_mean);
  double prefactor = 1;
  for (int i = 0; i < 3; ++i) prefactor *= 1 - c * mu(i);
  const Matrix ck = c * k.entries;

  double tv = 0, exact_mass = 0, emp_mass = 0;
  for (int s0 = 0; s0 <= 6; ++s0)
    for (int s1 = 0; s1 + s0 <= 6; ++s1)
      for (int s2 = 0; s2 + s1 + s0 <= 6; ++s2) {
        const std::vector<int> s = {s0, s1, s2};
        const double exact =
            prefactor * permanent(reduce(ck, s)) /
            (factorial_of(s0) * factorial_of(s1) * factorial_of(s2));
        const auto it = freq.find(s);
        const double emp = it == freq.end() ? 0.0 : double(it->second) / draws;
        tv += std::abs(emp - exact);
        exact_mass += exact;
        emp_mass += emp;
      }
  tv += std::abs((1 - emp_mass) - (1 - exact_mass));
  CHECK(0.5 * tv < 0.05);
  CHECK(exact_mass > 0.9);  // the cutoff captures the bulk of the law
}

TEST_CASE("empirical intensity matches the requested mean") {
  RngStream rng(19);
  Matrix root(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) root(i, j) = rng.normal();
  Matrix psd = root * root.transpose();
  psd /= psd.norm();
  KernelMatrix k{(psd + psd.transpose()) / 2};

  const double n_mean = 5.0;
  SampleBatch batch = permanental_sample(k, n_mean, 100000, 23);
  double mean = 0;
  for (const PhotonPattern& p : batch.samples) mean += p.total();
  mean /= double(batch.samples.size());
  CHECK(std::abs(mean - n_mean) / n_mean < 0.02);
}

TEST_CASE("permanental sampling is deterministic and thread invariant") {
  KernelMatrix k(Matrix::Identity(5, 5));
  SampleBatch a = permanental_sample(k, 3.0, 200, 55, 1);
  SampleBatch b = permanental_sample(k, 3.0, 200, 55, 4);
  REQUIRE(a.samples.size() == b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i)
    CHECK(a.samples[i].counts == b.samples[i].counts);
}

TEST_CASE("conditioned sampling fixes the number of points") {
  Matrix coords(5, 1);
  coords << 0, 1, 2, 3, 4;
  KernelMatrix k = rbf_kernel(StateSpace(std::move(coords)), 1.5);

  SampleBatch batch = permanental_sample_conditioned(k, 2.0, 2, 300, 13);
  REQUIRE(batch.samples.size() == 300);
  for (const PhotonPattern& p : batch.samples) CHECK(p.total() == 2);

  SampleBatch again = permanental_sample_conditioned(k, 2.0, 2, 300, 13, 1000, 3);
  for (size_t i = 0; i < 300; ++i)
    CHECK(batch.samples[i].counts == again.samples[i].counts);

  CHECK_THROWS_AS(permanental_sample_conditioned(k, 0.05, 12, 5, 13, 4),
                  resource_error);
  CHECK_THROWS_AS(permanental_sample_conditioned(k, 2.0, 2, 10, 13, 0),
                  validation_error);
}

TEST_CASE("hafnian point process delegates to the device sampler") {
  Matrix coords(3, 2);
  coords << 0, 0, 0.8, 0, 0.4, 0.6;
  StateSpace space(std::move(coords));
  KernelMatrix k = rbf_kernel(space, 1.0);

  SampleBatch batch = hafnian_sample(k, 2.0, 800, 71);
  CHECK(batch.modes == 3);
  CHECK_FALSE(batch.threshold);
  double mean = 0;
  for (const PhotonPattern& p : batch.samples) mean += p.total();
  mean /= double(batch.samples.size());
  CHECK(mean == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("a zero-weight point is never sampled") {
  Matrix coords(4, 1);
  coords << 0, 0.5, 1.0, 1.5;
  StateSpace space(std::move(coords));
  Vector w(4);
  w << 1, 0, 1, 1;
  KernelMatrix k = rescaled_kernel(space, 1.0, w);

  for (const PhotonPattern& p : permanental_sample(k, 2.0, 2000, 3).samples)
    CHECK(p.counts[1] == 0);
  for (const PhotonPattern& p : hafnian_sample(k, 2.0, 150, 3).samples)
    CHECK(p.counts[1] == 0);
}

TEST_CASE("permanental samples cluster on a homogeneous grid") {
  Matrix coords(36, 2);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      coords(6 * i + j, 0) = i;
      coords(6 * i + j, 1) = j;
    }
  StateSpace space(std::move(coords));
  KernelMatrix k = rbf_kernel(space, 1.0);
  SampleBatch batch = permanental_sample(k, 6.0, 400, 101);
  check_clustering(space, batch, 900);
}

TEST_CASE("permanental samples concentrate inside clusters") {
  StateSpace space = two_cluster_space(30, 5);
  KernelMatrix k = rbf_kernel(space, 1.0);
  SampleBatch batch = permanental_sample(k, 6.0, 400, 103);
  check_clustering(space, batch, 901);
}

TEST_CASE("hafnian samples favor cluster centers") {
  StateSpace space = two_cluster_space(6, 5);
  KernelMatrix k = rbf_kernel(space, 0.8);
  SampleBatch batch = hafnian_sample(k, 2.5, 150, 107);

  const auto near_center = [&](int i) {
    const double x = space.coords(i, 0), y = space.coords(i, 1);
    const double dl = std::hypot(x + 2.0, y), dr = std::hypot(x - 2.0, y);
    return std::min(dl, dr) <= 0.5;  // one cluster standard deviation
  };
  int base_near = 0;
  for (int i = 0; i < 12; ++i) base_near += near_center(i);
  long sampled = 0, sampled_near = 0;
  for (const PhotonPattern& p : batch.samples)
    for (int i = 0; i < 12; ++i) {
      sampled += p.counts[size_t(i)];
      if (p.counts[size_t(i)] > 0 && near_center(i))
        sampled_near += p.counts[size_t(i)];
    }
  REQUIRE(sampled > 100);
  CHECK(double(sampled_near) / double(sampled) > double(base_near) / 12.0);
  check_clustering(space, batch, 902);
}

TEST_CASE("per-sample cost scales quadratically after cubic setup") {
  const auto make = [](int m) {
    RngStream rng(static_cast<std::uint64_t>(m));
    Matrix coords(m, 2);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < 2; ++j) coords(i, j) = 3.0 * rng.normal();
    return rbf_kernel(StateSpace(std::move(coords)), 1.0);
  };
  const auto timed = [](const KernelMatrix& k, int n_samples) {
    double best = 1e30;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      permanental_sample(k, 6.0, n_samples, 7);
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      best = std::min(best, dt);
    }
    return best;
  };
  KernelMatrix small = make(100), large = make(200);
  const double setup_small = timed(small, 0), setup_large = timed(large, 0);
  const double per_small = (timed(small, 4000) - setup_small) / 4000;
  const double per_large = (timed(large, 4000) - setup_large) / 4000;
  CHECK(setup_large / setup_small <= 10.0);
  CHECK(per_large / per_small <= 6.0);
}
