#include "gbs/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "gbs/parallel.hpp"
#include "gbs/rng.hpp"

namespace gbs {

namespace {

BigCount checked_add(BigCount a, BigCount b) {
  const BigCount sum = a + b;
  if (sum < a)
    throw resource_error("event cardinality overflows 128-bit arithmetic");
  return sum;
}

// counts[j][r]: patterns over j modes with total r and per-mode cap n_max.
std::vector<std::vector<BigCount>> count_table(int modes, int k, int n_max) {
  std::vector<std::vector<BigCount>> counts(
      size_t(modes) + 1, std::vector<BigCount>(size_t(k) + 1, 0));
  counts[0][0] = 1;
  for (int j = 1; j <= modes; ++j)
    for (int r = 0; r <= k; ++r) {
      BigCount total = 0;
      for (int c = 0; c <= std::min(n_max, r); ++c)
        total = checked_add(total, counts[size_t(j) - 1][size_t(r - c)]);
      counts[size_t(j)][size_t(r)] = total;
    }
  return counts;
}

BigCount below128(RngStream& rng, BigCount n) {
  if (n <= 1) return 0;
  // Largest multiple of n representable in 128 bits; BigCount(0) - n wraps
  // to 2^128 - n, whose remainder mod n equals 2^128 mod n.
  const BigCount limit = BigCount(0) - (BigCount(0) - n) % n;
  BigCount draw;
  do {
    draw = (BigCount(rng.next_u64()) << 64) | rng.next_u64();
  } while (limit != 0 && draw >= limit);
  return draw % n;
}

// Draws one member of the event uniformly using the counting table.
PhotonPattern draw_event_member(
    const std::vector<std::vector<BigCount>>& counts, int modes, int k,
    int n_max, RngStream& rng) {
  std::vector<int> pattern(size_t(modes), 0);
  int remaining = k;
  for (int mode = 0; mode < modes; ++mode) {
    const int left = modes - mode - 1;
    BigCount pick = below128(rng, counts[size_t(left) + 1][size_t(remaining)]);
    for (int c = 0; c <= std::min(n_max, remaining); ++c) {
      const BigCount ways = counts[size_t(left)][size_t(remaining - c)];
      if (pick < ways) {
        pattern[size_t(mode)] = c;
        remaining -= c;
        break;
      }
      pick -= ways;
    }
  }
  return PhotonPattern(std::move(pattern));
}

// Uniform pattern in the orbit: a random injection of parts into modes
// overcounts every pattern by the same multiplicity factor, so the induced
// distribution over patterns stays uniform.
PhotonPattern place_orbit(const Orbit& o, int modes, RngStream& rng) {
  std::vector<int> position(static_cast<size_t>(modes));
  for (int i = 0; i < modes; ++i) position[size_t(i)] = i;
  std::vector<int> counts(size_t(modes), 0);
  for (size_t i = 0; i < o.parts.size(); ++i) {
    const size_t j = i + size_t(rng.below(std::uint64_t(modes) - i));
    std::swap(position[i], position[j]);
    counts[size_t(position[i])] = o.parts[i];
  }
  return PhotonPattern(std::move(counts));
}

GaussianState encoded_state(const AdjacencyKernel& a, double n_mean) {
  return state_from_device(encode(a, n_mean));
}

constexpr BigCount kEnumerationGuard = 10000000;

}  // namespace

std::string count_to_string(BigCount value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.push_back(char('0' + int(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Orbit::Orbit(std::vector<int> p) : parts(std::move(p)) {
  for (size_t i = 0; i < parts.size(); ++i) {
    if (parts[i] <= 0)
      throw validation_error("orbit: parts must be positive");
    if (i > 0 && parts[i] > parts[i - 1])
      throw validation_error("orbit: parts must be non-increasing");
  }
}

Event::Event(int k_, int n_max_, int modes_) : k(k_), n_max(n_max_), modes(modes_) {
  if (k < 0) throw validation_error("event: negative photon total");
  if (n_max < 1) throw validation_error("event: n_max must be at least 1");
  if (modes < 1) throw validation_error("event: need at least one mode");
}

Orbit sample_to_orbit(const PhotonPattern& s) {
  std::vector<int> parts;
  for (int c : s.counts)
    if (c > 0) parts.push_back(c);
  std::sort(parts.begin(), parts.end(), std::greater<int>());
  return Orbit(std::move(parts));
}

bool in_event(const PhotonPattern& s, const Event& e) {
  if (s.modes() != e.modes)
    throw validation_error("in_event: pattern has the wrong mode count");
  if (s.total() != e.k) return false;
  for (int c : s.counts)
    if (c > e.n_max) return false;
  return true;
}

bool in_orbit(const PhotonPattern& s, const Orbit& o, int modes) {
  if (s.modes() != modes)
    throw validation_error("in_orbit: pattern has the wrong mode count");
  return sample_to_orbit(s) == o;
}

BigCount event_cardinality(const Event& e) {
  return count_table(e.modes, e.k, e.n_max)[size_t(e.modes)][size_t(e.k)];
}

PhotonPattern event_member(const Event& e, std::uint64_t seed) {
  auto counts = count_table(e.modes, e.k, e.n_max);
  if (counts[size_t(e.modes)][size_t(e.k)] == 0)
    throw validation_error("event_member: the event has no members");
  RngStream rng(seed);
  return draw_event_member(counts, e.modes, e.k, e.n_max, rng);
}

PhotonPattern orbit_member(const Orbit& o, int modes, std::uint64_t seed) {
  if (int(o.parts.size()) > modes)
    throw validation_error("orbit_member: more parts than modes");
  RngStream rng(seed);
  return place_orbit(o, modes, rng);
}

BigCount orbit_cardinality(const Orbit& o, int modes) {
  if (modes < 1) throw validation_error("orbit_cardinality: need modes >= 1");
  if (int(o.parts.size()) > modes) return 0;
  // Place each run of equal parts in turn: the arrangement count is the
  // product of binomials C(free, run) over runs, each exact incrementally.
  BigCount value = 1;
  int free = modes;
  size_t i = 0;
  while (i < o.parts.size()) {
    size_t j = i;
    while (j < o.parts.size() && o.parts[j] == o.parts[i]) ++j;
    const int run = int(j - i);
    for (int t = 1; t <= run; ++t) {
      const BigCount before = value;
      value *= BigCount(free - run + t);
      if (value / BigCount(free - run + t) != before)
        throw resource_error("orbit cardinality overflows 128-bit arithmetic");
      value /= BigCount(t);
    }
    free -= run;
    i = j;
  }
  return value;
}

FeatureVector feature_vector_sampling(const SampleBatch& batch,
                                      const std::vector<int>& ks, int n_max) {
  if (batch.samples.empty())
    throw validation_error("feature_vector_sampling: empty batch");
  FeatureVector fv;
  for (int k : ks) fv.events.emplace_back(k, n_max, batch.modes);
  fv.values.assign(fv.events.size(), 0.0);
  fv.n_samples = int(batch.samples.size());
  for (const PhotonPattern& s : batch.samples)
    for (size_t i = 0; i < fv.events.size(); ++i)
      if (in_event(s, fv.events[i])) fv.values[i] += 1.0;
  for (double& v : fv.values) v /= double(fv.n_samples);
  return fv;
}

double event_probability_exact(const AdjacencyKernel& a, double n_mean,
                               const Event& e) {
  if (e.modes != a.modes())
    throw validation_error("event_probability_exact: mode count mismatch");
  if (event_cardinality(e) > kEnumerationGuard)
    throw resource_error("event_probability_exact: event too large to enumerate");
  GaussianState s = encoded_state(a, n_mean);
  double total = 0;
  std::vector<int> counts(size_t(e.modes), 0);
  std::function<void(int, int)> walk = [&](int mode, int remaining) {
    if (mode == e.modes) {
      if (remaining == 0) total += probability(s, PhotonPattern(counts));
      return;
    }
    const int left = e.modes - mode - 1;
    for (int c = 0; c <= std::min(e.n_max, remaining); ++c) {
      if (remaining - c > left * e.n_max) continue;
      counts[size_t(mode)] = c;
      walk(mode + 1, remaining - c);
    }
    counts[size_t(mode)] = 0;
  };
  walk(0, e.k);
  return total;
}

double orbit_probability_exact(const AdjacencyKernel& a, double n_mean,
                               const Orbit& o, int modes) {
  if (modes != a.modes())
    throw validation_error("orbit_probability_exact: mode count mismatch");
  if (orbit_cardinality(o, modes) > kEnumerationGuard)
    throw resource_error("orbit_probability_exact: orbit too large to enumerate");
  if (int(o.parts.size()) > modes) return 0.0;
  GaussianState s = encoded_state(a, n_mean);
  // Ascending padded parts; next_permutation walks each distinct pattern once.
  std::vector<int> counts(size_t(modes), 0);
  std::copy(o.parts.rbegin(), o.parts.rend(),
            counts.begin() + (modes - int(o.parts.size())));
  double total = 0;
  do {
    total += probability(s, PhotonPattern(counts));
  } while (std::next_permutation(counts.begin(), counts.end()));
  return total;
}

FeatureVector feature_vector_mc(const AdjacencyKernel& a, double n_mean,
                                const std::vector<int>& ks, int n_max,
                                int n_mc, std::uint64_t seed, int threads) {
  if (n_mc < 1) throw validation_error("feature_vector_mc: need n_mc >= 1");
  FeatureVector fv;
  for (int k : ks) fv.events.emplace_back(k, n_max, a.modes());
  fv.values.assign(fv.events.size(), 0.0);
  fv.n_samples = n_mc;
  GaussianState s = encoded_state(a, n_mean);
  for (size_t ei = 0; ei < fv.events.size(); ++ei) {
    const Event& e = fv.events[ei];
    auto counts = count_table(e.modes, e.k, e.n_max);
    const BigCount members = counts[size_t(e.modes)][size_t(e.k)];
    if (members == 0) continue;
    std::vector<double> draws(size_t(n_mc), 0.0);
    parallel_for(n_mc, threads, [&](int d) {
      RngStream rng = RngStream::derive(seed, ei, std::uint64_t(d));
      PhotonPattern member =
          draw_event_member(counts, e.modes, e.k, e.n_max, rng);
      draws[size_t(d)] = probability(s, member);
    });
    double mean = 0;
    for (double v : draws) mean += v;
    mean /= double(n_mc);
    fv.values[ei] = mean * double(members);
  }
  return fv;
}

double orbit_probability_mc(const AdjacencyKernel& a, double n_mean,
                            const Orbit& o, int modes, int n_mc,
                            std::uint64_t seed, int threads) {
  if (n_mc < 1) throw validation_error("orbit_probability_mc: need n_mc >= 1");
  if (modes != a.modes())
    throw validation_error("orbit_probability_mc: mode count mismatch");
  const BigCount members = orbit_cardinality(o, modes);
  if (members == 0) return 0.0;
  GaussianState s = encoded_state(a, n_mean);
  std::vector<double> draws(size_t(n_mc), 0.0);
  parallel_for(n_mc, threads, [&](int d) {
    RngStream rng = RngStream::derive(seed, 1, std::uint64_t(d));
    draws[size_t(d)] = probability(s, place_orbit(o, modes, rng));
  });
  double mean = 0;
  for (double v : draws) mean += v;
  return mean / double(n_mc) * double(members);
}

double feature_inner(const FeatureVector& x, const FeatureVector& y) {
  if (!(x.events == y.events))
    throw validation_error("feature_inner: mismatched event lists");
  double sum = 0;
  for (size_t i = 0; i < x.values.size(); ++i) sum += x.values[i] * y.values[i];
  return sum;
}

double feature_distance(const FeatureVector& x, const FeatureVector& y) {
  if (!(x.events == y.events))
    throw validation_error("feature_distance: mismatched event lists");
  double sum = 0;
  for (size_t i = 0; i < x.values.size(); ++i) {
    const double d = x.values[i] - y.values[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace gbs
